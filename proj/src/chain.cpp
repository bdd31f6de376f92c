#include "kinchain/chain.hpp"

#include "kinchain/stencil.hpp"

#include <cmath>

namespace kinchain {

EntropyField entropy_field(const DistributionField& f) {
    EntropyField s;
    s.base = f.set;
    s.axes = f.axes;
    s.time = f.time;
    s.log_abs.assign(f.values.size(), 0.0);
    s.sign_mask.assign(f.values.size(), 0);

    double max_abs = 0.0;
    for (double v : f.values) max_abs = std::max(max_abs, std::abs(v));
    double thr = kZeroMaskRel * max_abs;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        double v = f.values[i];
        if (v == 0.0) continue;
        // the log value is kept even under the zero-mask threshold so that
        // stencils crossing the mask boundary read something meaningful
        s.log_abs[i] = std::log(std::abs(v));
        if (std::abs(v) < thr) continue; // sign 0, masked
        s.sign_mask[i] = v > 0.0 ? 1 : -1;
    }
    return s;
}

DissipationField dissipation_source(const MeanField& mf, int p) {
    if (!mf.base.contains(p))
        throw DomainError("dissipation_source: order " + std::to_string(p) +
                          " is not an argument axis of the mean field");
    if (mf.order != p + 1)
        throw DomainError("dissipation_source: mean field must supply order " +
                          std::to_string(p + 1));
    GridLayout layout = GridLayout::of(mf.axes);
    std::vector<int> dims = dims_of_axis(layout, mf.base.axis_of(p));
    if (static_cast<int>(dims.size()) != mf.components)
        throw DomainError("dissipation_source: component mismatch");

    DissipationField q;
    q.source_order = p;
    q.base = mf.base;
    q.axes = mf.axes;
    q.time = mf.time;
    q.valid = mf.valid;
    q.values.assign(static_cast<std::size_t>(layout.size), 0.0);

    std::vector<double> deriv(static_cast<std::size_t>(layout.size));
    for (int a = 0; a < mf.components; ++a) {
        differentiate_dim(mf.values, mf.components, a, layout, dims[static_cast<std::size_t>(a)],
                          deriv);
        for (std::int64_t i = 0; i < layout.size; ++i)
            q.values[static_cast<std::size_t>(i)] += deriv[static_cast<std::size_t>(i)];
    }
    for (std::int64_t i = 0; i < layout.size; ++i)
        if (!q.valid[static_cast<std::size_t>(i)]) q.values[static_cast<std::size_t>(i)] = 0.0;
    return q;
}

namespace {

// Shared transport evaluation: out += velocity . grad(phi) with phi given as
// a component-interleaved array; accumulates validity.
void add_transport(std::span<const double> phi, int phi_comps, const GridLayout& layout,
                   const KinematicIndexSet& base, std::span<const PiTerm> terms,
                   std::span<double> out, std::span<std::uint8_t> valid) {
    std::vector<double> deriv(static_cast<std::size_t>(layout.size));
    for (const PiTerm& term : terms) {
        int axis = base.axis_of(term.axis_order);
        std::vector<int> dims = dims_of_axis(layout, axis);
        if (static_cast<int>(dims.size()) != term.velocity.components)
            throw DomainError("apply_pi: velocity components do not match the swept axis");
        for (int alpha = 0; alpha < phi_comps; ++alpha) {
            for (int beta = 0; beta < term.velocity.components; ++beta) {
                differentiate_dim(phi, phi_comps, alpha, layout,
                                  dims[static_cast<std::size_t>(beta)], deriv);
                for (std::int64_t i = 0; i < layout.size; ++i) {
                    if (!term.velocity.is_valid(i)) {
                        valid[static_cast<std::size_t>(i)] = 0;
                        continue;
                    }
                    out[static_cast<std::size_t>(i * phi_comps + alpha)] +=
                        term.velocity.at(i, beta) * deriv[static_cast<std::size_t>(i)];
                }
            }
        }
    }
}

} // namespace

PiResult apply_pi(const DistributionField& phi_minus, const DistributionField& phi_plus,
                  double dt, std::span<const PiTerm> terms) {
    require_same_grid(phi_minus, phi_plus);
    if (!(dt > 0.0)) throw DomainError("apply_pi: dt must be positive");
    GridLayout layout = phi_minus.layout();
    for (const PiTerm& term : terms) {
        if (term.velocity.base != phi_minus.set)
            throw DomainError("apply_pi: velocity base " + term.velocity.base.to_string() +
                              " does not match field set " + phi_minus.set.to_string());
        require_same_grid(term.velocity.axes, phi_minus.axes);
    }

    std::vector<double> mid(phi_minus.values.size());
    for (std::size_t i = 0; i < mid.size(); ++i)
        mid[i] = 0.5 * (phi_minus.values[i] + phi_plus.values[i]);

    PiResult out;
    out.values.assign(phi_minus.values.size(), 0.0);
    out.valid.assign(phi_minus.values.size(), 1);
    for (std::size_t i = 0; i < mid.size(); ++i)
        out.values[i] = (phi_plus.values[i] - phi_minus.values[i]) / dt;
    add_transport(mid, 1, layout, phi_minus.set, terms, out.values, out.valid);
    for (std::size_t i = 0; i < out.values.size(); ++i)
        if (!out.valid[i]) out.values[i] = 0.0;
    return out;
}

PiVectorResult apply_pi(const MeanField& phi_minus, const MeanField& phi_plus, double dt,
                        std::span<const PiTerm> terms) {
    if (phi_minus.base != phi_plus.base || phi_minus.components != phi_plus.components)
        throw DomainError("apply_pi: mean field pair mismatch");
    require_same_grid(phi_minus.axes, phi_plus.axes);
    if (!(dt > 0.0)) throw DomainError("apply_pi: dt must be positive");
    for (const PiTerm& term : terms) {
        if (term.velocity.base != phi_minus.base)
            throw DomainError("apply_pi: velocity base " + term.velocity.base.to_string() +
                              " does not match field base " + phi_minus.base.to_string());
        require_same_grid(term.velocity.axes, phi_minus.axes);
    }
    GridLayout layout = GridLayout::of(phi_minus.axes);
    int d = phi_minus.components;

    std::vector<double> mid(phi_minus.values.size());
    for (std::size_t i = 0; i < mid.size(); ++i)
        mid[i] = 0.5 * (phi_minus.values[i] + phi_plus.values[i]);

    PiVectorResult out;
    out.values.assign(phi_minus.values.size(), 0.0);
    out.valid.assign(static_cast<std::size_t>(layout.size), 1);
    for (std::int64_t c = 0; c < layout.size; ++c) {
        bool ok = phi_minus.is_valid(c) && phi_plus.is_valid(c);
        if (!ok) out.valid[static_cast<std::size_t>(c)] = 0;
        for (int a = 0; a < d; ++a)
            out.values[static_cast<std::size_t>(c * d + a)] =
                (phi_plus.at(c, a) - phi_minus.at(c, a)) / dt;
    }
    add_transport(mid, d, layout, phi_minus.base, terms, out.values, out.valid);
    for (std::int64_t c = 0; c < layout.size; ++c)
        if (!out.valid[static_cast<std::size_t>(c)])
            for (int a = 0; a < d; ++a) out.values[static_cast<std::size_t>(c * d + a)] = 0.0;
    return out;
}

double weighted_l2(std::span<const double> residual, std::span<const double> density,
                   std::span<const std::uint8_t> valid, const GridLayout& layout,
                   int components) {
    std::vector<double> num;
    std::vector<double> den;
    num.reserve(static_cast<std::size_t>(layout.size));
    den.reserve(static_cast<std::size_t>(layout.size));
    for (std::int64_t c = 0; c < layout.size; ++c) {
        if (!valid[static_cast<std::size_t>(c)]) continue;
        double w = node_weight(layout, c) * std::abs(density[static_cast<std::size_t>(c)]);
        double r2 = 0.0;
        for (int a = 0; a < components; ++a) {
            double r = residual[static_cast<std::size_t>(c * components + a)];
            r2 += r * r;
        }
        num.push_back(w * r2);
        den.push_back(w);
    }
    double nsum = pairwise_sum(num);
    double dsum = pairwise_sum(den);
    return dsum > 0.0 ? std::sqrt(nsum / dsum) : 0.0;
}

LogChainResidual chain_log_residual(const DistributionField& f_minus,
                                    const DistributionField& f_plus,
                                    std::span<const PiTerm> advection,
                                    std::span<const DissipationField> dissipation, double dt) {
    require_same_grid(f_minus, f_plus);
    EntropyField s_minus = entropy_field(f_minus);
    EntropyField s_plus = entropy_field(f_plus);
    GridLayout layout = f_minus.layout();

    // pi of the real branch; cells whose sign flips (or is zero) in the pair
    // carry no usable log and are masked.
    DistributionField phi_m = f_minus;
    DistributionField phi_p = f_plus;
    phi_m.values = s_minus.log_abs;
    phi_p.values = s_plus.log_abs;
    PiResult pi = apply_pi(phi_m, phi_p, dt, advection);

    // a residual cell is usable when its own sign is stable across the pair
    // and every node its transport stencils may read is nonzero
    std::vector<std::uint8_t> stable(static_cast<std::size_t>(layout.size));
    for (std::int64_t i = 0; i < layout.size; ++i) {
        std::size_t ii = static_cast<std::size_t>(i);
        stable[ii] = static_cast<std::uint8_t>(
            s_minus.sign_mask[ii] != 0 && s_minus.sign_mask[ii] == s_plus.sign_mask[ii] &&
            f_minus.values[ii] != 0.0 && f_plus.values[ii] != 0.0);
    }
    std::vector<std::uint8_t> usable = stable;
    for (const PiTerm& term : advection) {
        int axis = f_minus.set.axis_of(term.axis_order);
        for (int d : dims_of_axis(layout, axis)) {
            std::int64_t stride = layout.strides[static_cast<std::size_t>(d)];
            std::int64_t len = layout.dims[static_cast<std::size_t>(d)].n;
            for (std::int64_t i = 0; i < layout.size; ++i) {
                std::int64_t idx = layout.index_along(d, i);
                for (std::int64_t off = -2; off <= 2; ++off) {
                    std::int64_t j = idx + off;
                    if (j < 0 || j >= len) continue;
                    if (!(f_minus.values[static_cast<std::size_t>(i + off * stride)] != 0.0) ||
                        !(f_plus.values[static_cast<std::size_t>(i + off * stride)] != 0.0))
                        usable[static_cast<std::size_t>(i)] = 0;
                }
            }
        }
    }

    LogChainResidual out;
    out.valid.assign(static_cast<std::size_t>(layout.size), 1);
    std::vector<double> res(static_cast<std::size_t>(layout.size), 0.0);
    for (std::int64_t i = 0; i < layout.size; ++i) {
        std::size_t ii = static_cast<std::size_t>(i);
        bool ok = pi.valid[ii] && usable[ii];
        double q_sum = 0.0;
        for (const DissipationField& q : dissipation) {
            if (q.base != f_minus.set)
                throw DomainError("chain_log_residual: dissipation grid mismatch");
            if (!q.valid[ii]) ok = false;
            q_sum += q.values[ii];
        }
        out.valid[ii] = ok ? 1 : 0;
        if (ok) res[ii] = pi.values[ii] + q_sum;
    }

    std::vector<double> density(static_cast<std::size_t>(layout.size));
    for (std::int64_t i = 0; i < layout.size; ++i)
        density[static_cast<std::size_t>(i)] =
            0.5 * (f_minus.values[static_cast<std::size_t>(i)] +
                   f_plus.values[static_cast<std::size_t>(i)]);

    out.norm = weighted_l2(res, density, out.valid, layout, 1);
    out.max_abs = 0.0;
    std::int64_t masked = 0;
    for (std::int64_t i = 0; i < layout.size; ++i) {
        if (!out.valid[static_cast<std::size_t>(i)]) ++masked;
        out.max_abs = std::max(out.max_abs, std::abs(res[static_cast<std::size_t>(i)]));
    }
    out.mask_fraction =
        layout.size > 0 ? static_cast<double>(masked) / static_cast<double>(layout.size) : 0.0;
    out.mask_warning = out.mask_fraction > 0.5;

    DistributionField rf = f_minus;
    rf.values = std::move(res);
    rf.time = 0.5 * (f_minus.time + f_plus.time);
    out.residual = std::move(rf);
    return out;
}

} // namespace kinchain
