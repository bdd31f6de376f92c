#include "kinchain/h_entropy.hpp"

#include <cmath>
#include <vector>

namespace kinchain {

namespace {
double reduce_weighted(const GridLayout& layout, std::span<const double> values) {
    std::vector<double> buf(static_cast<std::size_t>(layout.size));
    for (std::int64_t i = 0; i < layout.size; ++i)
        buf[static_cast<std::size_t>(i)] =
            node_weight(layout, i) * values[static_cast<std::size_t>(i)];
    return pairwise_sum(buf);
}
} // namespace

HReport h_function(const DistributionField& f, std::span<const DissipationField> qs) {
    GridLayout layout = f.layout();
    EntropyField s = entropy_field(f);

    HReport rep;
    rep.set = f.set;
    rep.time = f.time;
    rep.f0 = reduce_weighted(layout, f.values);
    std::vector<double> abs_vals(f.values.size());
    for (std::size_t i = 0; i < f.values.size(); ++i) abs_vals[i] = std::abs(f.values[i]);
    double mass_scale = reduce_weighted(layout, abs_vals);
    if (std::abs(rep.f0) <= kZeroMaskRel * mass_scale || rep.f0 == 0.0)
        throw NumericalGuardError("h_function: f^0 vanishes, H undefined");

    std::vector<double> flnf(static_cast<std::size_t>(layout.size), 0.0);
    std::vector<double> fneg(static_cast<std::size_t>(layout.size), 0.0);
    for (std::int64_t i = 0; i < layout.size; ++i) {
        std::size_t ii = static_cast<std::size_t>(i);
        if (s.sign_mask[ii] == 0) continue; // x ln x -> 0 at masked cells
        flnf[ii] = f.values[ii] * s.log_abs[ii];
        if (s.sign_mask[ii] < 0) fneg[ii] = f.values[ii];
    }
    rep.H = reduce_weighted(layout, flnf) / rep.f0;
    rep.f0_minus = reduce_weighted(layout, fneg);

    for (const DissipationField& q : qs) {
        if (q.base != f.set) throw DomainError("h_function: dissipation field grid mismatch");
        require_same_grid(q.axes, f.axes);
        std::vector<double> fq(static_cast<std::size_t>(layout.size), 0.0);
        for (std::int64_t i = 0; i < layout.size; ++i) {
            std::size_t ii = static_cast<std::size_t>(i);
            if (q.valid[ii]) fq[ii] = f.values[ii] * q.values[ii];
        }
        rep.mean_Q.emplace_back(q.source_order, reduce_weighted(layout, fq) / rep.f0);
    }
    return rep;
}

HTheoremResidual h_theorem_residual(const DistributionField& f_minus,
                                    const DistributionField& f_plus,
                                    std::span<const DissipationField> qs, double dt,
                                    bool wigner_mode) {
    require_same_grid(f_minus, f_plus);
    if (!(dt > 0.0)) throw DomainError("h_theorem_residual: dt must be positive");
    if (!wigner_mode) {
        for (const DistributionField* f : {&f_minus, &f_plus})
            for (double v : f->values)
                if (v < 0.0)
                    throw DomainError("h_theorem_residual: sign-indefinite field; the H balance "
                                      "needs f >= 0 (enable the quasi-probability mode)");
    }
    DistributionField f_mid = midpoint(f_minus, f_plus);
    HReport h_m = h_function(f_minus);
    HReport h_p = h_function(f_plus);
    HReport h_c = h_function(f_mid, qs);

    HTheoremResidual out;
    out.dH_term = (h_p.f0 * h_p.H - h_m.f0 * h_m.H) / dt;
    double qsum = 0.0;
    for (const auto& [p, q] : h_c.mean_Q) qsum += q;
    out.source_term = -h_c.f0 * qsum;
    out.residual = out.dH_term - out.source_term;
    out.f0_minus_drift = h_p.f0_minus - h_m.f0_minus;
    return out;
}

RegionDecomposition negative_region(const DistributionField& f) {
    GridLayout layout = f.layout();
    std::int64_t n = layout.size;
    double max_abs = 0.0;
    for (double v : f.values) max_abs = std::max(max_abs, std::abs(v));
    double thr = kZeroMaskRel * max_abs;

    RegionDecomposition out;
    out.positive_mask.assign(static_cast<std::size_t>(n), 0);
    out.negative_mask.assign(static_cast<std::size_t>(n), 0);
    out.boundary_mask.assign(static_cast<std::size_t>(n), 0);
    out.component_of.assign(static_cast<std::size_t>(n), -1);

    auto sign_of = [&](std::int64_t i) -> int {
        double v = f.values[static_cast<std::size_t>(i)];
        if (std::abs(v) < thr || v == 0.0) return 0;
        return v > 0.0 ? 1 : -1;
    };
    for (std::int64_t i = 0; i < n; ++i) {
        int s = sign_of(i);
        if (s > 0)
            out.positive_mask[static_cast<std::size_t>(i)] = 1;
        else if (s < 0)
            out.negative_mask[static_cast<std::size_t>(i)] = 1;
        else
            out.boundary_mask[static_cast<std::size_t>(i)] = 1;
    }

    // count faces where the sign flips (the discrete interface Sigma)
    for (int d = 0; d < layout.ndims(); ++d) {
        std::int64_t stride = layout.strides[static_cast<std::size_t>(d)];
        std::int64_t len = layout.dims[static_cast<std::size_t>(d)].n;
        for (std::int64_t i = 0; i < n; ++i) {
            if (layout.index_along(d, i) + 1 >= len) continue;
            int a = sign_of(i), b = sign_of(i + stride);
            if (a * b < 0) ++out.interface_face_count;
        }
    }

    // connected components of the negative mask by face adjacency
    std::vector<std::int64_t> stack;
    for (std::int64_t seed = 0; seed < n; ++seed) {
        if (!out.negative_mask[static_cast<std::size_t>(seed)] ||
            out.component_of[static_cast<std::size_t>(seed)] >= 0)
            continue;
        int comp = out.negative_component_count++;
        std::vector<double> contrib;
        stack.push_back(seed);
        out.component_of[static_cast<std::size_t>(seed)] = comp;
        while (!stack.empty()) {
            std::int64_t cur = stack.back();
            stack.pop_back();
            contrib.push_back(node_weight(layout, cur) *
                              f.values[static_cast<std::size_t>(cur)]);
            for (int d = 0; d < layout.ndims(); ++d) {
                std::int64_t stride = layout.strides[static_cast<std::size_t>(d)];
                std::int64_t idx = layout.index_along(d, cur);
                for (int step = -1; step <= 1; step += 2) {
                    std::int64_t ni = idx + step;
                    if (ni < 0 || ni >= layout.dims[static_cast<std::size_t>(d)].n) continue;
                    std::int64_t nb = cur + step * stride;
                    if (!out.negative_mask[static_cast<std::size_t>(nb)] ||
                        out.component_of[static_cast<std::size_t>(nb)] >= 0)
                        continue;
                    out.component_of[static_cast<std::size_t>(nb)] = comp;
                    stack.push_back(nb);
                }
            }
        }
        out.component_f0_minus.push_back(pairwise_sum(contrib));
    }
    return out;
}

F0MinusTrack track_f0_minus(std::span<const DistributionField> series) {
    F0MinusTrack track;
    if (series.empty()) return track;
    for (const DistributionField& f : series) {
        HReport rep = h_function(f);
        track.times.push_back(f.time);
        track.values.push_back(rep.f0_minus);
    }
    for (double v : track.values)
        track.max_abs_drift = std::max(track.max_abs_drift, std::abs(v - track.values.front()));
    return track;
}

} // namespace kinchain
