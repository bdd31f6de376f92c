#include "kinchain/conservation.hpp"

#include "kinchain/stencil.hpp"

#include "reduce.hpp"

#include <cmath>

namespace kinchain {

using detail::for_each_kept;
using detail::masked_threshold;
using detail::reduced_dims_for;
using detail::subgrid_table;
using detail::SubgridTable;

std::string to_string(EquationId id) {
    switch (id) {
        case EquationId::eq3_2: return "3.2";
        case EquationId::eq3_3: return "3.3";
        case EquationId::eq3_8: return "3.8";
        case EquationId::eq3_9: return "3.9";
        case EquationId::eq3_13: return "3.13";
        case EquationId::eq3_14: return "3.14";
        case EquationId::eq3_15: return "3.15";
        case EquationId::eq3_17: return "3.17";
        case EquationId::eq3_18: return "3.18";
        case EquationId::eq3_19: return "3.19";
        case EquationId::eq3_20: return "3.20";
        case EquationId::eq3_22: return "3.22";
        case EquationId::quantum_pressure: return "i.8";
    }
    return "?";
}

std::optional<EquationId> equation_from_string(const std::string& name) {
    for (EquationId id :
         {EquationId::eq3_2, EquationId::eq3_3, EquationId::eq3_8, EquationId::eq3_9,
          EquationId::eq3_13, EquationId::eq3_14, EquationId::eq3_15, EquationId::eq3_17,
          EquationId::eq3_18, EquationId::eq3_19, EquationId::eq3_20, EquationId::eq3_22,
          EquationId::quantum_pressure})
        if (to_string(id) == name) return id;
    return std::nullopt;
}

namespace {

void finish_report(ResidualReport& rep, const std::vector<double>& density,
                   const GridLayout& layout) {
    std::int64_t masked = 0;
    rep.max_abs = 0.0;
    for (std::int64_t c = 0; c < layout.size; ++c) {
        if (!rep.valid[static_cast<std::size_t>(c)]) {
            ++masked;
            for (int a = 0; a < rep.components; ++a)
                rep.residual[static_cast<std::size_t>(c * rep.components + a)] = 0.0;
            continue;
        }
        for (int a = 0; a < rep.components; ++a)
            rep.max_abs = std::max(
                rep.max_abs,
                std::abs(rep.residual[static_cast<std::size_t>(c * rep.components + a)]));
    }
    rep.mask_fraction =
        layout.size > 0 ? static_cast<double>(masked) / static_cast<double>(layout.size) : 0.0;
    rep.mask_warning = rep.mask_fraction > 0.5;
    rep.residual_norm = weighted_l2(rep.residual, density, rep.valid, layout, rep.components);
}

} // namespace

ResidualReport motion_residual_core(EquationId id, const FieldPair& density_pair,
                                    const MeanField& advected_minus,
                                    const MeanField& advected_plus,
                                    std::span<const PiTerm> advection,
                                    std::span<const PTermSpec> p_terms, const MeanField& source) {
    double dt = density_pair.dt();
    if (!(dt > 0.0)) throw DomainError("motion residual: pair must span a positive dt");
    require_same_grid(density_pair.minus, density_pair.plus);
    DistributionField f_mid = midpoint(density_pair.minus, density_pair.plus);
    GridLayout layout = f_mid.layout();
    int d = advected_minus.components;

    PiVectorResult pi = apply_pi(advected_minus, advected_plus, dt, advection);

    std::vector<double> div_sum(static_cast<std::size_t>(layout.size * d), 0.0);
    std::vector<std::uint8_t> p_valid(static_cast<std::size_t>(layout.size), 1);
    for (const PTermSpec& spec : p_terms) {
        if (spec.P.base != f_mid.set)
            throw DomainError("motion residual: tensor base " + spec.P.base.to_string() +
                              " does not match " + f_mid.set.to_string());
        require_same_grid(spec.P.axes, f_mid.axes);
        std::vector<double> div = divergence2(spec.P, spec.axis_order, spec.contracted_slot);
        for (std::int64_t c = 0; c < layout.size; ++c) {
            if (!spec.P.is_valid(c)) p_valid[static_cast<std::size_t>(c)] = 0;
            for (int a = 0; a < d; ++a)
                div_sum[static_cast<std::size_t>(c * d + a)] +=
                    div[static_cast<std::size_t>(c * d + a)];
        }
    }
    if (source.base != f_mid.set || source.components != d)
        throw DomainError("motion residual: source mean mismatch");
    require_same_grid(source.axes, f_mid.axes);

    double thr = masked_threshold(f_mid.values);

    ResidualReport rep;
    rep.id = id;
    rep.base = f_mid.set;
    rep.axes = f_mid.axes;
    rep.components = d;
    rep.time = density_pair.mid_time();
    rep.lhs.assign(static_cast<std::size_t>(layout.size * d), 0.0);
    rep.rhs.assign(static_cast<std::size_t>(layout.size * d), 0.0);
    rep.residual.assign(static_cast<std::size_t>(layout.size * d), 0.0);
    rep.valid.assign(static_cast<std::size_t>(layout.size), 1);

    for (std::int64_t c = 0; c < layout.size; ++c) {
        std::size_t cc = static_cast<std::size_t>(c);
        double fv = f_mid.values[cc];
        bool ok = pi.valid[cc] && p_valid[cc] && source.is_valid(c) && thr > 0.0 &&
                  std::abs(fv) >= thr;
        rep.valid[cc] = ok ? 1 : 0;
        if (!ok) continue;
        for (int a = 0; a < d; ++a) {
            std::size_t ca = static_cast<std::size_t>(c * d + a);
            rep.lhs[ca] = pi.values[ca] + div_sum[ca] / fv;
            rep.rhs[ca] = source.at(c, a);
            rep.residual[ca] = rep.lhs[ca] - rep.rhs[ca];
        }
    }
    finish_report(rep, f_mid.values, layout);
    return rep;
}

namespace {

// 3.2 assembly; the ladder row 0 reuses it under the 3.20 label.
ResidualReport momentum_first_impl(const FieldPair& f12, const MeanField& closure_mid,
                                   EquationId id) {
    const KinematicIndexSet& set = f12.minus.set;
    if (set.rank() != 2 || set[1] != set[0] + 1)
        throw DomainError("momentum_residual_first: index set must be {n, n+1}");
    int top = set[1];
    KinematicIndexSet drop_top{top};

    FieldPair fn{marginalize(f12.minus, drop_top), marginalize(f12.plus, drop_top)};
    MeanField m_minus = mean_kinematic(f12.minus, top, {});
    MeanField m_plus = mean_kinematic(f12.plus, top, {});

    DistributionField f_mid = midpoint(f12.minus, f12.plus);
    MeanField adv = mean_kinematic(f_mid, top, {});
    MomentTensorField P = central_moment2(f_mid, top, top, drop_top);
    if (closure_mid.base != set || closure_mid.order != top + 1)
        throw DomainError("momentum_residual_first: closure must supply <xi^{n+2}>_{n,n+1}");
    MeanField high = nested_average(closure_mid, f_mid, drop_top);

    std::vector<PiTerm> advection{PiTerm{set[0], adv}};
    std::vector<PTermSpec> p_terms;
    p_terms.push_back(PTermSpec{std::move(P), set[0], 0});
    return motion_residual_core(id, fn, m_minus, m_plus, advection, p_terms, high);
}

} // namespace

ResidualReport momentum_residual_first(const FieldPair& f12, const MeanField& closure_mid) {
    return momentum_first_impl(f12, closure_mid, EquationId::eq3_2);
}

ResidualReport divergence_identity_check_lambda0(const FieldPair& f12,
                                                 const MeanField& closure_mid) {
    return momentum_first_impl(f12, closure_mid, EquationId::eq3_20);
}

ResidualReport momentum_residual_second(const FieldPair& f_nk, const DistributionField& f3_mid,
                                        const MeanField& high_rank2) {
    const KinematicIndexSet& set = f_nk.minus.set;
    if (set.rank() != 2 || set[1] - set[0] < 2)
        throw DomainError("momentum_residual_second: index set must be {n, n+k}, k > 1");
    int n = set[0], top = set[1];
    if (!(f3_mid.set == KinematicIndexSet{n, n + 1, top}))
        throw DomainError("momentum_residual_second: rank-3 field must live on {n, n+1, n+k}");

    KinematicIndexSet drop_top{top};
    FieldPair fn{marginalize(f_nk.minus, drop_top), marginalize(f_nk.plus, drop_top)};
    MeanField m_minus = mean_kinematic(f_nk.minus, top, {});
    MeanField m_plus = mean_kinematic(f_nk.plus, top, {});

    DistributionField f_mid = midpoint(f_nk.minus, f_nk.plus);
    MeanField adv = mean_kinematic(f3_mid, n + 1, drop_top);
    MomentTensorField P = central_moment2(f3_mid, n + 1, top, KinematicIndexSet{n + 1, top});
    if (high_rank2.base != set || high_rank2.order != top + 1)
        throw DomainError("momentum_residual_second: need <xi^{n+k+1}>_{n,n+k}");
    MeanField high = nested_average(high_rank2, f_mid, drop_top);

    std::vector<PiTerm> advection{PiTerm{n, adv}};
    std::vector<PTermSpec> p_terms;
    p_terms.push_back(PTermSpec{std::move(P), n, 0});
    return motion_residual_core(EquationId::eq3_8, fn, m_minus, m_plus, advection, p_terms, high);
}

ResidualReport energy_residual_core(EquationId id, const FieldPair& f_nk, const MeanField& adv,
                                    const MomentTensorField& P_mixed,
                                    const MomentTensorField& P3_mixed,
                                    const MeanField& high_rank2) {
    const KinematicIndexSet& set = f_nk.minus.set;
    if (set.rank() != 2) throw DomainError("energy residual: rank-2 pair required");
    int n = set[0], top = set[1];
    KinematicIndexSet drop_top{top};
    double dt = f_nk.dt();
    if (!(dt > 0.0)) throw DomainError("energy residual: pair must span a positive dt");

    DistributionField f_mid = midpoint(f_nk.minus, f_nk.plus);
    DistributionField fn_mid = marginalize(f_mid, drop_top);
    GridLayout base_layout = fn_mid.layout();
    int d = adv.components;

    // E(t) = (f^n/2) <xi^{top}>^2 + Tr P^{top}/2 at both instants
    auto energy_at = [&](const DistributionField& f, std::vector<std::uint8_t>& ok)
        -> std::vector<double> {
        DistributionField fn = marginalize(f, drop_top);
        MeanField m = mean_kinematic(f, top, {});
        MomentTensorField P2 = central_moment2(f, top, top, drop_top);
        std::vector<double> e(static_cast<std::size_t>(base_layout.size), 0.0);
        for (std::int64_t c = 0; c < base_layout.size; ++c) {
            std::size_t cc = static_cast<std::size_t>(c);
            if (!m.is_valid(c) || !P2.is_valid(c)) {
                ok[cc] = 0;
                continue;
            }
            double m2 = 0.0, tr = 0.0;
            for (int a = 0; a < d; ++a) {
                m2 += m.at(c, a) * m.at(c, a);
                tr += P2.at2(c, a, a);
            }
            e[cc] = 0.5 * fn.values[cc] * m2 + 0.5 * tr;
        }
        return e;
    };
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(base_layout.size), 1);
    std::vector<double> e_minus = energy_at(f_nk.minus, valid);
    std::vector<double> e_plus = energy_at(f_nk.plus, valid);

    // midpoint flux over the base axis
    MeanField m_mid = mean_kinematic(f_mid, top, {});
    MomentTensorField P2_mid = central_moment2(f_mid, top, top, drop_top);
    if (adv.base != fn_mid.set) throw DomainError("energy residual: advection mean on wrong base");
    if (P_mixed.base != fn_mid.set || P3_mixed.base != fn_mid.set)
        throw DomainError("energy residual: moment tensors on wrong base");
    if (high_rank2.base != set) throw DomainError("energy residual: high mean on wrong base");
    require_same_grid(high_rank2.axes, f_mid.axes);

    std::vector<double> flux(static_cast<std::size_t>(base_layout.size * d), 0.0);
    for (std::int64_t c = 0; c < base_layout.size; ++c) {
        std::size_t cc = static_cast<std::size_t>(c);
        if (!m_mid.is_valid(c) || !P2_mid.is_valid(c) || !P_mixed.is_valid(c) ||
            !P3_mixed.is_valid(c) || !adv.is_valid(c)) {
            valid[cc] = 0;
            continue;
        }
        double m2 = 0.0, tr = 0.0;
        for (int a = 0; a < d; ++a) {
            m2 += m_mid.at(c, a) * m_mid.at(c, a);
            tr += P2_mid.at2(c, a, a);
        }
        double fn_v = fn_mid.values[cc];
        for (int b = 0; b < d; ++b) {
            double work = 0.0, tr3 = 0.0;
            for (int a = 0; a < d; ++a) {
                work += P_mixed.at2(c, b, a) * m_mid.at(c, a);
                tr3 += P3_mixed.at3(c, b, a, a);
            }
            flux[static_cast<std::size_t>(c * d + b)] =
                0.5 * fn_v * m2 * adv.at(c, b) + 0.5 * adv.at(c, b) * tr + work + 0.5 * tr3;
        }
    }

    // div of the flux along the base axis
    std::vector<int> base_dims = dims_of_axis(base_layout, fn_mid.set.axis_of(n));
    std::vector<double> div_flux(static_cast<std::size_t>(base_layout.size), 0.0);
    std::vector<double> deriv(static_cast<std::size_t>(base_layout.size));
    for (int b = 0; b < d; ++b) {
        differentiate_dim(flux, d, b, base_layout, base_dims[static_cast<std::size_t>(b)], deriv);
        for (std::int64_t c = 0; c < base_layout.size; ++c)
            div_flux[static_cast<std::size_t>(c)] += deriv[static_cast<std::size_t>(c)];
    }

    // work integral over the top axis at the midpoint
    GridLayout layout = f_mid.layout();
    std::vector<int> top_dims = dims_of_axis(layout, set.axis_of(top));
    std::vector<int> reduced = reduced_dims_for(layout, set, drop_top);
    SubgridTable table = subgrid_table(layout, reduced, top_dims);
    std::vector<double> rhs(static_cast<std::size_t>(base_layout.size), 0.0);
    std::vector<double> buf(table.offsets.size());
    for_each_kept(layout, reduced, [&](std::int64_t cell, std::int64_t base_off) {
        std::size_t kept = 0;
        for (std::size_t e = 0; e < table.offsets.size(); ++e) {
            std::int64_t src = base_off + table.offsets[e];
            if (!high_rank2.is_valid(src)) continue;
            double dot = 0.0;
            for (int a = 0; a < d; ++a)
                dot += high_rank2.at(src, a) * table.coords[static_cast<std::size_t>(a)][e];
            buf[kept++] =
                table.weights[e] * f_mid.values[static_cast<std::size_t>(src)] * dot;
        }
        rhs[static_cast<std::size_t>(cell)] =
            pairwise_sum(std::span<const double>(buf.data(), kept));
    });

    ResidualReport rep;
    rep.id = id;
    rep.base = fn_mid.set;
    rep.axes = fn_mid.axes;
    rep.components = 1;
    rep.time = f_nk.mid_time();
    rep.lhs.assign(static_cast<std::size_t>(base_layout.size), 0.0);
    rep.rhs = rhs;
    rep.residual.assign(static_cast<std::size_t>(base_layout.size), 0.0);
    rep.valid = valid;
    for (std::int64_t c = 0; c < base_layout.size; ++c) {
        std::size_t cc = static_cast<std::size_t>(c);
        if (!rep.valid[cc]) continue;
        rep.lhs[cc] = (e_plus[cc] - e_minus[cc]) / dt + div_flux[cc];
        rep.residual[cc] = rep.lhs[cc] - rep.rhs[cc];
    }
    finish_report(rep, fn_mid.values, base_layout);
    return rep;
}

ResidualReport energy_residual_first(const FieldPair& f12, const MeanField& closure_mid) {
    const KinematicIndexSet& set = f12.minus.set;
    if (set.rank() != 2 || set[1] != set[0] + 1)
        throw DomainError("energy_residual_first: index set must be {n, n+1}");
    int top = set[1];
    KinematicIndexSet drop_top{top};
    DistributionField f_mid = midpoint(f12.minus, f12.plus);
    MeanField adv = mean_kinematic(f_mid, top, {});
    MomentTensorField P_mixed = central_moment2(f_mid, top, top, drop_top);
    MomentTensorField P3 = central_moment3(f_mid, top, top, top, drop_top);
    return energy_residual_core(EquationId::eq3_3, f12, adv, P_mixed, P3, closure_mid);
}

ResidualReport energy_residual_second(const FieldPair& f_nk, const DistributionField& f3_mid,
                                      const MeanField& high_rank2) {
    const KinematicIndexSet& set = f_nk.minus.set;
    if (set.rank() != 2 || set[1] - set[0] < 2)
        throw DomainError("energy_residual_second: index set must be {n, n+k}, k > 1");
    int n = set[0], top = set[1];
    if (!(f3_mid.set == KinematicIndexSet{n, n + 1, top}))
        throw DomainError("energy_residual_second: rank-3 field must live on {n, n+1, n+k}");
    KinematicIndexSet drop_mid{n + 1, top};
    MeanField adv = mean_kinematic(f3_mid, n + 1, KinematicIndexSet{top});
    MomentTensorField P_mixed = central_moment2(f3_mid, n + 1, top, drop_mid);
    MomentTensorField P3 = central_moment3(f3_mid, n + 1, top, top, drop_mid);
    return energy_residual_core(EquationId::eq3_9, f_nk, adv, P_mixed, P3, high_rank2);
}

namespace {

MeanField require_opt(const std::optional<MeanField>& m, const char* what) {
    if (!m) throw ConfigError(std::string("rank-3 residual: missing input tensor/mean: ") + what);
    return *m;
}

struct Rank3Prepared {
    int n = 0, m = 0; // set = {n, n+1, m}
    DistributionField f3_mid;
    MeanField top3_mid;
    MeanField mid3_mid;
};

Rank3Prepared prepare3(const Rank3Inputs& in, bool need_top, bool need_mid) {
    const KinematicIndexSet& set = in.f3.minus.set;
    if (set.rank() != 3 || set[1] != set[0] + 1)
        throw DomainError("rank-3 residual: index set must be {n, n+1, m}");
    Rank3Prepared p;
    p.n = set[0];
    p.m = set[2];
    p.f3_mid = midpoint(in.f3.minus, in.f3.plus);
    if (need_top) {
        MeanField tm = require_opt(in.top3_minus, "<xi^{m+1}>_{n,n+1,m} at t-");
        MeanField tp = require_opt(in.top3_plus, "<xi^{m+1}>_{n,n+1,m} at t+");
        if (tm.base != set || tm.order != p.m + 1)
            throw ConfigError("rank-3 residual: top closure must supply <xi^{m+1}> on " +
                              set.to_string());
        p.top3_mid = midpoint(tm, tp);
    }
    if (need_mid) {
        if (in.mid3_mid) {
            p.mid3_mid = *in.mid3_mid;
            if (p.mid3_mid.base != set)
                throw ConfigError("rank-3 residual: mid closure must live on " + set.to_string());
        } else if (p.m == p.n + 2) {
            // k = 1: <xi^{n+2}>_{n,n+1,n+2} degenerates to the coordinate
            p.mid3_mid = coordinate_mean(p.f3_mid, p.n + 2);
        } else {
            throw ConfigError("rank-3 residual: missing input tensor/mean: <xi^{n+2}>_{n,n+1,m}");
        }
    }
    return p;
}

} // namespace

ResidualReport rank3_motion_residual(EquationId id, const Rank3Inputs& in) {
    switch (id) {
        case EquationId::eq3_15:
        case EquationId::eq3_19:
        case EquationId::eq3_20: {
            // pi_{n,n+1} <xi^{m}>_{n,n+1}  =  -(1/f^{n,n+1}) div_{n+1} P^{n+2,m} + <xi^{m+1}>_{n,n+1}
            Rank3Prepared p = prepare3(in, true, true);
            KinematicIndexSet drop_m{p.m};
            FieldPair fb{marginalize(in.f3.minus, drop_m), marginalize(in.f3.plus, drop_m)};
            MeanField adv_minus = mean_kinematic(in.f3.minus, p.m, {});
            MeanField adv_plus = mean_kinematic(in.f3.plus, p.m, {});
            DistributionField fb_mid = midpoint(fb.minus, fb.plus);
            std::vector<PiTerm> advection{
                PiTerm{p.n, coordinate_mean(fb_mid, p.n + 1)},
                PiTerm{p.n + 1, nested_average(p.mid3_mid, p.f3_mid, drop_m)}};
            MomentTensorField P = central_moment2_virtual(p.f3_mid, p.m, p.mid3_mid, drop_m);
            MeanField high = nested_average(p.top3_mid, p.f3_mid, drop_m);
            std::vector<PTermSpec> p_terms;
            p_terms.push_back(PTermSpec{std::move(P), p.n + 1, 1});
            return motion_residual_core(id, fb, adv_minus, adv_plus, advection, p_terms, high);
        }
        case EquationId::eq3_14:
        case EquationId::eq3_18: {
            // pi_{n,m} <xi^{n+1}>_{n,m}  =  -(1/f^{n,m}) [div_n P^{n+1} + div_m P^{n+1,m+1}]
            //                               + <xi^{n+2}>_{n,m}
            Rank3Prepared p = prepare3(in, true, true);
            KinematicIndexSet drop1{p.n + 1};
            FieldPair fb{marginalize(in.f3.minus, drop1), marginalize(in.f3.plus, drop1)};
            MeanField adv_minus = mean_kinematic(in.f3.minus, p.n + 1, {});
            MeanField adv_plus = mean_kinematic(in.f3.plus, p.n + 1, {});
            DistributionField fb_mid = midpoint(fb.minus, fb.plus);
            MeanField adv_low = midpoint(adv_minus, adv_plus);
            std::vector<PiTerm> advection{
                PiTerm{p.n, adv_low},
                PiTerm{p.m, nested_average(p.top3_mid, p.f3_mid, drop1)}};
            MomentTensorField Pa = central_moment2(p.f3_mid, p.n + 1, p.n + 1, drop1);
            MomentTensorField Pb = central_moment2_virtual(p.f3_mid, p.n + 1, p.top3_mid, drop1);
            MeanField source = nested_average(p.mid3_mid, p.f3_mid, drop1);
            std::vector<PTermSpec> p_terms;
            p_terms.push_back(PTermSpec{std::move(Pa), p.n, 1});
            p_terms.push_back(PTermSpec{std::move(Pb), p.m, 1});
            return motion_residual_core(id, fb, adv_minus, adv_plus, advection, p_terms, source);
        }
        case EquationId::eq3_13: {
            // pi_{n+1,n+2} <xi^n>_{n+1,n+2} = -(1/f^{n+1,n+2}) div_{n+2} P^{n,n+3} + xi^{n+1}
            Rank3Prepared p = prepare3(in, true, false);
            if (p.m != p.n + 2)
                throw DomainError("eq 3.13 needs the contiguous set {n, n+1, n+2}");
            KinematicIndexSet dropn{p.n};
            FieldPair fb{marginalize(in.f3.minus, dropn), marginalize(in.f3.plus, dropn)};
            MeanField adv_minus = mean_kinematic(in.f3.minus, p.n, {});
            MeanField adv_plus = mean_kinematic(in.f3.plus, p.n, {});
            DistributionField fb_mid = midpoint(fb.minus, fb.plus);
            std::vector<PiTerm> advection{
                PiTerm{p.n + 1, coordinate_mean(fb_mid, p.n + 2)},
                PiTerm{p.n + 2, nested_average(p.top3_mid, p.f3_mid, dropn)}};
            MomentTensorField P = central_moment2_virtual(p.f3_mid, p.n, p.top3_mid, dropn);
            MeanField source = coordinate_mean(fb_mid, p.n + 1);
            std::vector<PTermSpec> p_terms;
            p_terms.push_back(PTermSpec{std::move(P), p.n + 2, 1});
            return motion_residual_core(id, fb, adv_minus, adv_plus, advection, p_terms, source);
        }
        case EquationId::eq3_17: {
            // pi_{n+1,m} <xi^n>_{n+1,m}  =  -(1/f^{n+1,m}) [div_{n+1} P^{n,n+2} + div_m P^{n,m+1}]
            //                               + xi^{n+1}
            Rank3Prepared p = prepare3(in, true, true);
            KinematicIndexSet dropn{p.n};
            FieldPair fb{marginalize(in.f3.minus, dropn), marginalize(in.f3.plus, dropn)};
            MeanField adv_minus = mean_kinematic(in.f3.minus, p.n, {});
            MeanField adv_plus = mean_kinematic(in.f3.plus, p.n, {});
            DistributionField fb_mid = midpoint(fb.minus, fb.plus);
            std::vector<PiTerm> advection{
                PiTerm{p.n + 1, nested_average(p.mid3_mid, p.f3_mid, dropn)},
                PiTerm{p.m, nested_average(p.top3_mid, p.f3_mid, dropn)}};
            MomentTensorField Pa = central_moment2_virtual(p.f3_mid, p.n, p.mid3_mid, dropn);
            MomentTensorField Pb = central_moment2_virtual(p.f3_mid, p.n, p.top3_mid, dropn);
            MeanField source = coordinate_mean(fb_mid, p.n + 1);
            std::vector<PTermSpec> p_terms;
            p_terms.push_back(PTermSpec{std::move(Pa), p.n + 1, 1});
            p_terms.push_back(PTermSpec{std::move(Pb), p.m, 1});
            return motion_residual_core(id, fb, adv_minus, adv_plus, advection, p_terms, source);
        }
        default:
            throw DomainError("rank3_motion_residual: unsupported equation " + to_string(id));
    }
}

ResidualReport divergence_identity_check(int lambda, const Rank3Inputs& in) {
    if (lambda == 1) return rank3_motion_residual(EquationId::eq3_20, in);
    throw DomainError("divergence_identity_check: row " + std::to_string(lambda) +
                      " needs rank-" + std::to_string(lambda + 2) +
                      " conditioning data; rows 0 and 1 are supported "
                      "(use the rank-2 overload for row 0)");
}

Theorem5Report theorem5_check(const DistributionField& f, int lambda, const MeanField* pi_top,
                              const MeanField* reference, bool assume_constant_P) {
    const KinematicIndexSet& set = f.set;
    if (lambda < 0 || set.rank() != lambda + 2)
        throw DomainError("theorem5_check: field must live on the contiguous set {n,..,n+1+lambda}");
    for (int i = 1; i < set.rank(); ++i)
        if (set[i] != set[0] + i)
            throw DomainError("theorem5_check: index set must be contiguous, got " +
                              set.to_string());
    int reflect_axis = lambda; // xi^{n+lambda}, second-to-last axis
    const AxisGrid& ax = f.axes[static_cast<std::size_t>(reflect_axis)];
    for (const AxisComponent& comp : ax.comps)
        if (std::abs(comp.lo + comp.hi) > 1e-12 * (comp.hi - comp.lo))
            throw ConfigError("theorem5_check: reflected axis grid must be symmetric about 0");

    GridLayout layout = f.layout();
    std::vector<int> rdims = dims_of_axis(layout, reflect_axis);
    double max_abs = 0.0;
    for (double v : f.values) max_abs = std::max(max_abs, std::abs(v));
    double max_asym = 0.0;
    for (std::int64_t flat = 0; flat < layout.size; ++flat) {
        std::int64_t mirror = flat;
        for (int d : rdims) {
            std::int64_t i = layout.index_along(d, flat);
            std::int64_t ni = layout.dims[static_cast<std::size_t>(d)].n - 1 - i;
            mirror += (ni - i) * layout.strides[static_cast<std::size_t>(d)];
        }
        max_asym = std::max(max_asym, std::abs(f.values[static_cast<std::size_t>(flat)] -
                                               f.values[static_cast<std::size_t>(mirror)]));
    }

    Theorem5Report rep;
    rep.max_asymmetry_rel = max_abs > 0.0 ? max_asym / max_abs : 0.0;
    rep.verdict = rep.max_asymmetry_rel <= kParityTol ? ParityVerdict::even
                                                      : ParityVerdict::odd_component_detected;
    bool hypothesis = rep.verdict == ParityVerdict::even || assume_constant_P;
    if (!hypothesis || pi_top == nullptr) return rep;

    // reconstruction of the next mean value:
    //   <xi^{n+2+lambda}>_{n..n+lambda-1}
    //     = (1/f^{n..n+lambda}) Int f^{n..n+lambda} pi<xi^{n+1+lambda}> dxi^{n+lambda}
    int top_order = set[set.rank() - 1];
    DistributionField f_low = marginalize(f, KinematicIndexSet{top_order});
    if (pi_top->base != f_low.set)
        throw DomainError("theorem5_check: pi_top must live on " + f_low.set.to_string());
    MeanField recon = nested_average(*pi_top, f_low, KinematicIndexSet{set[lambda]});
    recon.order = set[set.rank() - 1] + 1;
    rep.reconstruction = recon;

    if (reference != nullptr) {
        if (reference->base != recon.base || reference->components != recon.components)
            throw DomainError("theorem5_check: reference mean on wrong base");
        GridLayout small = GridLayout::of(recon.axes);
        DistributionField f_small =
            marginalize(f_low, KinematicIndexSet{set[lambda]});
        ResidualReport idrep;
        idrep.id = EquationId::eq3_22;
        idrep.base = recon.base;
        idrep.axes = recon.axes;
        idrep.components = recon.components;
        idrep.time = f.time;
        std::int64_t cells = small.size;
        int d = recon.components;
        idrep.lhs.assign(static_cast<std::size_t>(cells * d), 0.0);
        idrep.rhs.assign(static_cast<std::size_t>(cells * d), 0.0);
        idrep.residual.assign(static_cast<std::size_t>(cells * d), 0.0);
        idrep.valid.assign(static_cast<std::size_t>(cells), 1);
        for (std::int64_t c = 0; c < cells; ++c) {
            bool ok = recon.is_valid(c) && reference->is_valid(c);
            idrep.valid[static_cast<std::size_t>(c)] = ok ? 1 : 0;
            if (!ok) continue;
            for (int a = 0; a < d; ++a) {
                idrep.lhs[static_cast<std::size_t>(c * d + a)] = recon.at(c, a);
                idrep.rhs[static_cast<std::size_t>(c * d + a)] = reference->at(c, a);
                idrep.residual[static_cast<std::size_t>(c * d + a)] =
                    recon.at(c, a) - reference->at(c, a);
            }
        }
        finish_report(idrep, f_small.values, small);
        rep.identity = std::move(idrep);
    }
    return rep;
}

} // namespace kinchain
