#include <doctest.h>

#include "kinchain/analytic.hpp"
#include "kinchain/chain.hpp"
#include "kinchain/closure.hpp"
#include "oracles.hpp"

using namespace kinchain;

TEST_CASE("entropy field: values, signs, masks") {
    AxisSpec spec[1] = {{1, -1, 1, 17, 1}};
    DistributionField f = sample_field(KinematicIndexSet{1}, make_grid(spec),
                                       [](std::span<const double>) { return std::exp(1.0); });
    EntropyField s = entropy_field(f);
    for (std::size_t i = 0; i < s.log_abs.size(); ++i) {
        CHECK(s.log_abs[i] == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(s.sign_mask[i] == 1);
    }

    // zero cells are masked with sign 0
    DistributionField g = f;
    g.values[3] = 0.0;
    EntropyField sg = entropy_field(g);
    CHECK(sg.sign_mask[3] == 0);
    CHECK(sg.log_abs[3] == 0.0);

    // first excited oscillator state: negative exactly where L1 argument < 1
    PhysicalParams p = PhysicalParams::harmonic(1.0, 1.0, 1.0);
    DistributionField wig = wigner_oscillator(1, p, oscillator_axes(p, 64));
    GridLayout lay = wig.layout();
    EntropyField sw = entropy_field(wig);
    const double scale = 2.0 * p.mass / (p.hbar * p.omega);
    for (std::int64_t i = 0; i < lay.size; ++i) {
        if (sw.sign_mask[static_cast<std::size_t>(i)] == 0) continue;
        double x = lay.coord_at(0, i), v = lay.coord_at(1, i);
        double z = scale * (v * v + p.omega * p.omega * x * x);
        CHECK(sw.sign_mask[static_cast<std::size_t>(i)] == (z < 1.0 ? -1 : 1));
    }
}

TEST_CASE("dissipation sources: exact zeros, linear drag, convergence") {
    PhysicalParams p = PhysicalParams::harmonic(1.0, 1.0, 1.0);
    DistributionField f = wigner_oscillator(0, p, oscillator_axes(p, 48));

    // harmonic closure has no v dependence: Q = 0 exactly
    MeanField moyal = MoyalClosure(p, 2).evaluate(f, 0.0);
    DissipationField q = dissipation_source(moyal, 2);
    for (double v : q.values) CHECK(std::abs(v) <= 1e-12);

    // linear drag on a rank-1 velocity grid: Q = -nu exactly
    AxisSpec vspec[1] = {{2, -3, 3, 21, 1}};
    DistributionField fv = sample_field(KinematicIndexSet{2}, make_grid(vspec),
                                        [](std::span<const double> c) {
                                            return std::exp(-c[0] * c[0]);
                                        });
    const double nu = 0.8;
    MeanField drag = sample_mean_field(3, fv.set, fv.axes, 1,
                                       [&](std::span<const double> c, int) { return -nu * c[0]; });
    DissipationField qd = dissipation_source(drag, 2);
    for (double v : qd.values) CHECK(v == doctest::Approx(-nu).epsilon(1e-14));
    CHECK_THROWS_AS(dissipation_source(drag, 3), DomainError);
    CHECK_THROWS_AS(dissipation_source(drag, 1), DomainError);

    // randomized smooth field: divergence converges at 2nd order
    auto div_error = [&](int points) {
        AxisSpec spec2[2] = {{1, -2, 2, points, 1}, {2, -2, 2, points, 1}};
        DistributionField base = sample_field(KinematicIndexSet{1, 2}, make_grid(spec2),
                                              [](std::span<const double>) { return 1.0; });
        MeanField mf = sample_mean_field(2, base.set, base.axes, 1,
                                         [](std::span<const double> c, int) {
                                             return std::sin(1.3 * c[0]) * std::cos(0.7 * c[1]);
                                         });
        DissipationField qq = dissipation_source(mf, 1);
        GridLayout lay = base.layout();
        double err = 0.0;
        for (std::int64_t i = 0; i < lay.size; ++i) {
            double x = lay.coord_at(0, i), v = lay.coord_at(1, i);
            double exact = 1.3 * std::cos(1.3 * x) * std::cos(0.7 * v);
            err = std::max(err, std::abs(qq.values[static_cast<std::size_t>(i)] - exact));
        }
        return err;
    };
    double e1 = div_error(33);
    double e2 = div_error(65);
    CHECK(oracle::observed_order(e1, e2) >= 1.9);
}

TEST_CASE("apply_pi basics") {
    AxisSpec spec[1] = {{1, -2, 2, 33, 1}};
    DistributionField phi = sample_field(KinematicIndexSet{1}, make_grid(spec),
                                         [](std::span<const double> c) { return c[0]; });
    MeanField zero = sample_mean_field(2, phi.set, phi.axes, 1,
                                       [](std::span<const double>, int) { return 0.0; });
    std::vector<PiTerm> none{PiTerm{1, zero}};
    PiResult r0 = apply_pi(phi, phi, 0.1, none);
    for (double v : r0.values) CHECK(v == 0.0);

    MeanField c2 = sample_mean_field(2, phi.set, phi.axes, 1,
                                     [](std::span<const double>, int) { return 2.5; });
    std::vector<PiTerm> adv{PiTerm{1, c2}};
    PiResult r1 = apply_pi(phi, phi, 0.1, adv);
    for (double v : r1.values) CHECK(v == doctest::Approx(2.5).epsilon(1e-13));

    CHECK_THROWS_AS(apply_pi(phi, phi, 0.0, adv), DomainError);
}

TEST_CASE("apply_pi reproduces the pressureless material derivative") {
    // u(x,t) = -w tan(wt) x solves u_t + u u_x = -w^2 x while it exists
    const double w = 1.2, t0 = 0.3, dt = 1e-3;
    AxisSpec spec[1] = {{1, -2, 2, 65, 1}};
    std::vector<AxisGrid> axes = make_grid(spec);
    auto u_at = [&](double t) {
        return sample_field(
            KinematicIndexSet{1}, axes,
            [&](std::span<const double> c) { return -w * std::tan(w * t) * c[0]; }, t);
    };
    DistributionField um = u_at(t0 - 0.5 * dt);
    DistributionField up = u_at(t0 + 0.5 * dt);
    DistributionField base = sample_field(KinematicIndexSet{1}, axes,
                                          [](std::span<const double>) { return 1.0; });
    MeanField u_mid = sample_mean_field(2, base.set, axes, 1, [&](std::span<const double> c, int) {
        return -w * std::tan(w * t0) * c[0];
    });
    std::vector<PiTerm> adv{PiTerm{1, u_mid}};
    PiResult pi = apply_pi(um, up, dt, adv);
    GridLayout lay = base.layout();
    for (std::int64_t i = 0; i < lay.size; ++i) {
        double x = lay.coord_at(0, i);
        CHECK(pi.values[static_cast<std::size_t>(i)] ==
              doctest::Approx(-w * w * x).epsilon(1e-5));
    }
}

TEST_CASE("logarithmic chain residual") {
    PhysicalParams p = PhysicalParams::harmonic(1.0, 1.0, 1.0);

    // stationary rank-1 marginal with <v>_1 = 0: both sides vanish
    DistributionField wig = wigner_oscillator(0, p, oscillator_axes(p, 64));
    DistributionField f1 = marginalize(wig, KinematicIndexSet{2});
    DistributionField f1b = f1;
    f1b.time = f1.time + 0.01;
    MeanField mv = mean_kinematic(wig, 2, {});
    DissipationField q = dissipation_source(mv, 1);
    std::vector<PiTerm> adv{PiTerm{1, mv}};
    std::vector<DissipationField> qs{q};
    LogChainResidual res = chain_log_residual(f1, f1b, adv, qs, 0.01);
    CHECK(res.norm <= 1e-10);
    CHECK(!res.mask_warning);

    // rotating coherent state under the harmonic closure: second-order decay
    oracle::CoherentState state{p.omega, p.sigma_x(), 1.1, 0.4};
    auto log_res_norm = [&](int points, double dt) {
        std::vector<AxisGrid> axes2 = oscillator_axes(p, points, 12.0);
        DistributionField fm = state.sample(axes2, -0.5 * dt);
        DistributionField fp = state.sample(axes2, 0.5 * dt);
        DistributionField fmid = midpoint(fm, fp);
        MeanField coord_v = coordinate_mean(fmid, 2);
        MeanField closure = MoyalClosure(p, 1).evaluate(fmid, 0.0);
        std::vector<PiTerm> terms{PiTerm{1, coord_v}, PiTerm{2, closure}};
        DissipationField qq = dissipation_source(closure, 2);
        std::vector<DissipationField> qv{qq};
        return chain_log_residual(fm, fp, terms, qv, dt).norm;
    };
    double e1 = log_res_norm(97, 0.02);
    double e2 = log_res_norm(193, 0.01);
    CHECK(oracle::observed_order(e1, e2) >= 1.8);

    // a sign-flipped dissipation source is visible at the |Q| scale
    const double nu = 0.5;
    AxisSpec vspec[1] = {{2, -4, 4, 65, 1}};
    DistributionField fv = sample_field(KinematicIndexSet{2}, make_grid(vspec),
                                        [](std::span<const double> c) {
                                            return std::exp(-0.5 * c[0] * c[0]);
                                        });
    MeanField drag = sample_mean_field(3, fv.set, fv.axes, 1,
                                       [&](std::span<const double> c, int) { return -nu * c[0]; });
    DissipationField q_ok = dissipation_source(drag, 2);
    DissipationField q_bad = q_ok;
    for (double& v : q_bad.values) v = -v;
    // consistent pair from the self-similar contraction
    const double dt = 1e-3;
    auto contract = [&](double t) {
        double s = std::exp(-nu * t);
        return sample_field(
            KinematicIndexSet{2}, fv.axes,
            [&](std::span<const double> c) {
                double y = c[0] / s;
                return std::exp(-0.5 * y * y) / s;
            },
            t);
    };
    DistributionField cm = contract(-0.5 * dt), cp = contract(0.5 * dt);
    std::vector<PiTerm> adv2{PiTerm{2, drag}};
    std::vector<DissipationField> good{q_ok}, bad{q_bad};
    double rn_good = chain_log_residual(cm, cp, adv2, good, dt).norm;
    double rn_bad = chain_log_residual(cm, cp, adv2, bad, dt).norm;
    CHECK(rn_good <= 1e-6);
    CHECK(rn_bad == doctest::Approx(2.0 * nu).epsilon(1e-3));

    // mask warning when most of the grid carries no usable log
    DistributionField sparse = fv;
    for (std::size_t i = 0; i < sparse.values.size(); ++i)
        if (i % 4 != 0) sparse.values[i] = 0.0;
    LogChainResidual warn = chain_log_residual(sparse, sparse, adv2, good, dt);
    CHECK(warn.mask_warning);
    CHECK(warn.mask_fraction > 0.5);
}
