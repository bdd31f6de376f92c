#include <doctest.h>

#include "kinchain/advect.hpp"
#include "kinchain/analytic.hpp"
#include "kinchain/extensive.hpp"
#include "oracles.hpp"

using namespace kinchain;

namespace {

DistributionField bump1d(int points, double box, int order = 1) {
    AxisSpec spec[1] = {{order, -box, box, points, 1}};
    return sample_field(KinematicIndexSet{order}, make_grid(spec),
                        [&](std::span<const double> c) {
                            double r = c[0] / (0.3 * box);
                            if (std::abs(r) >= 1.0) return 0.0;
                            double w = std::cos(0.5 * M_PI * r);
                            return w * w * w * w;
                        });
}

} // namespace

TEST_CASE("zero advection is the exact identity") {
    DistributionField f = bump1d(64, 4.0);
    MeanField zero = sample_mean_field(2, f.set, f.axes, 1,
                                       [](std::span<const double>, int) { return 0.0; });
    DistributionField g = step_rank1(f, zero, 0.05);
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(g.values[i] == f.values[i]);
}

TEST_CASE("constant velocity translates; integer-cell shifts are exact") {
    DistributionField f = bump1d(128, 4.0);
    GridLayout lay = f.layout();
    double h = lay.dims[0].h;

    // displacement of exactly two cells reproduces shifted node values
    double c = 1.0, dt = 2.0 * h / c;
    MeanField vel = sample_mean_field(2, f.set, f.axes, 1,
                                      [&](std::span<const double>, int) { return c; });
    DistributionField g = step_rank1(f, vel, dt);
    for (std::int64_t i = 2; i < lay.size; ++i)
        CHECK(g.values[static_cast<std::size_t>(i)] ==
              doctest::Approx(f.values[static_cast<std::size_t>(i - 2)]).epsilon(1e-14));

    // fractional shift against the analytic translate, cubic accuracy
    double dt2 = 0.37 * h / c;
    DistributionField g2 = step_rank1(f, vel, dt2);
    double err = 0.0;
    for (std::int64_t i = 0; i < lay.size; ++i) {
        double x = lay.coord_at(0, i) - c * dt2;
        double r = x / (0.3 * 4.0);
        double exact = 0.0;
        if (std::abs(r) < 1.0) {
            double w = std::cos(0.5 * M_PI * r);
            exact = w * w * w * w;
        }
        err = std::max(err, std::abs(g2.values[static_cast<std::size_t>(i)] - exact));
    }
    CHECK(err < 5e-5);

    // mass is preserved over many steps of compactly supported transport
    DistributionField cur = bump1d(256, 8.0);
    MeanField slow = sample_mean_field(2, cur.set, cur.axes, 1,
                                       [](std::span<const double>, int) { return 0.11; });
    double mass0 = f0(cur);
    double dts = 0.01;
    for (int s = 0; s < 1000; ++s) cur = step_rank1(cur, slow, dts);
    CHECK(std::abs(f0(cur) - mass0) <= 1e-6 * std::abs(mass0));
    CHECK(cur.time == doctest::Approx(10.0));
}

TEST_CASE("compressive sweep follows the self-similar contraction") {
    // df/dt + d(-nu v f)/dv = 0 : f(v,t) = f0(v e^{nu t}) e^{nu t}
    const double nu = 0.4;
    DistributionField f = bump1d(257, 4.0, 2);
    MeanField drag = sample_mean_field(3, f.set, f.axes, 1,
                                       [&](std::span<const double> c, int) { return -nu * c[0]; });
    double dt = 0.02;
    DistributionField g = f;
    for (int s = 0; s < 10; ++s) g = step_rank1(g, drag, dt);
    double t = 10 * dt;
    GridLayout lay = f.layout();
    double err = 0.0;
    for (std::int64_t i = 0; i < lay.size; ++i) {
        double v = lay.coord_at(0, i) * std::exp(nu * t);
        double r = v / (0.3 * 4.0);
        double exact = 0.0;
        if (std::abs(r) < 1.0) {
            double w = std::cos(0.5 * M_PI * r);
            exact = w * w * w * w;
        }
        exact *= std::exp(nu * t);
        err = std::max(err, std::abs(g.values[static_cast<std::size_t>(i)] - exact));
    }
    CHECK(err < 2e-3);
    // mass stays conserved by the compressibility factor
    CHECK(f0(g) == doctest::Approx(f0(f)).epsilon(1e-5));
}

TEST_CASE("displacement guard trips on oversized steps") {
    DistributionField f = bump1d(64, 1.0);
    MeanField fast = sample_mean_field(2, f.set, f.axes, 1,
                                       [](std::span<const double>, int) { return 10.0; });
    CHECK_THROWS_AS(step_rank1(f, fast, 0.2), NumericalGuardError);
}

TEST_CASE("rank-2 first group: harmonic rotation returns and conserves mass") {
    PhysicalParams p = PhysicalParams::harmonic(1.0, 1.0, 1.3);
    MoyalClosure closure(p, 1);
    std::vector<AxisGrid> axes = oscillator_axes(p, 128, 10.0);
    oracle::CoherentState state{p.omega, p.sigma_x(), 0.9, -0.5};
    DistributionField f = state.sample(axes, 0.0);

    const double T = 2.0 * M_PI / p.omega;
    const int steps = 400;
    DistributionField cur = f;
    double mass0 = f0(cur);
    for (int s = 0; s < steps; ++s) cur = step_rank2_first_group(cur, closure, T / steps);
    CHECK(std::abs(f0(cur) - mass0) <= 1e-6 * std::abs(mass0));

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        num += (cur.values[i] - f.values[i]) * (cur.values[i] - f.values[i]);
        den += f.values[i] * f.values[i];
    }
    CHECK(std::sqrt(num / den) < 1e-2);
}

TEST_CASE("zero closure streams freely") {
    // with no force the {1,2} equation is free streaming:
    // f(x, v, t) = f0(x - v t, v)
    AxisSpec specs[2] = {{1, -6, 6, 129, 1}, {2, -3, 3, 65, 1}};
    DistributionField f = sample_field(KinematicIndexSet{1, 2}, make_grid(specs),
                                       [](std::span<const double> c) {
                                           return std::exp(-2.0 * c[0] * c[0] -
                                                           0.5 * c[1] * c[1]);
                                       });
    ZeroClosure closure(3);
    const double dt = 0.05;
    const int steps = 8;
    DistributionField cur = f;
    for (int s = 0; s < steps; ++s) cur = step_rank2_first_group(cur, closure, dt);
    GridLayout lay = f.layout();
    double t = steps * dt, err = 0.0;
    for (std::int64_t i = 0; i < lay.size; ++i) {
        double x = lay.coord_at(0, i) - t * lay.coord_at(1, i);
        double v = lay.coord_at(1, i);
        double exact = std::exp(-2.0 * x * x - 0.5 * v * v);
        err = std::max(err, std::abs(cur.values[static_cast<std::size_t>(i)] - exact));
    }
    CHECK(err < 2e-3); // cubic-interpolation accuracy at this resolution
    CHECK_THROWS_AS(step_rank2_first_group(f, ZeroClosure(5), dt), DomainError);
}

TEST_CASE("splitting error is third order per step") {
    PhysicalParams p = PhysicalParams::harmonic(1.0, 1.0, 1.0);
    MoyalClosure closure(p, 1);
    std::vector<AxisGrid> axes = oscillator_axes(p, 192, 10.0);
    oracle::CoherentState state{p.omega, p.sigma_x(), 1.0, 0.0};
    DistributionField f = state.sample(axes, 0.0);

    auto split_diff = [&](double dt) {
        DistributionField one = step_rank2_first_group(f, closure, dt);
        DistributionField two =
            step_rank2_first_group(step_rank2_first_group(f, closure, 0.5 * dt), closure, 0.5 * dt);
        double acc = 0.0;
        for (std::size_t i = 0; i < one.values.size(); ++i)
            acc = std::max(acc, std::abs(one.values[i] - two.values[i]));
        return acc;
    };
    double d1 = split_diff(0.3);
    double d2 = split_diff(0.15);
    CHECK(oracle::observed_order(d1, d2) >= 2.5); // local O(dt^3)
}

TEST_CASE("rank-2 second group: identity, translation, rotation mass drift") {
    AxisSpec specs[2] = {{1, -4, 4, 96, 1}, {3, -4, 4, 96, 1}};
    DistributionField f = sample_field(KinematicIndexSet{1, 3}, make_grid(specs),
                                       [](std::span<const double> c) {
                                           return std::exp(-(c[0] - 1.0) * (c[0] - 1.0) -
                                                           c[1] * c[1]);
                                       });
    MeanField zero_low = sample_mean_field(2, f.set, f.axes, 1,
                                           [](std::span<const double>, int) { return 0.0; });
    MeanField zero_high = sample_mean_field(4, f.set, f.axes, 1,
                                            [](std::span<const double>, int) { return 0.0; });
    DistributionField id = step_rank2_second_group(f, zero_low, zero_high, 0.1);
    for (std::size_t i = 0; i < f.values.size(); ++i) CHECK(id.values[i] == f.values[i]);

    // rigid translation by (a dt, b dt)
    const double a = 0.7, b = -0.4, dt = 0.05;
    MeanField ca = sample_mean_field(2, f.set, f.axes, 1,
                                     [&](std::span<const double>, int) { return a; });
    MeanField cb = sample_mean_field(4, f.set, f.axes, 1,
                                     [&](std::span<const double>, int) { return b; });
    DistributionField tr = step_rank2_second_group(f, ca, cb, dt);
    GridLayout lay = f.layout();
    double err = 0.0;
    for (std::int64_t i = 0; i < lay.size; ++i) {
        double x = lay.coord_at(0, i) - a * dt, y = lay.coord_at(1, i) - b * dt;
        double exact = std::exp(-(x - 1.0) * (x - 1.0) - y * y);
        err = std::max(err, std::abs(tr.values[static_cast<std::size_t>(i)] - exact));
    }
    CHECK(err < 1e-4);

    // tabulated rotation pair: mass drift < 1e-5 per period at 256^2
    AxisSpec sp256[2] = {{1, -6, 6, 256, 1}, {3, -6, 6, 256, 1}};
    DistributionField g = sample_field(KinematicIndexSet{1, 3}, make_grid(sp256),
                                       [](std::span<const double> c) {
                                           return std::exp(-(c[0] - 1.5) * (c[0] - 1.5) -
                                                           c[1] * c[1]);
                                       });
    MeanField u1 = sample_mean_field(2, g.set, g.axes, 1,
                                     [](std::span<const double> c, int) { return c[1]; });
    MeanField u2 = sample_mean_field(4, g.set, g.axes, 1,
                                     [](std::span<const double> c, int) { return -c[0]; });
    double mass0 = f0(g);
    const int steps = 251;
    DistributionField cur = g;
    for (int s = 0; s < steps; ++s)
        cur = step_rank2_second_group(cur, u1, u2, 2.0 * M_PI / steps);
    CHECK(std::abs(f0(cur) - mass0) <= 1e-5 * std::abs(mass0));

    CHECK_THROWS_AS(step_rank2_second_group(f, zero_low, zero_low, 0.1), DomainError);
}

TEST_CASE("rank-3 first group follows the exact linear flow") {
    // d/dt (x,v,a) = (v, a, -w^2 v): closure <xi^4> = -w^2 v
    const double w = 1.0;
    oracle::LinearFlowGaussian ref;
    ref.A = {{{0, 1, 0}, {0, 0, 1}, {0, -w * w, 0}}};
    ref.center = {0.6, 0.0, -0.3};
    ref.sigma = {0.9, 0.9, 0.9};

    AxisSpec specs[3] = {{1, -6, 6, 64, 1}, {2, -6, 6, 64, 1}, {3, -6, 6, 64, 1}};
    DistributionField f = ref.sample(KinematicIndexSet{1, 2, 3}, make_grid(specs), 0.0);
    AnalyticClosure closure(4, [&](std::span<const double> c, int, double) {
        return -w * w * c[1];
    });

    const double dt = 0.02;
    const int steps = 25;
    DistributionField cur = f;
    for (int s = 0; s < steps; ++s) cur = step_rank3_first_group(cur, closure, dt);
    DistributionField exact = ref.sample(KinematicIndexSet{1, 2, 3}, f.axes, steps * dt);

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < exact.values.size(); ++i) {
        num += (cur.values[i] - exact.values[i]) * (cur.values[i] - exact.values[i]);
        den += exact.values[i] * exact.values[i];
    }
    CHECK(std::sqrt(num / den) < 5e-3);
    CHECK(f0(cur) == doctest::Approx(f0(f)).epsilon(1e-6));
}

TEST_CASE("rank-3 zero closure decouples even top marginals at second order") {
    AxisSpec specs[3] = {{1, -5, 5, 48, 1}, {2, -5, 5, 48, 1}, {3, -3, 3, 33, 1}};
    DistributionField f3 = sample_field(
        KinematicIndexSet{1, 2, 3}, make_grid(specs), [](std::span<const double> c) {
            return std::exp(-0.5 * (c[0] * c[0] + (c[1] - 0.5) * (c[1] - 0.5)) - c[2] * c[2]);
        });
    ZeroClosure closure(4);

    auto marginal_gap = [&](double dt) {
        DistributionField g3 = step_rank3_first_group(f3, closure, dt);
        DistributionField m3 = marginalize(g3, KinematicIndexSet{3});

        DistributionField f2 = marginalize(f3, KinematicIndexSet{3});
        ZeroClosure c2(3);
        DistributionField g2 = step_rank2_first_group(f2, c2, dt);
        double acc = 0.0;
        for (std::size_t i = 0; i < m3.values.size(); ++i)
            acc = std::max(acc, std::abs(m3.values[i] - g2.values[i]));
        return acc;
    };
    double d1 = marginal_gap(0.2);
    double d2 = marginal_gap(0.1);
    CHECK(oracle::observed_order(d1, d2) >= 1.7); // coupling enters at O(dt^2)
}
