#include <doctest.h>

#include "kinchain/closure.hpp"
#include "oracles.hpp"

#include <random>

using namespace kinchain;

namespace {

DistributionField smooth_positive_12(int points = 65, double box = 4.0) {
    AxisSpec specs[2] = {{1, -box, box, points, 1}, {2, -box, box, points, 1}};
    return sample_field(KinematicIndexSet{1, 2}, make_grid(specs),
                        [](std::span<const double> c) {
                            double x = c[0], v = c[1];
                            double w = 1.0 + 0.3 * std::sin(0.7 * x);
                            return std::exp(-0.5 * (x * x + v * v * w));
                        });
}

} // namespace

TEST_CASE("harmonic potential truncates the series at the classical force") {
    PhysicalParams p = PhysicalParams::harmonic(1.3, 0.8, 2.0);
    DistributionField f = smooth_positive_12();
    GridLayout lay = f.layout();

    MeanField k0 = MoyalClosure(p, 0).evaluate(f, 0.0);
    MeanField k1 = MoyalClosure(p, 1).evaluate(f, 0.0);
    MeanField k5 = MoyalClosure(p, 5).evaluate(f, 0.0);
    double scale = p.omega * p.omega * 4.0;
    for (std::int64_t c = 0; c < k0.cells(); ++c) {
        double x = lay.coord_at(0, c);
        CHECK(std::abs(k0.at(c, 0) + p.omega * p.omega * x) <= 1e-14 * scale);
        CHECK(k0.at(c, 0) == k1.at(c, 0)); // bitwise truncation
        CHECK(k0.at(c, 0) == k5.at(c, 0));
    }
}

TEST_CASE("constant potential gives a zero mean acceleration") {
    PhysicalParams p;
    p.potential = Polynomial({3.0});
    DistributionField f = smooth_positive_12(33);
    MeanField m = MoyalClosure(p, 4).evaluate(f, 0.0);
    for (double v : m.values) CHECK(v == 0.0);
}

TEST_CASE("quartic potential: first correction matches the symbolic series") {
    const double c4 = 0.35, mass = 1.2, hbar = 0.9;
    PhysicalParams p;
    p.mass = mass;
    p.hbar = hbar;
    p.potential = Polynomial({0, 0, 0, 0, c4});

    // smooth synthetic f with an analytic second v-derivative
    const double box = 4.0;
    const int points = 161;
    AxisSpec specs[2] = {{1, -box, box, points, 1}, {2, -box, box, points, 1}};
    auto fval = [](double x, double v) { return std::exp(-0.5 * (x * x + v * v)); };
    DistributionField f =
        sample_field(KinematicIndexSet{1, 2}, make_grid(specs),
                     [&](std::span<const double> c) { return fval(c[0], c[1]); });
    GridLayout lay = f.layout();

    MeanField m = MoyalClosure(p, 3).evaluate(f, 0.0);
    // the implementation differentiates f by 2nd-order stencils: O(h^2) bound
    double h = lay.dims[1].h;
    double tol_abs = 2.0 * h * h;
    for (std::int64_t c = 0; c < m.cells(); ++c) {
        double x = lay.coord_at(0, c), v = lay.coord_at(1, c);
        if (std::abs(x) > 2.0 || std::abs(v) > 2.0) continue; // interior, f not tiny
        REQUIRE(m.is_valid(c));
        double d2f_over_f = v * v - 1.0; // (1/f) d2 f / dv2 for the Gaussian
        double expected = -4.0 * c4 * x * x * x / mass +
                          hbar * hbar * c4 * x / (mass * mass * mass) * d2f_over_f;
        CHECK(std::abs(m.at(c, 0) - expected) <= tol_abs + 1e-12 * std::abs(expected));
    }

    // degree 4: k >= 2 contributes nothing, bitwise
    MeanField k2 = MoyalClosure(p, 2).evaluate(f, 0.0);
    MeanField k9 = MoyalClosure(p, 9).evaluate(f, 0.0);
    MeanField k1 = MoyalClosure(p, 1).evaluate(f, 0.0);
    for (std::size_t i = 0; i < k2.values.size(); ++i) {
        CHECK(k2.values[i] == k9.values[i]);
        CHECK(k2.values[i] == k1.values[i]);
    }
}

TEST_CASE("closure guards") {
    PhysicalParams p = PhysicalParams::harmonic(1.0, 1.0, 1.0);
    CHECK_THROWS_AS(MoyalClosure(p, -1), ConfigError);

    PhysicalParams classical;
    classical.hbar = 0.0;
    classical.potential = Polynomial({0, 0, 0, 0, 1.0}); // quartic needs hbar > 0
    CHECK_THROWS_AS(MoyalClosure(classical, 3), ConfigError);

    PhysicalParams classical_quad;
    classical_quad.hbar = 0.0;
    classical_quad.potential = Polynomial({0, 0, 0.5});
    CHECK_NOTHROW(MoyalClosure(classical_quad, 3)); // classical force only

    DistributionField f = smooth_positive_12(17);
    DistributionField f3 = f;
    f3.set = KinematicIndexSet{1, 3};
    f3.axes[1].order = 3;
    CHECK_THROWS_AS(MoyalClosure(p, 1).evaluate(f3, 0.0), DomainError);
}

TEST_CASE("zero cells are masked where a quantum correction is needed") {
    PhysicalParams p;
    p.hbar = 1.0;
    p.potential = Polynomial({0, 0, 0, 0, 0.5}); // quartic, k=1 term active
    AxisSpec specs[2] = {{1, -3, 3, 41, 1}, {2, -3, 3, 41, 1}};
    DistributionField f = sample_field(KinematicIndexSet{1, 2}, make_grid(specs),
                                       [](std::span<const double> c) {
                                           if (std::abs(c[1]) < 0.5) return 0.0;
                                           return std::exp(-c[0] * c[0] - c[1] * c[1]);
                                       });
    MeanField m = MoyalClosure(p, 2).evaluate(f, 0.0);
    bool saw_masked = false;
    for (std::int64_t c = 0; c < m.cells(); ++c)
        if (!m.is_valid(c)) saw_masked = true;
    CHECK(saw_masked);
}

TEST_CASE("tabulated, cold, analytic and zero closures") {
    DistributionField f = smooth_positive_12(21);
    MeanField table = sample_mean_field(3, f.set, f.axes, 1,
                                        [](std::span<const double> c, int) { return c[0] + c[1]; });
    MeanField got = TabulatedClosure(table).evaluate(f, 1.5);
    CHECK(got.time == 1.5);
    for (std::size_t i = 0; i < table.values.size(); ++i) CHECK(got.values[i] == table.values[i]);

    ColdClosure cold(3, [](std::span<const double> c, int) { return -2.0 * c[0]; });
    MeanField cm = cold.evaluate(f, 0.0);
    GridLayout lay = f.layout();
    for (std::int64_t c = 0; c < cm.cells(); ++c)
        CHECK(cm.at(c, 0) == -2.0 * lay.coord_at(0, c));

    MeanField z = ZeroClosure(3).evaluate(f, 0.0);
    for (double v : z.values) CHECK(v == 0.0);

    AnalyticClosure an(3, [](std::span<const double> c, int, double t) { return c[1] * t; });
    MeanField am = an.evaluate(f, 2.0);
    for (std::int64_t c = 0; c < am.cells(); ++c)
        CHECK(am.at(c, 0) == doctest::Approx(2.0 * lay.coord_at(1, c)));
}
