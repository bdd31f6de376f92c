#pragma once

#include "kinchain/field.hpp"
#include "kinchain/params.hpp"

#include <functional>
#include <memory>

namespace kinchain {

// A closure supplies the highest mean kinematical value a chain equation
// needs.  `evaluate` returns that mean on the grid of the conditioning field
// (base set == f.set); steppers re-evaluate it at stage midpoints.
class Closure {
public:
    virtual ~Closure() = default;
    virtual int supplied_order() const = 0;
    virtual MeanField evaluate(const DistributionField& f, double time) const = 0;
};

// Truncated series closure for <a>_{1,2} on a position-velocity field:
//   sum_k (-1)^{k+1} (hbar/2)^{2k} / (m^{2k+1} (2k+1)!) U^(2k+1)(x)
//         * (1/f) d^{2k} f / dv^{2k}.
// Terms whose potential derivative vanishes identically are skipped, so any
// k_max at or above ceil((deg U - 1)/2) gives bitwise-identical output.
class MoyalClosure final : public Closure {
public:
    MoyalClosure(PhysicalParams params, int k_max);
    int supplied_order() const override { return 3; }
    MeanField evaluate(const DistributionField& f, double time) const override;

private:
    PhysicalParams params_;
    int k_max_;
};

// Deterministic map closure: the top value is a function of the lower
// coordinates (the delta factor is never gridded).
class ColdClosure final : public Closure {
public:
    using Map = std::function<double(std::span<const double> coords, int comp)>;
    ColdClosure(int supplied_order, Map map);
    int supplied_order() const override { return order_; }
    MeanField evaluate(const DistributionField& f, double time) const override;

private:
    int order_;
    Map map_;
};

// Fixed tabulated mean field; the grid must match the conditioning field.
class TabulatedClosure final : public Closure {
public:
    explicit TabulatedClosure(MeanField mf);
    int supplied_order() const override { return mf_.order; }
    MeanField evaluate(const DistributionField& f, double time) const override;

private:
    MeanField mf_;
};

// Time-dependent analytic closure, used mainly by tests and benchmarks.
class AnalyticClosure final : public Closure {
public:
    using Fn = std::function<double(std::span<const double> coords, int comp, double t)>;
    AnalyticClosure(int supplied_order, Fn fn);
    int supplied_order() const override { return order_; }
    MeanField evaluate(const DistributionField& f, double time) const override;

private:
    int order_;
    Fn fn_;
};

// Zero mean value of the given order.
class ZeroClosure final : public Closure {
public:
    explicit ZeroClosure(int supplied_order) : order_(supplied_order) {}
    int supplied_order() const override { return order_; }
    MeanField evaluate(const DistributionField& f, double time) const override;

private:
    int order_;
};

} // namespace kinchain
