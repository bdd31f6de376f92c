#include "kinchain/closure.hpp"

#include "kinchain/stencil.hpp"

#include <cmath>

namespace kinchain {

MoyalClosure::MoyalClosure(PhysicalParams params, int k_max)
    : params_(std::move(params)), k_max_(k_max) {
    params_.validate();
    if (k_max_ < 0) throw ConfigError("Moyal closure needs k_max >= 0");
    if (params_.hbar == 0.0 && params_.potential.derivative(3).degree() >= 0)
        throw ConfigError("Moyal corrections beyond the classical force need hbar > 0");
}

MeanField MoyalClosure::evaluate(const DistributionField& f, double time) const {
    if (!(f.set == KinematicIndexSet{1, 2}))
        throw DomainError("Moyal closure conditions on a rank-2 field over {1,2}, got " +
                          f.set.to_string());
    if (f.components() != 1)
        throw DomainError("Moyal closure is implemented for one component per order");

    GridLayout layout = f.layout();
    const int x_dim = 0, v_dim = 1;
    std::vector<double> xcoord = coordinate_field(layout, x_dim);

    std::int64_t n = layout.size;
    std::vector<double> vals(static_cast<std::size_t>(n), 0.0);
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(n), 1);

    double max_abs = 0.0;
    for (double v : f.values) max_abs = std::max(max_abs, std::abs(v));
    double thr = kZeroMaskRel * max_abs;

    const double m = params_.mass;
    std::vector<double> dv(f.values.begin(), f.values.end()); // d^{2k} f / dv^{2k}
    std::vector<double> tmp(static_cast<std::size_t>(n));
    double factorial = 1.0; // (2k+1)!
    double hbar_pow = 1.0;  // (hbar/2)^{2k}
    double m_pow = m;       // m^{2k+1}

    for (int k = 0; k <= k_max_; ++k) {
        Polynomial u_der = params_.potential.derivative(2 * k + 1);
        if (u_der.is_zero()) break; // higher derivatives vanish identically
        if (k > 0) {
            second_derivative_dim(dv, 1, 0, layout, v_dim, tmp);
            dv.swap(tmp);
            factorial *= static_cast<double>(2 * k) * static_cast<double>(2 * k + 1);
            hbar_pow *= 0.25 * params_.hbar * params_.hbar;
            m_pow *= m * m;
        }
        double sign = (k % 2 == 0) ? -1.0 : 1.0; // (-1)^{k+1}
        double coeff = sign * hbar_pow / (m_pow * factorial);
        for (std::int64_t i = 0; i < n; ++i) {
            double term;
            if (k == 0) {
                term = coeff * u_der(xcoord[static_cast<std::size_t>(i)]);
            } else {
                double fi = f.values[static_cast<std::size_t>(i)];
                if (std::abs(fi) < thr) {
                    valid[static_cast<std::size_t>(i)] = 0;
                    continue;
                }
                term = coeff * u_der(xcoord[static_cast<std::size_t>(i)]) *
                       dv[static_cast<std::size_t>(i)] / fi;
            }
            vals[static_cast<std::size_t>(i)] += term;
        }
    }
    for (std::int64_t i = 0; i < n; ++i)
        if (!valid[static_cast<std::size_t>(i)]) vals[static_cast<std::size_t>(i)] = 0.0;
    return make_mean_field(3, f.set, f.axes, 1, std::move(vals), std::move(valid), time);
}

ColdClosure::ColdClosure(int supplied_order, Map map) : order_(supplied_order), map_(std::move(map)) {
    if (order_ < 1) throw ConfigError("closure order must be >= 1");
}

MeanField ColdClosure::evaluate(const DistributionField& f, double time) const {
    GridLayout layout = f.layout();
    int d = f.components();
    std::vector<double> coords(static_cast<std::size_t>(layout.ndims()));
    std::vector<double> vals(static_cast<std::size_t>(layout.size * d));
    for (std::int64_t flat = 0; flat < layout.size; ++flat) {
        for (int dd = 0; dd < layout.ndims(); ++dd)
            coords[static_cast<std::size_t>(dd)] = layout.coord_at(dd, flat);
        for (int c = 0; c < d; ++c)
            vals[static_cast<std::size_t>(flat * d + c)] =
                map_(std::span<const double>(coords), c);
    }
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(layout.size), 1);
    return make_mean_field(order_, f.set, f.axes, d, std::move(vals), std::move(valid), time);
}

TabulatedClosure::TabulatedClosure(MeanField mf) : mf_(std::move(mf)) {}

MeanField TabulatedClosure::evaluate(const DistributionField& f, double time) const {
    if (mf_.base != f.set)
        throw DomainError("tabulated closure base " + mf_.base.to_string() +
                          " does not match field set " + f.set.to_string());
    require_same_grid(mf_.axes, f.axes);
    MeanField out = mf_;
    out.time = time;
    return out;
}

AnalyticClosure::AnalyticClosure(int supplied_order, Fn fn)
    : order_(supplied_order), fn_(std::move(fn)) {}

MeanField AnalyticClosure::evaluate(const DistributionField& f, double time) const {
    GridLayout layout = f.layout();
    int d = f.components();
    std::vector<double> coords(static_cast<std::size_t>(layout.ndims()));
    std::vector<double> vals(static_cast<std::size_t>(layout.size * d));
    for (std::int64_t flat = 0; flat < layout.size; ++flat) {
        for (int dd = 0; dd < layout.ndims(); ++dd)
            coords[static_cast<std::size_t>(dd)] = layout.coord_at(dd, flat);
        for (int c = 0; c < d; ++c)
            vals[static_cast<std::size_t>(flat * d + c)] =
                fn_(std::span<const double>(coords), c, time);
    }
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(layout.size), 1);
    return make_mean_field(order_, f.set, f.axes, d, std::move(vals), std::move(valid), time);
}

MeanField ZeroClosure::evaluate(const DistributionField& f, double time) const {
    GridLayout layout = f.layout();
    int d = f.components();
    std::vector<double> vals(static_cast<std::size_t>(layout.size * d), 0.0);
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(layout.size), 1);
    return make_mean_field(order_, f.set, f.axes, d, std::move(vals), std::move(valid), time);
}

} // namespace kinchain
