#pragma once

#include "kinchain/errors.hpp"

#include <vector>

namespace kinchain {

// Single-variable polynomial, coeffs[k] multiplies x^k.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<double> coeffs);

    double operator()(double x) const;
    Polynomial derivative() const;
    Polynomial derivative(int times) const;
    int degree() const; // -1 for the zero polynomial
    bool is_zero() const { return degree() < 0; }
    const std::vector<double>& coeffs() const { return coeffs_; }

private:
    std::vector<double> coeffs_;
};

// Mass, Planck constant, external potential and the oscillator convenience
// frequency; alpha/beta are the derived constants of the closure series.
struct PhysicalParams {
    double mass = 1.0;
    double hbar = 1.0;
    Polynomial potential; // U(x)
    double omega = 1.0;

    double alpha() const { return -hbar / (2.0 * mass); }
    double beta() const { return 1.0 / hbar; }

    double sigma_x() const; // sqrt(hbar / (2 m omega))
    double sigma_v() const { return omega * sigma_x(); }
    double sigma_a() const { return omega * sigma_v(); }

    void validate() const;

    static PhysicalParams harmonic(double mass, double hbar, double omega);
};

} // namespace kinchain
