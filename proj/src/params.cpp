#include "kinchain/params.hpp"

#include <cmath>

namespace kinchain {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::operator()(double x) const {
    double acc = 0.0;
    for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * x + coeffs_[k];
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return Polynomial{};
    std::vector<double> out(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k)
        out[k - 1] = static_cast<double>(k) * coeffs_[k];
    return Polynomial(std::move(out));
}

Polynomial Polynomial::derivative(int times) const {
    Polynomial p = *this;
    for (int i = 0; i < times; ++i) p = p.derivative();
    return p;
}

int Polynomial::degree() const { return static_cast<int>(coeffs_.size()) - 1; }

double PhysicalParams::sigma_x() const {
    if (hbar <= 0.0)
        throw ConfigError("sigma_x undefined at hbar <= 0");
    return std::sqrt(hbar / (2.0 * mass * omega));
}

void PhysicalParams::validate() const {
    if (!(mass > 0.0)) throw ConfigError("mass must be positive");
    if (hbar < 0.0) throw ConfigError("hbar must be >= 0");
    if (!(omega > 0.0)) throw ConfigError("omega must be positive");
}

PhysicalParams PhysicalParams::harmonic(double mass, double hbar, double omega) {
    PhysicalParams p;
    p.mass = mass;
    p.hbar = hbar;
    p.omega = omega;
    p.potential = Polynomial({0.0, 0.0, 0.5 * mass * omega * omega});
    p.validate();
    return p;
}

} // namespace kinchain
