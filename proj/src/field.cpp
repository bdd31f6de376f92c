#include "kinchain/field.hpp"

#include <cmath>
#include <string>

namespace kinchain {

void DistributionField::validate() const {
    if (static_cast<int>(axes.size()) != set.rank())
        throw DomainError("field has " + std::to_string(axes.size()) + " axes for index set " +
                          set.to_string());
    for (int i = 0; i < set.rank(); ++i)
        if (axes[static_cast<std::size_t>(i)].order != set[i])
            throw DomainError("axis order mismatch at position " + std::to_string(i));
    for (std::size_t i = 1; i < axes.size(); ++i)
        if (axes[i].components() != axes[0].components())
            throw DomainError("component count must be uniform across axes");
    GridLayout lay = layout();
    if (lay.size != cells())
        throw DomainError("tensor extent " + std::to_string(values.size()) +
                          " does not match grid size " + std::to_string(lay.size));
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("non-finite value in distribution field");
}

DistributionField make_field(KinematicIndexSet set, std::vector<AxisGrid> axes,
                             std::vector<double> values, double time) {
    DistributionField f;
    f.set = std::move(set);
    f.axes = std::move(axes);
    f.values = std::move(values);
    f.time = time;
    f.validate();
    return f;
}

void MeanField::validate() const {
    // `order` may sit inside the base set: the average then degenerates to
    // the coordinate itself, which the k = 1 chain degenerations rely on.
    if (static_cast<int>(axes.size()) != base.rank())
        throw DomainError("mean field axes do not match base set " + base.to_string());
    GridLayout lay = layout();
    if (static_cast<std::int64_t>(valid.size()) != lay.size ||
        static_cast<std::int64_t>(values.size()) != lay.size * components)
        throw DomainError("mean field extent mismatch");
    for (std::int64_t c = 0; c < lay.size; ++c)
        if (valid[static_cast<std::size_t>(c)])
            for (int k = 0; k < components; ++k)
                if (!std::isfinite(at(c, k)))
                    throw DomainError("non-finite mean value on an unmasked cell");
}

MeanField make_mean_field(int order, KinematicIndexSet base, std::vector<AxisGrid> axes,
                          int components, std::vector<double> values,
                          std::vector<std::uint8_t> valid, double time) {
    MeanField m;
    m.order = order;
    m.base = std::move(base);
    m.axes = std::move(axes);
    m.components = components;
    m.values = std::move(values);
    m.valid = std::move(valid);
    m.time = time;
    m.validate();
    return m;
}

void require_same_grid(const std::vector<AxisGrid>& a, const std::vector<AxisGrid>& b) {
    if (a != b) throw DomainError("grid mismatch between operands");
}

void require_same_grid(const DistributionField& a, const DistributionField& b) {
    if (a.set != b.set) throw DomainError("index set mismatch between fields");
    require_same_grid(a.axes, b.axes);
}

DistributionField midpoint(const DistributionField& a, const DistributionField& b) {
    require_same_grid(a, b);
    DistributionField out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = 0.5 * (a.values[i] + b.values[i]);
    out.time = 0.5 * (a.time + b.time);
    return out;
}

MeanField midpoint(const MeanField& a, const MeanField& b) {
    if (a.base != b.base || a.order != b.order || a.components != b.components)
        throw DomainError("mean field mismatch in midpoint");
    require_same_grid(a.axes, b.axes);
    MeanField out = a;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = 0.5 * (a.values[i] + b.values[i]);
    for (std::size_t i = 0; i < out.valid.size(); ++i)
        out.valid[i] = static_cast<std::uint8_t>(a.valid[i] && b.valid[i]);
    out.time = 0.5 * (a.time + b.time);
    return out;
}

} // namespace kinchain
