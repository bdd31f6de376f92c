#pragma once

#include "kinchain/grid.hpp"
#include "kinchain/index_set.hpp"

#include <cstdint>
#include <vector>

namespace kinchain {

// Relative threshold below which a conditioning density counts as zero.
inline constexpr double kZeroMaskRel = 1e-14;

// Sampled distribution function f^{n_1..n_R} over a tensor grid.  Rank 0
// degenerates to a single scalar (f^0).  Values may be negative
// (quasi-probability fields); they must be finite.
struct DistributionField {
    KinematicIndexSet set;
    std::vector<AxisGrid> axes; // one per set entry, ascending order
    std::vector<double> values; // row-major per GridLayout
    double time = 0.0;

    GridLayout layout() const { return GridLayout::of(axes); }
    std::int64_t cells() const { return static_cast<std::int64_t>(values.size()); }
    int components() const { return axes.empty() ? 1 : axes.front().components(); }

    // Throws DomainError unless extents are consistent and values finite.
    void validate() const;
};

DistributionField make_field(KinematicIndexSet set, std::vector<AxisGrid> axes,
                             std::vector<double> values, double time = 0.0);

// Fills a field by evaluating `fn(coords)` at every node; coords are ordered
// like the scalar dims of the layout.
template <class Fn>
DistributionField sample_field(KinematicIndexSet set, std::vector<AxisGrid> axes, Fn&& fn,
                               double time = 0.0) {
    GridLayout layout = GridLayout::of(axes);
    std::vector<double> vals(static_cast<std::size_t>(layout.size));
    std::vector<double> coords(static_cast<std::size_t>(layout.ndims()));
    for (std::int64_t flat = 0; flat < layout.size; ++flat) {
        for (int d = 0; d < layout.ndims(); ++d)
            coords[static_cast<std::size_t>(d)] = layout.coord_at(d, flat);
        vals[static_cast<std::size_t>(flat)] = fn(std::span<const double>(coords));
    }
    return make_field(std::move(set), std::move(axes), std::move(vals), time);
}

// Mean kinematical value of order `order` over the base grid.  `values`
// holds `components` entries per base cell (component innermost);  `valid`
// is the per-cell conditioning mask (0 where the marginal density vanished).
struct MeanField {
    int order = 0;
    KinematicIndexSet base;
    std::vector<AxisGrid> axes;
    int components = 1;
    std::vector<double> values;
    std::vector<std::uint8_t> valid;
    double time = 0.0;

    GridLayout layout() const { return GridLayout::of(axes); }
    std::int64_t cells() const { return static_cast<std::int64_t>(valid.size()); }
    double at(std::int64_t cell, int comp) const {
        return values[static_cast<std::size_t>(cell * components + comp)];
    }
    bool is_valid(std::int64_t cell) const { return valid[static_cast<std::size_t>(cell)] != 0; }

    void validate() const;
};

MeanField make_mean_field(int order, KinematicIndexSet base, std::vector<AxisGrid> axes,
                          int components, std::vector<double> values,
                          std::vector<std::uint8_t> valid, double time = 0.0);

// Constant-valid mean field sampled from `fn(coords, comp)`.
template <class Fn>
MeanField sample_mean_field(int order, KinematicIndexSet base, std::vector<AxisGrid> axes,
                            int components, Fn&& fn, double time = 0.0) {
    GridLayout layout = GridLayout::of(axes);
    std::vector<double> vals(static_cast<std::size_t>(layout.size * components));
    std::vector<double> coords(static_cast<std::size_t>(layout.ndims()));
    for (std::int64_t flat = 0; flat < layout.size; ++flat) {
        for (int d = 0; d < layout.ndims(); ++d)
            coords[static_cast<std::size_t>(d)] = layout.coord_at(d, flat);
        for (int c = 0; c < components; ++c)
            vals[static_cast<std::size_t>(flat * components + c)] =
                fn(std::span<const double>(coords), c);
    }
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(layout.size), 1);
    return make_mean_field(order, std::move(base), std::move(axes), components, std::move(vals),
                           std::move(valid), time);
}

// Elementwise midpoint of a field pair on identical grids.
DistributionField midpoint(const DistributionField& a, const DistributionField& b);
MeanField midpoint(const MeanField& a, const MeanField& b);

void require_same_grid(const DistributionField& a, const DistributionField& b);
void require_same_grid(const std::vector<AxisGrid>& a, const std::vector<AxisGrid>& b);

} // namespace kinchain
