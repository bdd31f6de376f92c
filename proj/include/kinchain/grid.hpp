#pragma once

#include "kinchain/errors.hpp"
#include "kinchain/index_set.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace kinchain {

// One scalar coordinate line: node-centered uniform grid, endpoints included.
// Nodes are placed by the endpoint blend, which makes mirrored nodes of a
// symmetric box exact negatives of each other.
struct AxisComponent {
    double lo = 0.0;
    double hi = 0.0;
    int points = 0;

    double spacing() const { return (hi - lo) / (points - 1); }
    double coord(std::int64_t i) const {
        double n1 = static_cast<double>(points - 1);
        return (lo * (n1 - static_cast<double>(i)) + hi * static_cast<double>(i)) / n1;
    }
    bool operator==(const AxisComponent&) const = default;
};

// The grid over one kinematic order; `comps` holds one line per component.
struct AxisGrid {
    int order = 0;
    std::vector<AxisComponent> comps;

    int components() const { return static_cast<int>(comps.size()); }
    bool operator==(const AxisGrid&) const = default;
};

struct AxisSpec {
    int order = 0;
    double lo = 0.0;
    double hi = 0.0;
    int points = 0;
    int components = 1;
};

// Validates bounds/counts and builds node-centered axes, sorted by order.
std::vector<AxisGrid> make_grid(std::span<const AxisSpec> specs);
AxisGrid make_axis(int order, double lo, double hi, int points, int components = 1);

// Flattened view of a tensor over a list of axes: row-major, axes by
// ascending kinematic order, components innermost within each axis.
struct ScalarDim {
    int axis = 0; // index into the axes vector
    int comp = 0; // component within that axis
    double lo = 0.0;
    double hi = 0.0;
    double h = 0.0;
    std::int64_t n = 0;

    double coord(std::int64_t i) const {
        double n1 = static_cast<double>(n - 1);
        return (lo * (n1 - static_cast<double>(i)) + hi * static_cast<double>(i)) / n1;
    }
    // Trapezoid weight of node i (endpoint nodes carry h/2).
    double weight(std::int64_t i) const { return (i == 0 || i == n - 1) ? 0.5 * h : h; }
};

struct GridLayout {
    std::vector<ScalarDim> dims;
    std::vector<std::int64_t> strides;
    std::int64_t size = 1;

    static GridLayout of(std::span<const AxisGrid> axes);

    int ndims() const { return static_cast<int>(dims.size()); }
    std::int64_t index_along(int dim, std::int64_t flat) const {
        return (flat / strides[static_cast<std::size_t>(dim)]) % dims[static_cast<std::size_t>(dim)].n;
    }
    double coord_at(int dim, std::int64_t flat) const {
        return dims[static_cast<std::size_t>(dim)].coord(index_along(dim, flat));
    }
};

// Deterministic pairwise (tree) sum; also used for reproducible reductions.
double pairwise_sum(std::span<const double> v);

// Samples the coordinate of one scalar dim over the whole grid.
std::vector<double> coordinate_field(const GridLayout& layout, int dim);

// Product trapezoid weight of the full grid node at `flat`.
double node_weight(const GridLayout& layout, std::int64_t flat);

// Scalar dims belonging to the axis at position `axis` in the axes list.
std::vector<int> dims_of_axis(const GridLayout& layout, int axis);

} // namespace kinchain
