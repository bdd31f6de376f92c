#pragma once

// Internal quadrature-reduction machinery shared by the library sources.

#include "kinchain/field.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace kinchain::detail {

// Precomputed offsets/weights of a reduced sub-grid, plus coordinates of any
// tracked reduced dims per entry.
struct SubgridTable {
    std::vector<std::int64_t> offsets;
    std::vector<double> weights;
    std::vector<std::vector<double>> coords;
};

inline SubgridTable subgrid_table(const GridLayout& src, std::span<const int> reduced_dims,
                                  std::span<const int> tracked_dims = {}) {
    SubgridTable table;
    std::int64_t count = 1;
    for (int d : reduced_dims) count *= src.dims[static_cast<std::size_t>(d)].n;
    table.offsets.reserve(static_cast<std::size_t>(count));
    table.weights.reserve(static_cast<std::size_t>(count));
    table.coords.assign(tracked_dims.size(), {});
    for (auto& c : table.coords) c.reserve(static_cast<std::size_t>(count));

    std::vector<std::int64_t> idx(reduced_dims.size(), 0);
    for (std::int64_t e = 0; e < count; ++e) {
        std::int64_t off = 0;
        double w = 1.0;
        for (std::size_t k = 0; k < reduced_dims.size(); ++k) {
            const ScalarDim& dim = src.dims[static_cast<std::size_t>(reduced_dims[k])];
            off += idx[k] * src.strides[static_cast<std::size_t>(reduced_dims[k])];
            w *= dim.weight(idx[k]);
        }
        table.offsets.push_back(off);
        table.weights.push_back(w);
        for (std::size_t t = 0; t < tracked_dims.size(); ++t) {
            const ScalarDim& dim = src.dims[static_cast<std::size_t>(tracked_dims[t])];
            std::int64_t i = 0;
            for (std::size_t k = 0; k < reduced_dims.size(); ++k)
                if (reduced_dims[k] == tracked_dims[t]) i = idx[k];
            table.coords[t].push_back(dim.coord(i));
        }
        for (int k = static_cast<int>(reduced_dims.size()) - 1; k >= 0; --k) {
            const ScalarDim& dim = src.dims[static_cast<std::size_t>(reduced_dims[k])];
            if (++idx[static_cast<std::size_t>(k)] < dim.n) break;
            idx[static_cast<std::size_t>(k)] = 0;
        }
    }
    return table;
}

// body(out_flat, src_base_offset) for every cell of the kept sub-grid.
template <class Body>
void for_each_kept(const GridLayout& src, std::span<const int> reduced_dims, Body body) {
    std::vector<int> kept;
    for (int d = 0; d < src.ndims(); ++d)
        if (std::find(reduced_dims.begin(), reduced_dims.end(), d) == reduced_dims.end())
            kept.push_back(d);
    std::int64_t out_size = 1;
    for (int d : kept) out_size *= src.dims[static_cast<std::size_t>(d)].n;

    std::vector<std::int64_t> idx(kept.size(), 0);
    for (std::int64_t out = 0; out < out_size; ++out) {
        std::int64_t base = 0;
        for (std::size_t k = 0; k < kept.size(); ++k)
            base += idx[k] * src.strides[static_cast<std::size_t>(kept[k])];
        body(out, base);
        for (int k = static_cast<int>(kept.size()) - 1; k >= 0; --k) {
            if (++idx[static_cast<std::size_t>(k)] <
                src.dims[static_cast<std::size_t>(kept[k])].n)
                break;
            idx[static_cast<std::size_t>(k)] = 0;
        }
    }
}

inline std::vector<int> reduced_dims_for(const GridLayout& layout, const KinematicIndexSet& set,
                                         const KinematicIndexSet& drop) {
    std::vector<int> out;
    for (int order : drop) {
        int axis = set.axis_of(order);
        for (int d : dims_of_axis(layout, axis)) out.push_back(d);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline std::vector<AxisGrid> kept_axes(std::span<const AxisGrid> axes,
                                       const KinematicIndexSet& drop) {
    std::vector<AxisGrid> out;
    for (const AxisGrid& ax : axes)
        if (!drop.contains(ax.order)) out.push_back(ax);
    return out;
}

inline double masked_threshold(std::span<const double> den) {
    double max_abs = 0.0;
    for (double v : den) max_abs = std::max(max_abs, std::abs(v));
    return kZeroMaskRel * max_abs;
}

} // namespace kinchain::detail
