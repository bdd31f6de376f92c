#include "kinchain/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kinchain {

AxisGrid make_axis(int order, double lo, double hi, int points, int components) {
    AxisSpec spec{order, lo, hi, points, components};
    return make_grid(std::span<const AxisSpec>(&spec, 1)).front();
}

std::vector<AxisGrid> make_grid(std::span<const AxisSpec> specs) {
    std::vector<AxisGrid> axes;
    axes.reserve(specs.size());
    for (const AxisSpec& s : specs) {
        if (s.order < 1 || s.order > kMaxAxisOrder)
            throw ConfigError("axis order must be in [1," + std::to_string(kMaxAxisOrder) +
                              "], got " + std::to_string(s.order));
        if (s.components < 1) throw ConfigError("axis components must be >= 1");
        if (s.points < 2)
            throw ConfigError("axis needs at least 2 points, got " + std::to_string(s.points));
        if (!(s.lo < s.hi))
            throw ConfigError("degenerate axis: min " + std::to_string(s.lo) +
                              " must be < max " + std::to_string(s.hi));
        AxisGrid ax;
        ax.order = s.order;
        ax.comps.assign(static_cast<std::size_t>(s.components),
                        AxisComponent{s.lo, s.hi, s.points});
        axes.push_back(std::move(ax));
    }
    std::sort(axes.begin(), axes.end(),
              [](const AxisGrid& a, const AxisGrid& b) { return a.order < b.order; });
    for (std::size_t i = 1; i < axes.size(); ++i)
        if (axes[i].order == axes[i - 1].order)
            throw ConfigError("duplicate axis order " + std::to_string(axes[i].order));
    return axes;
}

GridLayout GridLayout::of(std::span<const AxisGrid> axes) {
    GridLayout layout;
    for (std::size_t a = 0; a < axes.size(); ++a) {
        for (int c = 0; c < axes[a].components(); ++c) {
            const AxisComponent& comp = axes[a].comps[static_cast<std::size_t>(c)];
            layout.dims.push_back(ScalarDim{static_cast<int>(a), c, comp.lo, comp.hi,
                                            comp.spacing(), comp.points});
        }
    }
    layout.strides.assign(layout.dims.size(), 1);
    for (int d = static_cast<int>(layout.dims.size()) - 2; d >= 0; --d)
        layout.strides[static_cast<std::size_t>(d)] =
            layout.strides[static_cast<std::size_t>(d) + 1] *
            layout.dims[static_cast<std::size_t>(d) + 1].n;
    layout.size = 1;
    for (const ScalarDim& dim : layout.dims) layout.size *= dim.n;
    return layout;
}

namespace {
double pairwise_rec(const double* v, std::size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_rec(v, half) + pairwise_rec(v + half, n - half);
}
} // namespace

double pairwise_sum(std::span<const double> v) { return pairwise_rec(v.data(), v.size()); }

std::vector<double> coordinate_field(const GridLayout& layout, int dim) {
    std::vector<double> out(static_cast<std::size_t>(layout.size));
    for (std::int64_t flat = 0; flat < layout.size; ++flat)
        out[static_cast<std::size_t>(flat)] = layout.coord_at(dim, flat);
    return out;
}

double node_weight(const GridLayout& layout, std::int64_t flat) {
    double w = 1.0;
    for (int d = 0; d < layout.ndims(); ++d)
        w *= layout.dims[static_cast<std::size_t>(d)].weight(layout.index_along(d, flat));
    return w;
}

std::vector<int> dims_of_axis(const GridLayout& layout, int axis) {
    std::vector<int> out;
    for (int d = 0; d < layout.ndims(); ++d)
        if (layout.dims[static_cast<std::size_t>(d)].axis == axis) out.push_back(d);
    return out;
}

} // namespace kinchain
