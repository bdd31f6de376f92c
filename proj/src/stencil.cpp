#include "kinchain/stencil.hpp"

#include <cmath>

namespace kinchain {

namespace {
inline double elem(std::span<const double> x, std::int64_t flat, std::int64_t stride,
                   std::int64_t offset) {
    return x[static_cast<std::size_t>(flat * stride + offset)];
}
} // namespace

void differentiate_dim(std::span<const double> x, std::int64_t elem_stride,
                       std::int64_t elem_offset, const GridLayout& layout, int dim,
                       std::span<double> out) {
    const std::int64_t n = layout.dims[static_cast<std::size_t>(dim)].n;
    const std::int64_t s = layout.strides[static_cast<std::size_t>(dim)];
    const double h = layout.dims[static_cast<std::size_t>(dim)].h;
    for (std::int64_t flat = 0; flat < layout.size; ++flat) {
        std::int64_t i = layout.index_along(dim, flat);
        double d;
        if (n == 2) {
            std::int64_t lo = flat - i * s;
            d = (elem(x, lo + s, elem_stride, elem_offset) -
                 elem(x, lo, elem_stride, elem_offset)) /
                h;
        } else if (i == 0) {
            d = (-3.0 * elem(x, flat, elem_stride, elem_offset) +
                 4.0 * elem(x, flat + s, elem_stride, elem_offset) -
                 elem(x, flat + 2 * s, elem_stride, elem_offset)) /
                (2.0 * h);
        } else if (i == n - 1) {
            d = (3.0 * elem(x, flat, elem_stride, elem_offset) -
                 4.0 * elem(x, flat - s, elem_stride, elem_offset) +
                 elem(x, flat - 2 * s, elem_stride, elem_offset)) /
                (2.0 * h);
        } else {
            d = (elem(x, flat + s, elem_stride, elem_offset) -
                 elem(x, flat - s, elem_stride, elem_offset)) /
                (2.0 * h);
        }
        out[static_cast<std::size_t>(flat)] = d;
    }
}

void second_derivative_dim(std::span<const double> x, std::int64_t elem_stride,
                           std::int64_t elem_offset, const GridLayout& layout, int dim,
                           std::span<double> out) {
    const std::int64_t n = layout.dims[static_cast<std::size_t>(dim)].n;
    const std::int64_t s = layout.strides[static_cast<std::size_t>(dim)];
    const double h2 = layout.dims[static_cast<std::size_t>(dim)].h *
                      layout.dims[static_cast<std::size_t>(dim)].h;
    for (std::int64_t flat = 0; flat < layout.size; ++flat) {
        std::int64_t i = layout.index_along(dim, flat);
        double d;
        if (n < 4) {
            // too short for one-sided 2nd-order stencils; use what exists
            std::int64_t lo = flat - i * s;
            if (n == 2) {
                d = 0.0;
            } else {
                d = (elem(x, lo, elem_stride, elem_offset) -
                     2.0 * elem(x, lo + s, elem_stride, elem_offset) +
                     elem(x, lo + 2 * s, elem_stride, elem_offset)) /
                    h2;
            }
        } else if (i == 0) {
            d = (2.0 * elem(x, flat, elem_stride, elem_offset) -
                 5.0 * elem(x, flat + s, elem_stride, elem_offset) +
                 4.0 * elem(x, flat + 2 * s, elem_stride, elem_offset) -
                 elem(x, flat + 3 * s, elem_stride, elem_offset)) /
                h2;
        } else if (i == n - 1) {
            d = (2.0 * elem(x, flat, elem_stride, elem_offset) -
                 5.0 * elem(x, flat - s, elem_stride, elem_offset) +
                 4.0 * elem(x, flat - 2 * s, elem_stride, elem_offset) -
                 elem(x, flat - 3 * s, elem_stride, elem_offset)) /
                h2;
        } else {
            d = (elem(x, flat + s, elem_stride, elem_offset) -
                 2.0 * elem(x, flat, elem_stride, elem_offset) +
                 elem(x, flat - s, elem_stride, elem_offset)) /
                h2;
        }
        out[static_cast<std::size_t>(flat)] = d;
    }
}

double cubic_interp_line(std::span<const double> line, std::int64_t stride, std::int64_t n,
                         double p) {
    if (p <= -1.0 || p >= static_cast<double>(n)) return 0.0;
    std::int64_t i1 = static_cast<std::int64_t>(std::floor(p));
    double t = p - static_cast<double>(i1);
    if (t == 0.0 && i1 >= 0 && i1 < n) return line[static_cast<std::size_t>(i1 * stride)];

    auto node = [&](std::int64_t i) -> double {
        return (i < 0 || i >= n) ? 0.0 : line[static_cast<std::size_t>(i * stride)];
    };
    double fm1 = node(i1 - 1), f0 = node(i1), f1 = node(i1 + 1), f2 = node(i1 + 2);
    double w_m1 = -t * (t - 1.0) * (t - 2.0) / 6.0;
    double w_0 = (t * t - 1.0) * (t - 2.0) / 2.0;
    double w_1 = -t * (t + 1.0) * (t - 2.0) / 2.0;
    double w_2 = t * (t * t - 1.0) / 6.0;
    return w_m1 * fm1 + w_0 * f0 + w_1 * f1 + w_2 * f2;
}

double linear_interp_line(std::span<const double> line, std::int64_t stride, std::int64_t n,
                          double p) {
    if (p <= -1.0 || p >= static_cast<double>(n)) return 0.0;
    std::int64_t i0 = static_cast<std::int64_t>(std::floor(p));
    double t = p - static_cast<double>(i0);
    auto node = [&](std::int64_t i) -> double {
        return (i < 0 || i >= n) ? 0.0 : line[static_cast<std::size_t>(i * stride)];
    };
    return (1.0 - t) * node(i0) + t * node(i0 + 1);
}

} // namespace kinchain
