#pragma once

#include "kinchain/grid.hpp"

#include <span>

namespace kinchain {

// d/dxi along one scalar dim: 2nd-order central inside, 2nd-order one-sided
// at the boundary.  Elements are addressed as x[flat * elem_stride +
// elem_offset] so masked/component-interleaved arrays can be differentiated
// in place of plain ones.  out[flat] receives the derivative.
void differentiate_dim(std::span<const double> x, std::int64_t elem_stride,
                       std::int64_t elem_offset, const GridLayout& layout, int dim,
                       std::span<double> out);

// d2/dxi2 along one scalar dim: 3-point central inside, 4-point one-sided at
// the boundary.
void second_derivative_dim(std::span<const double> x, std::int64_t elem_stride,
                           std::int64_t elem_offset, const GridLayout& layout, int dim,
                           std::span<double> out);

// 4-point piecewise-cubic Lagrange interpolation on a uniform line.  `p` is
// the fractional node index; nodes outside [0, n-1] contribute zero (fast
// decay beyond the box).
double cubic_interp_line(std::span<const double> line, std::int64_t stride, std::int64_t n,
                         double p);

// Linear interpolation on the same line addressing; used for midpoint
// velocity lookups during trajectory tracing.
double linear_interp_line(std::span<const double> line, std::int64_t stride, std::int64_t n,
                          double p);

} // namespace kinchain
