#include "kinchain/extensive.hpp"

#include "reduce.hpp"

#include <cmath>

namespace kinchain {

using detail::for_each_kept;
using detail::kept_axes;
using detail::masked_threshold;
using detail::reduced_dims_for;
using detail::subgrid_table;
using detail::SubgridTable;

DistributionField marginalize(const DistributionField& f, const KinematicIndexSet& drop) {
    if (!drop.subset_of(f.set))
        throw DomainError("marginalize: drop " + drop.to_string() + " not a subset of " +
                          f.set.to_string());
    if (drop.empty()) return f;

    GridLayout layout = f.layout();
    std::vector<int> reduced = reduced_dims_for(layout, f.set, drop);
    SubgridTable table = subgrid_table(layout, reduced);

    KinematicIndexSet out_set = f.set.minus(drop);
    std::vector<AxisGrid> out_ax = kept_axes(f.axes, drop);
    GridLayout out_layout = GridLayout::of(out_ax);

    std::vector<double> out(static_cast<std::size_t>(out_layout.size));
    std::vector<double> buf(table.offsets.size());
    for_each_kept(layout, reduced, [&](std::int64_t out_flat, std::int64_t base) {
        for (std::size_t e = 0; e < table.offsets.size(); ++e)
            buf[e] = table.weights[e] *
                     f.values[static_cast<std::size_t>(base + table.offsets[e])];
        out[static_cast<std::size_t>(out_flat)] = pairwise_sum(buf);
    });
    return make_field(std::move(out_set), std::move(out_ax), std::move(out), f.time);
}

double f0(const DistributionField& f) { return marginalize(f, f.set).values.front(); }

MeanField mean_kinematic(const DistributionField& f, int ell, const KinematicIndexSet& drop) {
    if (!f.set.contains(ell))
        throw DomainError("mean_kinematic: order " + std::to_string(ell) + " not in " +
                          f.set.to_string());
    if (drop.contains(ell) || !drop.subset_of(f.set))
        throw DomainError("mean_kinematic: drop must be a subset of the index set minus {" +
                          std::to_string(ell) + "}");
    KinematicIndexSet drop_all = drop.plus(ell);

    GridLayout layout = f.layout();
    int ell_axis = f.set.axis_of(ell);
    std::vector<int> ell_dims = dims_of_axis(layout, ell_axis);
    int d = static_cast<int>(ell_dims.size());

    std::vector<int> reduced = reduced_dims_for(layout, f.set, drop_all);
    SubgridTable table = subgrid_table(layout, reduced, ell_dims);

    KinematicIndexSet base = f.set.minus(drop_all);
    std::vector<AxisGrid> out_ax = kept_axes(f.axes, drop_all);
    GridLayout out_layout = GridLayout::of(out_ax);
    std::int64_t ncells = out_layout.size;

    std::vector<double> den(static_cast<std::size_t>(ncells));
    std::vector<double> num(static_cast<std::size_t>(ncells * d));
    std::vector<double> buf(table.offsets.size());
    std::vector<double> buf_num(table.offsets.size());
    for_each_kept(layout, reduced, [&](std::int64_t out_flat, std::int64_t base_off) {
        for (std::size_t e = 0; e < table.offsets.size(); ++e)
            buf[e] = table.weights[e] *
                     f.values[static_cast<std::size_t>(base_off + table.offsets[e])];
        den[static_cast<std::size_t>(out_flat)] = pairwise_sum(buf);
        for (int a = 0; a < d; ++a) {
            for (std::size_t e = 0; e < table.offsets.size(); ++e)
                buf_num[e] = buf[e] * table.coords[static_cast<std::size_t>(a)][e];
            num[static_cast<std::size_t>(out_flat * d + a)] = pairwise_sum(buf_num);
        }
    });

    double thr = masked_threshold(den);
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(ncells));
    std::vector<double> vals(static_cast<std::size_t>(ncells * d), 0.0);
    for (std::int64_t c = 0; c < ncells; ++c) {
        bool ok = thr > 0.0 && std::abs(den[static_cast<std::size_t>(c)]) >= thr;
        valid[static_cast<std::size_t>(c)] = ok ? 1 : 0;
        if (ok)
            for (int a = 0; a < d; ++a)
                vals[static_cast<std::size_t>(c * d + a)] =
                    num[static_cast<std::size_t>(c * d + a)] / den[static_cast<std::size_t>(c)];
    }
    return make_mean_field(ell, std::move(base), std::move(out_ax), d, std::move(vals),
                           std::move(valid), f.time);
}

MeanField nested_average(const MeanField& mf, const DistributionField& f_weight,
                         const KinematicIndexSet& drop) {
    if (f_weight.set != mf.base)
        throw DomainError("nested_average: weight field set " + f_weight.set.to_string() +
                          " must equal the mean field base " + mf.base.to_string());
    require_same_grid(f_weight.axes, mf.axes);
    if (!drop.subset_of(mf.base))
        throw DomainError("nested_average: drop " + drop.to_string() + " not a subset of base " +
                          mf.base.to_string());
    if (drop.empty()) return mf;

    GridLayout layout = f_weight.layout();
    std::vector<int> reduced = reduced_dims_for(layout, f_weight.set, drop);
    SubgridTable table = subgrid_table(layout, reduced);

    KinematicIndexSet out_set = mf.base.minus(drop);
    std::vector<AxisGrid> out_ax = kept_axes(f_weight.axes, drop);
    GridLayout out_layout = GridLayout::of(out_ax);
    std::int64_t ncells = out_layout.size;
    int d = mf.components;

    std::vector<double> den(static_cast<std::size_t>(ncells));
    std::vector<double> num(static_cast<std::size_t>(ncells * d));
    std::vector<double> buf(table.offsets.size());
    std::vector<double> buf_num(table.offsets.size());
    for_each_kept(layout, reduced, [&](std::int64_t out_flat, std::int64_t base_off) {
        // masked cells carry zero measure in both sums
        std::size_t kept_count = 0;
        for (std::size_t e = 0; e < table.offsets.size(); ++e) {
            std::int64_t src = base_off + table.offsets[e];
            if (!mf.is_valid(src)) continue;
            buf[kept_count++] =
                table.weights[e] * f_weight.values[static_cast<std::size_t>(src)];
        }
        den[static_cast<std::size_t>(out_flat)] =
            pairwise_sum(std::span<const double>(buf.data(), kept_count));
        for (int a = 0; a < d; ++a) {
            std::size_t k = 0;
            for (std::size_t e = 0; e < table.offsets.size(); ++e) {
                std::int64_t src = base_off + table.offsets[e];
                if (!mf.is_valid(src)) continue;
                buf_num[k] = buf[k] * mf.at(src, a);
                ++k;
            }
            num[static_cast<std::size_t>(out_flat * d + a)] =
                pairwise_sum(std::span<const double>(buf_num.data(), kept_count));
        }
    });

    double thr = masked_threshold(den);
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(ncells));
    std::vector<double> vals(static_cast<std::size_t>(ncells * d), 0.0);
    for (std::int64_t c = 0; c < ncells; ++c) {
        bool ok = thr > 0.0 && std::abs(den[static_cast<std::size_t>(c)]) >= thr;
        valid[static_cast<std::size_t>(c)] = ok ? 1 : 0;
        if (ok)
            for (int a = 0; a < d; ++a)
                vals[static_cast<std::size_t>(c * d + a)] =
                    num[static_cast<std::size_t>(c * d + a)] / den[static_cast<std::size_t>(c)];
    }
    return make_mean_field(mf.order, std::move(out_set), std::move(out_ax), d, std::move(vals),
                           std::move(valid), mf.time);
}

MeanField coordinate_mean(const DistributionField& f, int order) {
    GridLayout layout = f.layout();
    int axis = f.set.axis_of(order);
    std::vector<int> dims = dims_of_axis(layout, axis);
    int d = static_cast<int>(dims.size());
    std::vector<double> vals(static_cast<std::size_t>(layout.size * d));
    for (std::int64_t flat = 0; flat < layout.size; ++flat)
        for (int a = 0; a < d; ++a)
            vals[static_cast<std::size_t>(flat * d + a)] =
                layout.coord_at(dims[static_cast<std::size_t>(a)], flat);
    std::vector<std::uint8_t> valid(static_cast<std::size_t>(layout.size), 1);
    // degenerate average of a coordinate over a set that contains it
    MeanField m;
    m.order = order;
    m.base = f.set;
    m.axes = f.axes;
    m.components = d;
    m.values = std::move(vals);
    m.valid = std::move(valid);
    m.time = f.time;
    return m;
}

} // namespace kinchain
