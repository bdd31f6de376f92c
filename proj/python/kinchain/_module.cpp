#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "kinchain/advect.hpp"
#include "kinchain/analytic.hpp"
#include "kinchain/chain.hpp"
#include "kinchain/conservation.hpp"
#include "kinchain/h_entropy.hpp"
#include "kinchain/io.hpp"
#include "kinchain/moments.hpp"
#include "kinchain/run.hpp"

namespace py = pybind11;
using namespace kinchain;

namespace {

std::vector<int> shape_of(const DistributionField& f) {
    GridLayout lay = f.layout();
    std::vector<int> shape;
    for (const ScalarDim& d : lay.dims) shape.push_back(static_cast<int>(d.n));
    if (shape.empty()) shape.push_back(1);
    return shape;
}

py::array_t<double> values_array(const DistributionField& f) {
    std::vector<int> shape = shape_of(f);
    py::array_t<double> arr(shape);
    std::memcpy(arr.mutable_data(), f.values.data(), f.values.size() * sizeof(double));
    return arr;
}

DistributionField field_from_array(const std::vector<int>& orders,
                                   const std::vector<std::tuple<double, double, int>>& axis_specs,
                                   py::array_t<double, py::array::c_style | py::array::forcecast> a,
                                   double time) {
    std::vector<AxisSpec> specs;
    for (std::size_t i = 0; i < orders.size(); ++i) {
        auto [lo, hi, pts] = axis_specs.at(i);
        specs.push_back(AxisSpec{orders[i], lo, hi, pts, 1});
    }
    std::vector<AxisGrid> axes = make_grid(specs);
    std::vector<double> values(a.data(), a.data() + a.size());
    return make_field(KinematicIndexSet(std::vector<int>(orders)), std::move(axes),
                      std::move(values), time);
}

KinematicIndexSet set_of(const std::vector<int>& v) {
    return KinematicIndexSet(std::vector<int>(v));
}

} // namespace

PYBIND11_MODULE(_kinchain, m) {
    m.doc() = "distribution-function fields over generalized phase space";

    py::register_exception<ConfigError>(m, "ConfigError");
    py::register_exception<NumericalGuardError>(m, "NumericalGuardError");
    py::register_exception<DomainError>(m, "DomainError");

    py::class_<DistributionField>(m, "DistributionField")
        .def_property_readonly("index_set",
                               [](const DistributionField& f) {
                                   return std::vector<int>(f.set.begin(), f.set.end());
                               })
        .def_property_readonly("values", &values_array)
        .def_readonly("time", &DistributionField::time)
        .def("f0", [](const DistributionField& f) { return f0(f); });

    py::class_<MeanField>(m, "MeanField")
        .def_readonly("order", &MeanField::order)
        .def_property_readonly("base",
                               [](const MeanField& f) {
                                   return std::vector<int>(f.base.begin(), f.base.end());
                               })
        .def_property_readonly("values",
                               [](const MeanField& f) {
                                   py::array_t<double> arr(
                                       {static_cast<py::ssize_t>(f.cells()),
                                        static_cast<py::ssize_t>(f.components)});
                                   std::memcpy(arr.mutable_data(), f.values.data(),
                                               f.values.size() * sizeof(double));
                                   return arr;
                               })
        .def_property_readonly("valid", [](const MeanField& f) {
            py::array_t<bool> arr(static_cast<py::ssize_t>(f.cells()));
            for (std::int64_t i = 0; i < f.cells(); ++i)
                arr.mutable_data()[i] = f.is_valid(i);
            return arr;
        });

    py::class_<HReport>(m, "HReport")
        .def_readonly("H", &HReport::H)
        .def_readonly("f0", &HReport::f0)
        .def_readonly("f0_minus", &HReport::f0_minus)
        .def_readonly("mean_Q", &HReport::mean_Q)
        .def_readonly("time", &HReport::time);

    py::class_<RegionDecomposition>(m, "RegionDecomposition")
        .def_readonly("negative_component_count", &RegionDecomposition::negative_component_count)
        .def_readonly("component_f0_minus", &RegionDecomposition::component_f0_minus)
        .def_readonly("interface_face_count", &RegionDecomposition::interface_face_count)
        .def_property_readonly("negative_cells", [](const RegionDecomposition& r) {
            std::int64_t n = 0;
            for (auto v : r.negative_mask) n += v;
            return n;
        });

    py::class_<PhysicalParams>(m, "PhysicalParams")
        .def(py::init([](double mass, double hbar, double omega) {
                 return PhysicalParams::harmonic(mass, hbar, omega);
             }),
             py::arg("mass") = 1.0, py::arg("hbar") = 1.0, py::arg("omega") = 1.0)
        .def_readonly("mass", &PhysicalParams::mass)
        .def_readonly("hbar", &PhysicalParams::hbar)
        .def_readonly("omega", &PhysicalParams::omega)
        .def_property_readonly("sigma_x", &PhysicalParams::sigma_x)
        .def_property_readonly("sigma_v", &PhysicalParams::sigma_v);

    m.def("laguerre", &laguerre, py::arg("n"), py::arg("z"));

    m.def(
        "wigner_oscillator",
        [](int n, const PhysicalParams& p, int points, double widths) {
            return wigner_oscillator(n, p, oscillator_axes(p, points, widths));
        },
        py::arg("n"), py::arg("params"), py::arg("points") = 128, py::arg("widths") = 8.0);

    m.def("field_from_array", &field_from_array, py::arg("orders"), py::arg("axes"),
          py::arg("values"), py::arg("time") = 0.0,
          "Build a field from ascending kinematic orders, per-axis (min, max, points) "
          "specs and a matching value tensor.");

    m.def(
        "marginalize",
        [](const DistributionField& f, const std::vector<int>& drop) {
            return marginalize(f, set_of(drop));
        },
        py::arg("f"), py::arg("drop"));

    m.def(
        "mean_kinematic",
        [](const DistributionField& f, int ell, const std::vector<int>& drop) {
            return mean_kinematic(f, ell, set_of(drop));
        },
        py::arg("f"), py::arg("ell"), py::arg("drop") = std::vector<int>{});

    m.def(
        "nested_average",
        [](const MeanField& mf, const DistributionField& f, const std::vector<int>& drop) {
            return nested_average(mf, f, set_of(drop));
        },
        py::arg("mf"), py::arg("f"), py::arg("drop"));

    m.def(
        "central_moment2",
        [](const DistributionField& f, int a, int b, const std::vector<int>& drop) {
            MomentTensorField P = central_moment2(f, a, b, set_of(drop));
            py::array_t<double> arr(
                {static_cast<py::ssize_t>(P.cells()), static_cast<py::ssize_t>(P.components),
                 static_cast<py::ssize_t>(P.components)});
            std::memcpy(arr.mutable_data(), P.values.data(), P.values.size() * sizeof(double));
            return arr;
        },
        py::arg("f"), py::arg("a"), py::arg("b"), py::arg("drop"),
        "Central moment tensor values per base cell.");

    m.def(
        "h_theorem_residual",
        [](const DistributionField& f_minus, const DistributionField& f_plus,
           const PhysicalParams& params, double dt, bool wigner_mode) {
            MoyalClosure closure(params, 3);
            DistributionField mid = midpoint(f_minus, f_plus);
            MeanField mf = closure.evaluate(mid, mid.time);
            DissipationField q = dissipation_source(mf, f_minus.set[1]);
            std::vector<DissipationField> qs{q};
            HTheoremResidual r = h_theorem_residual(f_minus, f_plus, qs, dt, wigner_mode);
            return py::make_tuple(r.dH_term, r.source_term, r.residual);
        },
        py::arg("f_minus"), py::arg("f_plus"), py::arg("params"), py::arg("dt"),
        py::arg("wigner_mode") = true,
        "(d(f0 H)/dt, -f0<Q>, residual) for a snapshot pair under the series closure.");

    m.def(
        "moyal_mean",
        [](const DistributionField& f, const PhysicalParams& params,
           const std::vector<double>& potential, int k_max) {
            PhysicalParams p = params;
            if (!potential.empty()) p.potential = Polynomial(potential);
            return MoyalClosure(p, k_max).evaluate(f, f.time);
        },
        py::arg("f"), py::arg("params"), py::arg("potential") = std::vector<double>{},
        py::arg("k_max") = 3, "Vlasov-Moyal mean acceleration on a {1,2} field.");

    m.def(
        "step_harmonic",
        [](const DistributionField& f, const PhysicalParams& params, double dt, int steps,
           int k_max) {
            MoyalClosure closure(params, k_max);
            DistributionField cur = f;
            for (int i = 0; i < steps; ++i) cur = step_rank2_first_group(cur, closure, dt);
            return cur;
        },
        py::arg("f"), py::arg("params"), py::arg("dt"), py::arg("steps") = 1,
        py::arg("k_max") = 3, "Advance a {1,2} field under the Moyal closure of `params`.");

    m.def("h_function",
          [](const DistributionField& f) { return h_function(f); });
    m.def("negative_region", &negative_region, py::arg("f"));

    m.def("write_grid_dump", &write_grid_dump, py::arg("f"), py::arg("path"));
    m.def("read_grid_dump", &read_grid_dump, py::arg("path"));
}
