#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "berry/asymptotics.hpp"
#include "berry/chaos.hpp"
#include "berry/errors.hpp"
#include "berry/experiments.hpp"
#include "berry/geometry.hpp"
#include "berry/sampler.hpp"
#include "berry/specfun.hpp"

namespace py = pybind11;
using namespace berry;

namespace {

WaveSpec make_spec(double E, std::uint64_t seed, int J, const std::string& model, const std::string& directions, int M,
                   double radius) {
    WaveSpec s;
    s.E = E;
    s.seed = seed;
    s.J = J;
    s.model = parse_wave_model(model);
    s.direction_rule = parse_direction_rule(directions);
    s.M = M;
    s.disk_radius = radius;
    s.validate();
    return s;
}

Grid grid_for(const Domain& D, double E, double grid_factor) {
    const auto [lo, hi] = D.bounds();
    return node_grid(lo, hi, default_spacing(E, grid_factor));
}

py::array_t<double> as_array(const GridField& f, const std::vector<double>& v) {
    py::array_t<double> out({f.grid.ny, f.grid.nx});
    auto m = out.mutable_unchecked<2>();
    for (int j = 0; j < f.grid.ny; ++j)
        for (int i = 0; i < f.grid.nx; ++i)
            m(j, i) = v[f.grid.index(i, j)];
    return out;
}

GridField from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a, double x0, double y0,
                     double spacing) {
    if (a.ndim() != 2)
        throw InvalidArgument("expected a 2D array indexed [y, x]");
    GridField f;
    f.grid = {{x0, y0}, spacing, static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0))};
    f.value.assign(a.data(), a.data() + a.size());
    return f;
}

py::dict rate_dict(const RateCheck& c) {
    py::dict d;
    d["pair"] = c.pair;
    d["E"] = c.E;
    d["numeric"] = c.numeric;
    d["predicted"] = c.predicted;
    d["ratio"] = c.ratio;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Random plane-wave toolkit";

    auto base = py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
    py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);
    py::register_exception<UnsupportedCase>(m, "UnsupportedCase", PyExc_NotImplementedError);
    py::register_exception<OutOfDomain>(m, "OutOfDomain", PyExc_ValueError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);

    m.def("bessel_j", py::vectorize(&bessel_j), py::arg("order"), py::arg("u"));
    m.def("hermite", py::vectorize(&hermite), py::arg("n"), py::arg("x"));
    m.def("beta_coeff", py::vectorize(&beta_coeff), py::arg("l"), py::arg("z"));
    m.def("alpha_coeff", &alpha_coeff, py::arg("n"), py::arg("m"));
    m.def("zeta_coeff", &zeta_coeff, py::arg("a"), py::arg("b"), py::arg("c"), py::arg("d"));
    m.def(
        "normalized_kernels",
        [](double E, double dx, double dy) {
            const auto ks = kernel_set(E, {dx, dy});
            py::array_t<double> out({3, 3});
            auto v = out.mutable_unchecked<2>();
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    v(k, l) = ks.rtilde[k][l];
            return out;
        },
        py::arg("E"), py::arg("dx"), py::arg("dy"), "3x3 matrix E[d~k B(x) d~l B(y)] for x - y = (dx, dy).");

    py::class_<Domain>(m, "Domain")
        .def(py::init(&parse_domain), py::arg("text"))
        .def_static("rectangle", &Domain::rectangle, py::arg("x0"), py::arg("y0"), py::arg("w"), py::arg("h"))
        .def_static("disk", &Domain::disk, py::arg("cx"), py::arg("cy"), py::arg("r"))
        .def_static("polygon", &Domain::polygon, py::arg("vertices"))
        .def("contains", [](const Domain& D, double x, double y) { return D.contains({x, y}); })
        .def_property_readonly("area", [](const Domain& D) { return area(D); })
        .def("erosion_area", [](const Domain& D, double eta) { return erosion_area(D, eta); })
        .def("intersection_area", [](const Domain& D, const Domain& other) { return intersection_area(D, other); })
        .def("__repr__", [](const Domain& D) { return "Domain('" + D.describe() + "')"; })
        .def("__str__", &Domain::describe);

    py::class_<WaveRealization>(m, "Wave")
        .def(py::init([](double E, std::uint64_t seed, int J, const std::string& model, const std::string& directions,
                         int M, double radius) { return sample_wave(make_spec(E, seed, J, model, directions, M, radius)); }),
             py::arg("E"), py::arg("seed") = 0, py::arg("J") = 256, py::arg("model") = "gaussian-spectral",
             py::arg("directions") = "equispaced", py::arg("M") = 0, py::arg("radius") = 1.0)
        .def_property_readonly("E", &WaveRealization::energy)
        .def("__call__",
             [](const WaveRealization& w, py::array_t<double> x, py::array_t<double> y) {
                 return py::vectorize([&w](double a, double b) { return w.value({a, b}); })(x, y);
             })
        .def("gradient",
             [](const WaveRealization& w, double x, double y) {
                 const auto v = w.value_gradient({x, y});
                 return py::make_tuple(v[1], v[2]);
             })
        .def(
            "grid",
            [](const WaveRealization& w, const Domain& D, double grid_factor) {
                const auto f = eval_grid(w, grid_for(D, w.energy(), grid_factor), false);
                return py::make_tuple(as_array(f, f.value), f.grid.origin[0], f.grid.origin[1], f.grid.spacing);
            },
            py::arg("domain"), py::arg("grid_factor") = 16.0,
            "Field values on the node lattice over the domain's bounding box: (values[y, x], x0, y0, spacing).")
        .def(
            "nodal_length",
            [](const WaveRealization& w, const Domain& D, double grid_factor) {
                const auto f = eval_grid(w, grid_for(D, w.energy(), grid_factor), false);
                return nodal_length(f, D, [&w](Vec2 x) { return w.value(x); }).length;
            },
            py::arg("domain"), py::arg("grid_factor") = 16.0)
        .def(
            "fourth_chaos_length",
            [](const WaveRealization& w, const Domain& D, double grid_factor) {
                return fourth_chaos_length(w, D, default_spacing(w.energy(), grid_factor)).value;
            },
            py::arg("domain"), py::arg("grid_factor") = 16.0)
        .def("second_chaos_length", [](const WaveRealization& w, const Domain& D) { return second_chaos_length(w, D); });

    py::class_<ComplexRealization>(m, "ComplexWave")
        .def(py::init([](double E, std::uint64_t seed, int J, const std::string& model) {
                 return sample_complex(make_spec(E, seed, J, model, "equispaced", 0, 1.0));
             }),
             py::arg("E"), py::arg("seed") = 0, py::arg("J") = 256, py::arg("model") = "gaussian-spectral")
        .def_readonly("re", &ComplexRealization::re)
        .def_readonly("im", &ComplexRealization::im)
        .def(
            "vortex_count",
            [](const ComplexRealization& w, const Domain& D, double grid_factor) {
                const auto [re, im] = eval_grid(w, grid_for(D, w.re.energy(), grid_factor), false);
                return vortex_count(re, im, D).count;
            },
            py::arg("domain"), py::arg("grid_factor") = 16.0);

    m.def(
        "nodal_length",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& values, double x0, double y0,
           double spacing, const Domain& D) { return nodal_length(from_array(values, x0, y0, spacing), D).length; },
        py::arg("values"), py::arg("x0"), py::arg("y0"), py::arg("spacing"), py::arg("domain"),
        "Zero-set length of samples values[y, x] on the lattice (x0 + i spacing, y0 + j spacing).");
    m.def(
        "vortex_count",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& re,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& im, double x0, double y0, double spacing,
           const Domain& D) { return vortex_count(from_array(re, x0, y0, spacing), from_array(im, x0, y0, spacing), D).count; },
        py::arg("re"), py::arg("im"), py::arg("x0"), py::arg("y0"), py::arg("spacing"), py::arg("domain"));

    m.def("a_rate", [](int i, int j) { return rate_table().a_rate(i, j); });
    m.def("b_rate", [](int i, int j) { return rate_table().b_rate(i, j); });
    m.def(
        "covariance_rate_check",
        [](const std::string& pair, double E, const Domain& D1, const Domain& D2, bool leading_order) {
            RadialOptions opt;
            opt.leading_order = leading_order;
            return rate_dict(covariance_rate_check(parse_pair(pair), E, D1, D2, opt));
        },
        py::arg("pair"), py::arg("E"), py::arg("D1"), py::arg("D2"), py::arg("leading_order") = false);
    m.def(
        "predictions",
        [](double E, const std::vector<Domain>& domains) {
            const auto p = predictions(E, domains);
            py::dict d;
            d["mean_length"] = p.mean_length;
            d["mean_count"] = p.mean_count;
            d["var_length"] = p.var_length;
            d["var_count"] = p.var_count;
            d["C"] = p.C;
            return d;
        },
        py::arg("E"), py::arg("domains"));

    m.def(
        "config_hash", [](const std::string& text) { return parse_config(text).hash(); }, py::arg("config"));
    m.def(
        "run_json",
        [](const std::string& text, std::optional<std::uint64_t> seed, int jobs) {
            auto c = parse_config(text);
            if (seed)
                c.seed = *seed;
            ExperimentResult r;
            {
                py::gil_scoped_release release;
                r = run_experiment(c, {jobs});
            }
            return py::make_tuple(to_json(r), to_csv(r));
        },
        py::arg("config"), py::arg("seed") = py::none(), py::arg("jobs") = 1,
        "Runs an experiment from config text; returns (summary JSON, CSV).");
}
