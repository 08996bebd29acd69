#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

#include "corner/commands.hpp"
#include "corner/config.hpp"
#include "corner/errors.hpp"
#include "corner/experiments.hpp"
#include "corner/homoclinic.hpp"
#include "corner/io.hpp"
#include "corner/modelock.hpp"
#include "corner/normal_form.hpp"
#include "corner/periodic.hpp"
#include "corner/unfolding.hpp"

namespace py = pybind11;
using namespace corner;

namespace {

using Pt = std::pair<double, double>;

Pt pt(Vec2 v) { return {v.x, v.y}; }
Vec2 vec(Pt p) { return {p.first, p.second}; }

std::vector<Pt> pts(const std::vector<Vec2>& v) {
    std::vector<Pt> out;
    out.reserve(v.size());
    for (auto p : v) out.push_back(pt(p));
    return out;
}

MapFamily delta_family(NormalFormParams base) {
    return [base](double d) {
        auto p = base;
        p.delta_R = d;
        return make_normal_form(p);
    };
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Homoclinic corners of piecewise-linear maps";
    m.attr("__version__") = std::string(kToolVersion);

    // translators run newest first, so the subclass goes last
    py::register_exception<Error>(m, "NumericError", PyExc_RuntimeError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<NormalFormParams>(m, "NormalFormParams")
        .def(py::init([](double tL, double dL, double tR, double dR, double mu) {
                 return NormalFormParams{tL, dL, tR, dR, mu};
             }),
             py::arg("tau_L") = 2.0, py::arg("delta_L") = 0.75, py::arg("tau_R") = -0.6, py::arg("delta_R") = 1.35,
             py::arg("mu") = 1.0)
        .def_readwrite("tau_L", &NormalFormParams::tau_L)
        .def_readwrite("delta_L", &NormalFormParams::delta_L)
        .def_readwrite("tau_R", &NormalFormParams::tau_R)
        .def_readwrite("delta_R", &NormalFormParams::delta_R)
        .def_readwrite("mu", &NormalFormParams::mu)
        .def("__repr__", [](const NormalFormParams& p) {
            return "NormalFormParams(" + format_real(p.tau_L) + ", " + format_real(p.delta_L) + ", " +
                   format_real(p.tau_R) + ", " + format_real(p.delta_R) + ", " + format_real(p.mu) + ")";
        });

    py::class_<SaddleData>(m, "Saddle")
        .def_property_readonly("point", [](const SaddleData& s) { return pt(s.point); })
        .def_readonly("stable", &SaddleData::lambda)
        .def_readonly("unstable", &SaddleData::sigma)
        .def_property_readonly("v_s", [](const SaddleData& s) { return pt(s.v_s); })
        .def_property_readonly("v_u", [](const SaddleData& s) { return pt(s.v_u); });

    py::class_<PwsMap>(m, "Map")
        .def(py::init(&make_normal_form), py::arg("params"))
        .def("__call__", [](const PwsMap& f, Pt p) { return pt(f.evaluate(vec(p)).image); })
        .def("label", [](const PwsMap& f, Pt p) { return f.piece(f.region_of(vec(p))).label; })
        .def(
            "iterate",
            [](const PwsMap& f, Pt p, std::size_t n, double escape) {
                const auto o = iterate(f, vec(p), n, escape);
                return py::make_tuple(pts(o.points), o.escaped);
            },
            py::arg("start"), py::arg("n"), py::arg("escape_radius") = kDefaultEscapeRadius,
            "Orbit points (start included) and whether the orbit escaped.")
        .def(
            "lyapunov",
            [](const PwsMap& f, Pt p, std::size_t transient, std::size_t n) {
                py::gil_scoped_release release;
                return lyapunov_exponent(f, vec(p), transient, n);
            },
            py::arg("start"), py::arg("transient"), py::arg("n"))
        .def("saddle", &saddle_of_piece, py::arg("piece") = kLeft)
        .def(
            "periodic_orbit",
            [](const PwsMap& f, const std::string& word) {
                const auto o = solve_periodic(f, parse_itinerary(f, word));
                py::dict d;
                d["points"] = pts(o.points);
                d["trace"] = o.trace;
                d["det"] = o.det;
                d["margin"] = o.margin;
                d["spectral_radius"] = o.spectral_radius();
                d["admissible"] = o.admissible();
                d["stability"] = std::string(to_string(o.stability));
                return d;
            },
            py::arg("word"));

    m.def(
        "locate_corner",
        [](NormalFormParams base, double lo, double hi) {
            py::gil_scoped_release release;
            return locate_corner(delta_family(base), {lo, hi}).parameter;
        },
        py::arg("params"), py::arg("lo"), py::arg("hi"),
        "delta_R of the homoclinic corner inside [lo, hi], other parameters from params.");

    m.def(
        "bcb_sequence",
        [](NormalFormParams base, double corner, std::size_t n_min, std::size_t n_max) {
            BcbSequenceOptions o;
            o.base = base;
            o.corner = corner;
            o.n_min = n_min;
            o.n_max = n_max;
            o.both_branches = false;
            BcbSequence s;
            {
                py::gil_scoped_release release;
                s = bcb_sequence(o);
            }
            std::vector<std::pair<std::size_t, double>> ratios;
            for (const auto& r : s.ratios) ratios.emplace_back(r.n, r.ratio);
            return py::make_tuple(s.values(), ratios, s.slope);
        },
        py::arg("params"), py::arg("corner"), py::arg("n_min") = 8, py::arg("n_max") = 20,
        "Collision values, successive ratios and the log-linear slope.");

    m.def(
        "transversality_certificate",
        [](std::tuple<double, double, double, double> p, double xi) {
            const auto [tX, dX, tY, dY] = p;
            const auto c = transversality_certificate({tX, dX, tY, dY}, xi);
            py::dict d;
            d["crossing"] = c.crossing;
            d["angle"] = c.angle;
            d["fixed_point"] = pt(c.fixed_point);
            d["z_minus1"] = pt(c.z_minus1);
            d["z_1"] = pt(c.z_1);
            d["z_2"] = pt(c.z_2);
            return d;
        },
        py::arg("params"), py::arg("xi"));

    m.def(
        "synthetic_bcb",
        [](double lambda, double sigma, std::size_t k) {
            UnfoldingParams u;
            u.lambda = lambda;
            u.sigma = sigma;
            return py::make_tuple(locate_synthetic_bcb(u, k).xi, synthetic_oracle(u, k).xi_k);
        },
        py::arg("lambda_") = 0.5, py::arg("sigma") = 1.5, py::arg("k") = 5,
        "Numeric and closed-form collision of the linear synthetic return map.");

    m.def(
        "rotational_word",
        [](std::size_t l, std::size_t mm, std::size_t n) {
            const auto w = rotational_word(l, mm, n);
            std::string s;
            for (auto c : w.word.letters) s += c == kLeft ? 'L' : 'R';
            return s;
        },
        py::arg("l"), py::arg("m"), py::arg("n"));

    m.def(
        "classify_cell",
        [](NormalFormParams p, std::size_t cap) {
            const auto c = classify_cell(p, enumerate_rotational_all(cap));
            return py::make_tuple(c.period, c.spectral_radius);
        },
        py::arg("params"), py::arg("period_cap") = 30, "Highest stable rotational period (0 for none) and its radius.");

    m.def("normalise_config", [](const std::string& text) { return serialise_config(parse_config(text)); },
          py::arg("text"), "Parse a config strictly and write it back with every field.");

    m.def(
        "run",
        [](const std::string& command, const std::string& config, const std::string& out_dir, std::size_t workers) {
            CommandOptions o;
            o.workers = workers;
            o.out_dir = out_dir;
            const auto cfg = parse_config(config);
            CommandResult r;
            {
                py::gil_scoped_release release;
                r = run_command(command, cfg, o);
            }
            return py::make_tuple(r.exit_code, r.summary);
        },
        py::arg("command"), py::arg("config"), py::arg("out_dir"), py::arg("workers") = 1,
        "Run a CLI command in-process; returns the exit code and the summary JSON text.");
}
