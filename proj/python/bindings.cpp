#include <pybind11/functional.h>
#include <pybind11/gil_safe_call_once.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "splinenas/benchmarks.hpp"
#include "splinenas/driver.hpp"
#include "splinenas/error.hpp"
#include "splinenas/fixtures.hpp"
#include "splinenas/halton_search.hpp"
#include "splinenas/persistence.hpp"
#include "splinenas/projection.hpp"
#include "splinenas/spline.hpp"

namespace py = pybind11;
using namespace splinenas;

namespace {

std::vector<SupportPoint> support_from(const std::vector<Point>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw Error(ErrorKind::InvalidConfig, "points and values differ in length");
    std::vector<SupportPoint> pts;
    for (std::size_t i = 0; i < xs.size(); ++i) pts.push_back({xs[i], ys[i], PointKind::Imported});
    return pts;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Polyharmonic spline surrogate optimizer (C++ core)";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result([&]() { return py::object(py::exception<Error>(m, "SplineNasError")); });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object err = error_type.get_stored()(e.what());
            err.attr("kind") = std::string(to_string(e.kind()));
            PyErr_SetObject(error_type.get_stored().ptr(), err.ptr());
        }
    });

    py::enum_<Direction>(m, "Direction")
        .value("MAXIMIZE", Direction::Maximize)
        .value("MINIMIZE", Direction::Minimize);
    py::enum_<Phase>(m, "Phase")
        .value("INITIAL_DESIGN", Phase::InitialDesign)
        .value("ITERATING", Phase::Iterating)
        .value("CONVERGED", Phase::Converged)
        .value("BUDGET_EXHAUSTED", Phase::BudgetExhausted);
    py::enum_<Rationale>(m, "Rationale")
        .value("INITIAL_DESIGN", Rationale::InitialDesign)
        .value("SPLINE_ARGMAX", Rationale::SplineArgmax);
    py::enum_<PointKind>(m, "PointKind")
        .value("INITIAL", PointKind::Initial)
        .value("INCREMENTAL", PointKind::Incremental)
        .value("IMPORTED", PointKind::Imported);

    py::class_<Dimension>(m, "Dimension")
        .def(py::init([](std::string name, double lo, double hi, bool integer) {
                 return Dimension{std::move(name), lo, hi, integer};
             }),
             py::arg("name"), py::arg("min"), py::arg("max"), py::arg("integer") = false)
        .def_readonly("name", &Dimension::name)
        .def_readonly("min", &Dimension::min)
        .def_readonly("max", &Dimension::max)
        .def_readonly("integer", &Dimension::integer)
        .def("__repr__", [](const Dimension& d) {
            return "Dimension(" + d.name + ", " + std::to_string(d.min) + ", " + std::to_string(d.max) +
                   (d.integer ? ", integer" : "") + ")";
        });

    py::class_<ParamSpace>(m, "ParamSpace")
        .def(py::init<std::vector<Dimension>, bool>(), py::arg("dims"), py::arg("normalize") = true)
        .def_property_readonly("dims", &ParamSpace::dims)
        .def_property_readonly("names", &ParamSpace::names)
        .def_property_readonly("normalize", &ParamSpace::normalize)
        .def("__len__", &ParamSpace::size)
        .def("contains", [](const ParamSpace& s, const Point& p) { return s.contains(p); })
        .def("initial_design", [](const ParamSpace& s) { return initial_design(s); })
        .def("snap", [](const ParamSpace& s, const Point& p) { return snap(s, p); })
        .def("distance", [](const ParamSpace& s, const Point& a, const Point& b) { return unit_distance(s, a, b); });

    py::class_<SplineModel>(m, "SplineModel")
        .def_property_readonly("space", &SplineModel::space)
        .def_property_readonly("rbf_coeffs", &SplineModel::rbf_coeffs)
        .def_property_readonly("poly_coeffs", &SplineModel::poly_coeffs)
        .def_property_readonly("fit_residual", &SplineModel::fit_residual)
        .def("__call__", [](const SplineModel& s, const Point& x) { return evaluate(s, x); })
        .def("predict",
             [](const SplineModel& s, const Point& x) {
                 const auto p = predict(s, x);
                 return py::make_tuple(p.value, p.extrapolated);
             })
        .def("gradient", [](const SplineModel& s, const Point& x) { return evaluate_gradient(s, x); });

    m.def(
        "fit",
        [](const ParamSpace& space, const std::vector<Point>& xs, const std::vector<double>& ys, double tol) {
            return fit(space, support_from(xs, ys), tol);
        },
        py::arg("space"), py::arg("points"), py::arg("values"), py::arg("residual_tol") = kDefaultResidualTol,
        "Fit the interpolating spline through (points, values).");

    m.def("halton", &halton, py::arg("index"), py::arg("base"));
    m.def("halton_point", &halton_point, py::arg("index"), py::arg("dims"));

    py::class_<SearchConfig>(m, "SearchConfig")
        .def(py::init<>())
        .def_readwrite("samples_per_level", &SearchConfig::samples_per_level)
        .def_readwrite("levels", &SearchConfig::levels)
        .def_readwrite("shrink_factor", &SearchConfig::shrink_factor)
        .def_readwrite("stall_tolerance", &SearchConfig::stall_tolerance)
        .def_readwrite("max_total_samples", &SearchConfig::max_total_samples);

    m.def(
        "search",
        [](const SplineModel& model, Direction dir, const SearchConfig& cfg) {
            const auto rep = search(model, Box::of(model.space()), dir, cfg);
            py::dict out;
            out["x"] = rep.best_x;
            out["value"] = rep.best_value;
            out["levels_run"] = rep.levels_run;
            out["samples_used"] = rep.samples_used;
            out["stalled"] = rep.stalled;
            return out;
        },
        py::arg("model"), py::arg("direction") = Direction::Maximize, py::arg("config") = SearchConfig{},
        "Hierarchical Halton search of the spline over its whole box.");

    py::class_<StudyConfig>(m, "StudyConfig")
        .def(py::init<>())
        .def_readwrite("direction", &StudyConfig::direction)
        .def_readwrite("epsilon", &StudyConfig::epsilon)
        .def_readwrite("residual_tol", &StudyConfig::residual_tol)
        .def_readwrite("delta_min", &StudyConfig::delta_min)
        .def_readwrite("max_evaluations", &StudyConfig::max_evaluations)
        .def_readwrite("search", &StudyConfig::search);

    py::class_<Suggestion>(m, "Suggestion")
        .def_readonly("x", &Suggestion::x)
        .def_readonly("predicted", &Suggestion::predicted)
        .def_readonly("rationale", &Suggestion::rationale);

    py::class_<SupportPoint>(m, "SupportPoint")
        .def_readonly("x", &SupportPoint::x)
        .def_readonly("y", &SupportPoint::y)
        .def_readonly("kind", &SupportPoint::kind)
        .def_readonly("forced", &SupportPoint::forced)
        .def("__repr__", [](const SupportPoint& p) {
            std::string s = "SupportPoint([";
            for (std::size_t k = 0; k < p.x.size(); ++k) s += (k ? ", " : "") + std::to_string(p.x[k]);
            return s + "], " + std::to_string(p.y) + ")";
        });

    py::class_<Study>(m, "Study")
        .def(py::init([](const ParamSpace& space, const StudyConfig& config, std::string id) {
                 return init_study(space, config, std::move(id));
             }),
             py::arg("space"), py::arg("config") = StudyConfig{}, py::arg("id") = "study")
        .def_readonly("id", &Study::id)
        .def_readonly("space", &Study::space)
        .def_readonly("config", &Study::config)
        .def_readonly("points", &Study::points)
        .def_readonly("design_queue", &Study::design_queue)
        .def_readonly("pending", &Study::pending)
        .def_readonly("x_top", &Study::x_top)
        .def_readonly("phase", &Study::phase)
        .def_property_readonly("finished", &Study::finished)
        .def("suggest", [](Study& s) { return suggest(s); })
        .def("record", [](Study& s, const Point& x, double y) { record(s, x, y); }, py::arg("x"), py::arg("y"))
        .def(
            "import_point",
            [](Study& s, const Point& x, double y, bool force) {
                ImportOptions o;
                o.force = force;
                import_point(s, x, y, o);
            },
            py::arg("x"), py::arg("y"), py::arg("force") = false)
        .def("extend", [](const Study& s, const ParamSpace& space) { return extend_space(s, space); })
        .def("model", [](const Study& s) { return fit_study(s); })
        .def(
            "run",
            [](Study& s, const std::function<double(const Point&)>& f, std::size_t retries) {
                RunOptions o;
                o.retries = retries;
                run_loop(s, f, o);
            },
            py::arg("evaluator"), py::arg("retries") = 0,
            "Suggest, evaluate and record until converged or out of budget.")
        .def("to_json", [](const Study& s) { return canonical_dump(to_json(s)); })
        .def_static("from_json", [](const std::string& text) { return study_from_json(nlohmann::json::parse(text)); })
        .def("save", [](const Study& s, const std::filesystem::path& p) { save_study(s, p); })
        .def_static("load", [](const std::filesystem::path& p) { return load_study(p); });

    m.def("fixture_names", &fixture_names);
    m.def(
        "replay_fixture",
        [](const std::string& name, const StudyConfig& config, bool incremental, bool reference, bool normalize) {
            ReplayOptions o;
            o.include_incremental = incremental;
            o.include_reference = reference;
            o.normalize = normalize;
            return replay_study(name, config, o);
        },
        py::arg("name"), py::arg("config") = StudyConfig{}, py::arg("include_incremental") = false,
        py::arg("include_reference") = false, py::arg("normalize") = true,
        "Study whose support points are the literal measured rows of an embedded table.");

    m.def("benchmark_names", &benchmark_names);
    m.def(
        "benchmark",
        [](const std::string& name, bool negate, std::size_t dims) {
            auto b = builtin_benchmark(name, negate, dims);
            return std::function<double(const Point&)>([b](const Point& u) { return b(u); });
        },
        py::arg("name"), py::arg("negate") = false, py::arg("dims") = 2,
        "Synthetic objective over unit-box coordinates.");

    m.def(
        "project",
        [](const SplineModel& model, const std::string& row, const std::string& col,
           const std::map<std::string, double>& fixed, std::size_t resolution) {
            const auto g = project(model, row, col, fixed, resolution);
            py::dict out;
            out["row_axis"] = g.row_axis;
            out["col_axis"] = g.col_axis;
            std::vector<std::vector<double>> rows(g.resolution);
            for (std::size_t i = 0; i < g.resolution; ++i)
                for (std::size_t j = 0; j < g.resolution; ++j) rows[i].push_back(g.at(i, j));
            out["values"] = rows;
            return out;
        },
        py::arg("model"), py::arg("row"), py::arg("col"), py::arg("fixed"), py::arg("resolution") = 64);
}
