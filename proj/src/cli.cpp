#include "splinenas/cli.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "splinenas/benchmarks.hpp"
#include "splinenas/driver.hpp"
#include "splinenas/evaluator.hpp"
#include "splinenas/fixtures.hpp"
#include "splinenas/persistence.hpp"
#include "splinenas/projection.hpp"

namespace splinenas::cli {

using nlohmann::json;

ExitCode exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::InvalidConfig:
        case ErrorKind::InvalidSpace:
        case ErrorKind::BadDimensionNames:
        case ErrorKind::UnknownFixture:
        case ErrorKind::UnknownBenchmark:
            return kUsage;
        case ErrorKind::NonFiniteInput:
        case ErrorKind::RankDeficient:
        case ErrorKind::DegenerateGeometry:
        case ErrorKind::DuplicatePoints:
        case ErrorKind::NumericallyUnstable:
        case ErrorKind::DimensionTooLarge:
        case ErrorKind::FitFailed:
        case ErrorKind::NoAdmissiblePoint:
            return kNumericFailure;
        case ErrorKind::EvaluatorFailed:
        case ErrorKind::EvalTimeout:
        case ErrorKind::EvalNonZeroExit:
        case ErrorKind::EvalUnparseable:
            return kEvaluatorFailure;
        default:
            return kStateViolation;
    }
}

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string fmt_point(const Point& p) {
    std::string s = "(";
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (k) s += ", ";
        s += fmt(p[k]);
    }
    return s + ")";
}

double parse_number(const std::string& text) {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw Error(ErrorKind::InvalidConfig, "'" + text + "' is not a number");
    }
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(s);
    while (std::getline(is, cell, sep)) {
        if (!cell.empty()) out.push_back(cell);
    }
    return out;
}

/// "1,2,3" positional, or "c1=150,g1=300,..." by name.
Point parse_point(const ParamSpace& space, const std::string& text) {
    const auto cells = split(text, ',');
    Point p(space.size(), 0.0);
    if (!cells.empty() && cells[0].find('=') != std::string::npos) {
        std::vector<bool> seen(space.size(), false);
        for (const auto& c : cells) {
            const auto eq = c.find('=');
            if (eq == std::string::npos) throw Error(ErrorKind::InvalidConfig, "mixed point syntax in '" + text + "'");
            const auto k = space.index_of(c.substr(0, eq));
            if (!k || seen[*k]) throw Error(ErrorKind::BadDimensionNames, "bad or repeated dimension in '" + c + "'");
            seen[*k] = true;
            p[*k] = parse_number(c.substr(eq + 1));
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
            throw Error(ErrorKind::BadDimensionNames, "point must name every dimension");
        }
        return p;
    }
    if (cells.size() != space.size()) {
        throw Error(ErrorKind::InvalidConfig, "point needs " + std::to_string(space.size()) + " coordinates");
    }
    for (std::size_t k = 0; k < cells.size(); ++k) p[k] = parse_number(cells[k]);
    return p;
}

std::map<std::string, double> parse_assignments(const std::string& text) {
    std::map<std::string, double> out;
    for (const auto& c : split(text, ',')) {
        const auto eq = c.find('=');
        if (eq == std::string::npos) throw Error(ErrorKind::InvalidConfig, "expected name=value, got '" + c + "'");
        out[c.substr(0, eq)] = parse_number(c.substr(eq + 1));
    }
    return out;
}

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json top_json(const Study& s) {
    if (!s.x_top) return nullptr;
    return {{"x", s.x_top->x}, {"y", s.x_top->y}};
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ParamSpace load_space_file(const std::string& path) {
    try {
        return space_from_json(json::parse(read_file(path)));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::InvalidConfig, path + ": " + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::IoError) throw;
        throw Error(ErrorKind::InvalidConfig, e.what());
    }
}

struct Options {
    std::string study;
    std::string space;
    std::string fixture;
    std::string id;
    bool include_incremental = false;
    bool include_reference = false;
    bool raw_distance = false;
    std::optional<double> epsilon;
    std::optional<std::size_t> budget;
    std::optional<double> delta_min;
    std::optional<std::size_t> samples;
    std::optional<std::size_t> levels;
    std::optional<double> shrink;
    std::optional<std::size_t> max_samples;
    std::string direction;
    std::string point;
    std::optional<double> value;
    std::string csv;
    bool force = false;
    std::string evaluator;
    std::string benchmark;
    std::optional<bool> negate;
    double timeout_s = 0.0;
    std::size_t retries = 0;
    std::string free;
    std::string fixed;
    std::size_t resolution = 64;
    std::string out;
};

StudyConfig config_from(const Options& o) {
    StudyConfig c;
    if (!o.direction.empty()) c.direction = direction_from_string(o.direction);
    if (o.epsilon) c.epsilon = *o.epsilon;
    if (o.budget) c.max_evaluations = *o.budget;
    if (o.delta_min) c.delta_min = *o.delta_min;
    if (o.samples) c.search.samples_per_level = *o.samples;
    if (o.levels) c.search.levels = *o.levels;
    if (o.shrink) c.search.shrink_factor = *o.shrink;
    c.search.max_total_samples = o.max_samples ? *o.max_samples : c.search.samples_per_level * c.search.levels;
    return c;
}

// Loads, applies `mutate`, saves only on success: a failing command leaves the
// study file untouched.
template <typename F>
Study update_study(const std::string& path, F&& mutate) {
    Study study = load_study(path);
    mutate(study);
    save_study(study, path);
    return study;
}

void print_status(std::ostream& out, const Study& s) {
    out << "phase: " << to_string(s.phase) << ", " << s.points.size() << " point(s)";
    if (s.x_top) out << ", x_top " << fmt_point(s.x_top->x) << " = " << fmt(s.x_top->y);
    out << "\n";
}

int cmd_init(const Options& o, std::ostream& out) {
    const StudyConfig config = config_from(o);
    Study study;
    if (!o.fixture.empty()) {
        ReplayOptions ro;
        ro.include_incremental = o.include_incremental;
        ro.include_reference = o.include_reference;
        ro.normalize = !o.raw_distance;
        study = replay_study(o.fixture, config, ro);
        if (!o.id.empty()) study.id = o.id;
    } else {
        if (o.space.empty()) throw Error(ErrorKind::InvalidConfig, "init needs --space or --fixture");
        const ParamSpace loaded = load_space_file(o.space);
        const ParamSpace space(loaded.dims(), o.raw_distance ? false : loaded.normalize());
        study = init_study(space, config, o.id.empty() ? "study" : o.id);
    }
    save_study(study, o.study);

    out << json{{"command", "init"},
                {"study", study.id},
                {"names", study.space.names()},
                {"queue", study.design_queue},
                {"points", study.points.size()},
                {"phase", to_string(study.phase)}}
               .dump()
        << "\n";
    out << "initial design queue: " << study.design_queue.size() << " point(s)\n";
    for (const auto& q : study.design_queue) out << "  " << fmt_point(q) << "\n";
    print_status(out, study);
    return kOk;
}

int cmd_suggest(const Options& o, std::ostream& out, std::ostream& err) {
    Study study = load_study(o.study);
    if (study.finished()) {
        err << "error: study " << to_string(study.phase) << "\n";
        if (study.x_top) err << "x_top " << fmt_point(study.x_top->x) << " = " << fmt(study.x_top->y) << "\n";
        throw Error(ErrorKind::StudyFinished, "study " + std::string(to_string(study.phase)));
    }
    const Suggestion s = suggest(study);
    save_study(study, o.study);
    out << json{{"command", "suggest"},
                {"names", study.space.names()},
                {"x", s.x},
                {"predicted", opt_json(s.predicted)},
                {"rationale", to_string(s.rationale)}}
               .dump()
        << "\n";
    out << "measure " << fmt_point(s.x);
    if (s.predicted) out << ", predicted " << fmt(*s.predicted);
    out << " [" << to_string(s.rationale) << "]\n";
    return kOk;
}

int cmd_record(const Options& o, std::ostream& out) {
    if (!o.value) throw Error(ErrorKind::InvalidConfig, "record needs --value");
    std::optional<double> predicted;
    const Study study = update_study(o.study, [&](Study& s) {
        const Point x = parse_point(s.space, o.point);
        if (s.pending && unit_distance(s.space, s.pending->x, x) <= 1e-9) predicted = s.pending->predicted;
        record(s, x, *o.value);
    });
    const std::optional<double> gap = predicted ? std::optional(std::abs(*o.value - *predicted)) : std::nullopt;
    out << json{{"command", "record"},
                {"y", *o.value},
                {"predicted", opt_json(predicted)},
                {"gap", opt_json(gap)},
                {"converged", study.phase == Phase::Converged},
                {"phase", to_string(study.phase)},
                {"x_top", top_json(study)}}
               .dump()
        << "\n";
    if (gap) out << "|f_m - f_s| = " << fmt(*gap) << " (epsilon " << fmt(study.config.epsilon) << ")\n";
    print_status(out, study);
    return kOk;
}

int cmd_import(const Options& o, std::ostream& out) {
    std::size_t imported = 0;
    const Study study = update_study(o.study, [&](Study& s) {
        ImportOptions io;
        io.force = o.force;
        if (!o.csv.empty()) {
            std::istringstream in(read_file(o.csv));
            std::string line;
            std::vector<std::string> header;
            while (std::getline(in, line)) {
                if (!line.empty() && line.back() == '\r') line.pop_back();
                if (line.empty() || line[0] == '#') continue;
                auto cells = split(line, ',');
                if (header.empty()) {
                    header = cells;
                    if (header.size() != s.space.size() + 1) {
                        throw Error(ErrorKind::BadDimensionNames, "CSV header needs every dimension plus a value column");
                    }
                    for (std::size_t k = 0; k < s.space.size(); ++k) {
                        if (header[k] != s.space.dim(k).name) {
                            throw Error(ErrorKind::BadDimensionNames, "CSV column '" + header[k] + "' should be '" +
                                                                          s.space.dim(k).name + "'");
                        }
                    }
                    continue;
                }
                if (cells.size() != header.size()) throw Error(ErrorKind::InvalidConfig, "ragged CSV row: " + line);
                Point x;
                for (std::size_t k = 0; k < s.space.size(); ++k) x.push_back(parse_number(cells[k]));
                import_point(s, x, parse_number(cells.back()), io);
                ++imported;
            }
        } else {
            if (!o.value) throw Error(ErrorKind::InvalidConfig, "import needs --value or --csv");
            import_point(s, parse_point(s.space, o.point), *o.value, io);
            ++imported;
        }
    });
    out << json{{"command", "import"},
                {"imported", imported},
                {"points", study.points.size()},
                {"phase", to_string(study.phase)},
                {"x_top", top_json(study)}}
               .dump()
        << "\n";
    print_status(out, study);
    return kOk;
}

int cmd_run(const Options& o, std::ostream& out) {
    Study study = load_study(o.study);
    Evaluator evaluator;
    if (!o.evaluator.empty() == !o.benchmark.empty()) {
        throw Error(ErrorKind::InvalidConfig, "run needs exactly one of --evaluator or --benchmark");
    }
    if (!o.evaluator.empty()) {
        ExternalCommand cmd;
        cmd.command = o.evaluator;
        cmd.study_id = study.id;
        cmd.names = study.space.names();
        cmd.timeout = std::chrono::milliseconds(static_cast<long long>(o.timeout_s * 1000.0));
        cmd.retries = o.retries;
        evaluator = external_evaluator(std::move(cmd));
    } else {
        const bool negate = o.negate.value_or(study.config.direction == Direction::Maximize);
        evaluator = benchmark_evaluator(builtin_benchmark(o.benchmark, negate, study.space.size()), study.space);
    }

    RunOptions ro;
    ro.checkpoint = [&](const Study& s) {
        if (!s.pending) save_study(s, o.study);
    };
    std::size_t before = study.points.size();
    run_loop(study, evaluator, ro);
    out << json{{"command", "run"},
                {"phase", to_string(study.phase)},
                {"evaluations", study.points.size() - before},
                {"points", study.points.size()},
                {"x_top", top_json(study)}}
               .dump()
        << "\n";
    print_status(out, study);
    return kOk;
}

int cmd_predict(const Options& o, std::ostream& out) {
    const Study study = load_study(o.study);
    const SplineModel model = fit_study(study);
    // No box check: extrapolation is allowed and flagged.
    const Point x = parse_point(study.space, o.point);
    const Prediction p = predict(model, x);
    out << json{{"command", "predict"}, {"x", x}, {"value", p.value}, {"extrapolated", p.extrapolated}}.dump()
        << "\n";
    out << "f_s" << fmt_point(x) << " = " << fmt(p.value) << (p.extrapolated ? "  [extrapolated: outside the d-box]" : "")
        << "\n";
    return kOk;
}

int cmd_project(const Options& o, std::ostream& out) {
    const Study study = load_study(o.study);
    const auto free = split(o.free, ',');
    if (free.size() != 2) throw Error(ErrorKind::BadDimensionNames, "--free needs exactly two dimension names");
    const SplineModel model = fit_study(study);
    const ProjectionGrid grid = project(model, free[0], free[1], parse_assignments(o.fixed), o.resolution);
    const std::string csv = to_csv(grid);
    if (!o.out.empty()) {
        std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(ErrorKind::IoError, "cannot write " + o.out);
        f << csv;
    }
    double lo = grid.values.front();
    double hi = grid.values.front();
    for (double v : grid.values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    out << json{{"command", "project"},
                {"free", free},
                {"resolution", grid.resolution},
                {"min", lo},
                {"max", hi},
                {"out", o.out.empty() ? json(nullptr) : json(o.out)}}
               .dump()
        << "\n";
    if (o.out.empty()) out << csv;
    return kOk;
}

int cmd_extend(const Options& o, std::ostream& out) {
    if (o.space.empty()) throw Error(ErrorKind::InvalidConfig, "extend needs --space");
    const ParamSpace space = load_space_file(o.space);
    Study result;
    update_study(o.study, [&](Study& s) {
        const ParamSpace widened(space.dims(), s.space.normalize());
        s = extend_space(s, widened);
        result = s;
    });
    out << json{{"command", "extend"}, {"queue", result.design_queue}, {"phase", to_string(result.phase)}}.dump()
        << "\n";
    out << "queued " << result.design_queue.size() << " new design point(s)\n";
    for (const auto& q : result.design_queue) out << "  " << fmt_point(q) << "\n";
    return kOk;
}

int cmd_status(const Options& o, std::ostream& out) {
    const Study study = load_study(o.study);
    json pending = nullptr;
    if (study.pending) pending = {{"x", study.pending->x}, {"predicted", opt_json(study.pending->predicted)}};
    out << json{{"command", "status"},
                {"study", study.id},
                {"phase", to_string(study.phase)},
                {"points", study.points.size()},
                {"queue", study.design_queue.size()},
                {"pending", pending},
                {"x_top", top_json(study)}}
               .dump()
        << "\n";
    print_status(out, study);
    return kOk;
}

void add_config_flags(CLI::App* cmd, Options& o) {
    cmd->add_option("--epsilon", o.epsilon, "Convergence threshold on |measured - predicted|");
    cmd->add_option("--budget", o.budget, "Maximum number of measured points");
    cmd->add_flag("--raw-distance,!--normalize", o.raw_distance,
                  "Distances in parameter units instead of the unit box");
    cmd->add_option("--delta-min", o.delta_min, "Minimum unit-box distance between support points");
    cmd->add_option("--samples", o.samples, "Halton samples per search level");
    cmd->add_option("--levels", o.levels, "Search levels");
    cmd->add_option("--shrink", o.shrink, "Per-level box shrink factor");
    cmd->add_option("--max-samples", o.max_samples, "Total search sample budget");
    cmd->add_option("--direction", o.direction, "maximize or minimize");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Polyharmonic spline surrogate optimizer (ask-tell)", "splinenas"};
    app.require_subcommand(1);
    Options o;

    auto* init = app.add_subcommand("init", "Create a study file");
    init->add_option("--study", o.study, "Study file to write")->required();
    init->add_option("--space", o.space, "Space definition (JSON)");
    init->add_option("--fixture", o.fixture, "Replay an embedded measurement table");
    init->add_flag("--include-incremental", o.include_incremental, "Fixture: import measured incremental rows");
    init->add_flag("--include-reference", o.include_reference, "Fixture: import the reference row");
    init->add_option("--id", o.id, "Study id");
    add_config_flags(init, o);

    auto* sug = app.add_subcommand("suggest", "Propose the next point to measure");
    sug->add_option("--study", o.study)->required();

    auto* rec = app.add_subcommand("record", "Record the measurement of a suggested point");
    rec->add_option("--study", o.study)->required();
    rec->add_option("--point", o.point, "Coordinates: 1,2,3 or name=value,...")->required();
    rec->add_option("--value", o.value)->required();

    auto* imp = app.add_subcommand("import", "Add externally measured points");
    imp->add_option("--study", o.study)->required();
    imp->add_option("--point", o.point);
    imp->add_option("--value", o.value);
    imp->add_option("--csv", o.csv, "CSV with one column per dimension plus a value column");
    imp->add_flag("--force", o.force, "Skip the minimum-distance rule");

    auto* runc = app.add_subcommand("run", "Drive the suggest/measure/record loop");
    runc->add_option("--study", o.study)->required();
    runc->add_option("--evaluator", o.evaluator, "Shell command that prints the measurement");
    runc->add_option("--benchmark", o.benchmark, "Built-in objective: sphere, rosenbrock, rastrigin, affine");
    runc->add_flag("--negate,!--no-negate", o.negate, "Negate the benchmark (default: when maximizing)");
    runc->add_option("--timeout", o.timeout_s, "Evaluator timeout in seconds (0 = none)");
    runc->add_option("--retries", o.retries, "Evaluator retries per point");

    auto* pred = app.add_subcommand("predict", "Evaluate the spline at a point");
    pred->add_option("--study", o.study)->required();
    pred->add_option("--point", o.point)->required();

    auto* proj = app.add_subcommand("project", "Spline values over a 2-D slice, as CSV");
    proj->add_option("--study", o.study)->required();
    proj->add_option("--free", o.free, "Two free dimensions: a,b")->required();
    proj->add_option("--fixed", o.fixed, "Values for the other dimensions: name=value,...");
    proj->add_option("--resolution", o.resolution, "Grid points per axis")->check(CLI::Range(2, 4096));
    proj->add_option("--out", o.out, "CSV output file (default stdout)");

    auto* ext = app.add_subcommand("extend", "Widen the d-box and queue the new design points");
    ext->add_option("--study", o.study)->required();
    ext->add_option("--space", o.space, "Wider space definition (JSON)")->required();

    auto* stat = app.add_subcommand("status", "Show study state");
    stat->add_option("--study", o.study)->required();

    std::vector<std::string> argv_storage = {"splinenas"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        std::optional<StudyLock> lock;
        if (!o.study.empty()) lock.emplace(o.study);
        if (init->parsed()) return cmd_init(o, out);
        if (sug->parsed()) return cmd_suggest(o, out, err);
        if (rec->parsed()) return cmd_record(o, out);
        if (imp->parsed()) return cmd_import(o, out);
        if (runc->parsed()) return cmd_run(o, out);
        if (pred->parsed()) return cmd_predict(o, out);
        if (proj->parsed()) return cmd_project(o, out);
        if (ext->parsed()) return cmd_extend(o, out);
        if (stat->parsed()) return cmd_status(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kStateViolation;
    }
    return kUsage;
}

}  // namespace splinenas::cli
