#include "splinenas/driver.hpp"

#include <algorithm>
#include <cmath>

#include "splinenas/error.hpp"

namespace splinenas {

namespace {

// Two coordinate vectors name the same configuration.
constexpr double kSamePoint = 1e-9;

bool same_point(const ParamSpace& space, const Point& a, const Point& b) {
    return a.size() == b.size() && unit_distance(space, a, b) <= kSamePoint;
}

void log_event(Study& study, std::string action, const Point& x, std::optional<double> y = {},
               std::optional<double> predicted = {}) {
    study.history.push_back(
        {study.history.size() + 1, std::move(action), x, y, predicted});
}

void update_top(Study& study, const SupportPoint& p) {
    if (!study.x_top || better(study.config.direction, p.y, study.x_top->y)) study.x_top = p;
}

void require_point(const Study& study, const Point& x) {
    if (x.size() != study.space.size() || !study.space.contains(x)) {
        throw Error(ErrorKind::OutOfBox, "point lies outside the d-box");
    }
    if (!study.space.on_grid(x)) {
        throw Error(ErrorKind::OutOfBox, "integer dimensions need whole-number coordinates");
    }
}

std::vector<Point> uncovered(const ParamSpace& space, const std::vector<Point>& candidates,
                             const std::vector<Point>& covered, double delta_min) {
    std::vector<Point> out;
    for (const auto& c : candidates) {
        if (!admissible(space, c, covered, delta_min)) continue;
        if (!admissible(space, c, out, delta_min)) continue;
        out.push_back(c);
    }
    return out;
}

}  // namespace

std::string_view to_string(Phase p) noexcept {
    switch (p) {
        case Phase::InitialDesign: return "initial-design";
        case Phase::Iterating: return "iterating";
        case Phase::Converged: return "converged";
        case Phase::BudgetExhausted: return "budget-exhausted";
    }
    return "iterating";
}

Phase phase_from_string(std::string_view s) {
    if (s == "initial-design") return Phase::InitialDesign;
    if (s == "iterating") return Phase::Iterating;
    if (s == "converged") return Phase::Converged;
    if (s == "budget-exhausted") return Phase::BudgetExhausted;
    throw Error(ErrorKind::ParseError, "unknown phase '" + std::string(s) + "'");
}

std::string_view to_string(Rationale r) noexcept {
    return r == Rationale::InitialDesign ? "initial-design" : "spline-argmax";
}

Rationale rationale_from_string(std::string_view s) {
    if (s == "initial-design") return Rationale::InitialDesign;
    if (s == "spline-argmax") return Rationale::SplineArgmax;
    throw Error(ErrorKind::ParseError, "unknown rationale '" + std::string(s) + "'");
}

void validate(const StudyConfig& cfg, const ParamSpace& space) {
    if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
        throw Error(ErrorKind::InvalidConfig, "epsilon must be positive");
    }
    if (!(cfg.residual_tol > 0.0) || !std::isfinite(cfg.residual_tol)) {
        throw Error(ErrorKind::InvalidConfig, "residual_tol must be positive");
    }
    if (!(cfg.delta_min >= 0.0) || !std::isfinite(cfg.delta_min)) {
        throw Error(ErrorKind::InvalidConfig, "delta_min must be non-negative");
    }
    const std::size_t floor = 2 * space.size() + 3;
    if (cfg.max_evaluations < floor) {
        throw Error(ErrorKind::InvalidConfig, "max_evaluations must be at least 2d+3 = " +
                                                  std::to_string(floor));
    }
    validate(cfg.search);
}

std::vector<Point> Study::support_coords() const {
    std::vector<Point> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.x);
    return out;
}

Study init_study(const ParamSpace& space, const StudyConfig& config, std::string id,
                 DesignMode mode) {
    validate(config, space);
    if (id.empty()) throw Error(ErrorKind::InvalidConfig, "study id is empty");
    Study study;
    study.id = std::move(id);
    study.space = space;
    study.config = config;
    if (mode == DesignMode::Generate) {
        study.design_queue = initial_design(space);
        study.phase = Phase::InitialDesign;
    } else {
        study.phase = Phase::Iterating;
    }
    return study;
}

SplineModel fit_study(const Study& study) {
    try {
        return fit(study.space, study.points, study.config.residual_tol);
    } catch (const Error& e) {
        throw Error(ErrorKind::FitFailed, e.what());
    }
}

Suggestion suggest(Study& study) {
    if (study.finished()) {
        throw Error(ErrorKind::StudyFinished, "study is " + std::string(to_string(study.phase)));
    }
    if (study.pending) throw Error(ErrorKind::PendingOutstanding, "a suggestion is awaiting its measurement");

    if (study.phase == Phase::InitialDesign && study.design_queue.empty()) {
        study.phase = Phase::Iterating;
    }

    Suggestion s;
    if (study.phase == Phase::InitialDesign) {
        s = {study.design_queue.front(), std::nullopt, Rationale::InitialDesign};
    } else {
        const SplineModel model = fit_study(study);
        std::vector<SearchSample> trace;
        const auto report =
            search(model, Box::of(study.space), study.config.direction, study.config.search, &trace);
        const auto existing = study.support_coords();

        std::optional<Point> chosen;
        Point snapped = snap(study.space, report.best_x);
        if (admissible(study.space, snapped, existing, study.config.delta_min)) {
            chosen = std::move(snapped);
        } else {
            const auto dir = study.config.direction;
            std::stable_sort(trace.begin(), trace.end(), [dir](const SearchSample& a, const SearchSample& b) {
                if (a.value != b.value) return better(dir, a.value, b.value);
                return a.index < b.index;
            });
            for (const auto& sample : trace) {
                Point candidate = snap(study.space, sample.x);
                if (admissible(study.space, candidate, existing, study.config.delta_min)) {
                    chosen = std::move(candidate);
                    break;
                }
            }
        }
        if (!chosen) {
            throw Error(ErrorKind::NoAdmissiblePoint,
                        "every searched sample lies within delta_min of a support point");
        }
        const double predicted = evaluate(model, *chosen);
        s = {std::move(*chosen), predicted, Rationale::SplineArgmax};
    }

    study.pending = s;
    log_event(study, "suggest", s.x, std::nullopt, s.predicted);
    return s;
}

void record(Study& study, const Point& x, double y) {
    if (!std::isfinite(y)) throw Error(ErrorKind::NonFiniteMeasurement, "measurement is not finite");
    if (study.finished()) {
        throw Error(ErrorKind::StudyFinished, "study is " + std::string(to_string(study.phase)));
    }

    const bool matches_pending = study.pending && same_point(study.space, study.pending->x, x);
    auto queued = study.design_queue.end();
    if (study.phase == Phase::InitialDesign) {
        queued = std::find_if(study.design_queue.begin(), study.design_queue.end(),
                              [&](const Point& q) { return same_point(study.space, q, x); });
    }
    if (!matches_pending && queued == study.design_queue.end()) {
        throw Error(ErrorKind::UnexpectedPoint,
                    "point was neither suggested nor queued; use import for external measurements");
    }

    SupportPoint sp;
    std::optional<double> predicted;
    if (matches_pending) {
        sp.x = study.pending->x;
        sp.kind = study.pending->rationale == Rationale::InitialDesign ? PointKind::Initial
                                                                       : PointKind::Incremental;
        predicted = study.pending->predicted;
    } else {
        sp.x = *queued;
        sp.kind = PointKind::Initial;
    }
    sp.y = y;

    if (queued == study.design_queue.end() && sp.kind == PointKind::Initial) {
        queued = std::find_if(study.design_queue.begin(), study.design_queue.end(),
                              [&](const Point& q) { return same_point(study.space, q, sp.x); });
    }
    if (queued != study.design_queue.end()) study.design_queue.erase(queued);
    if (matches_pending) study.pending.reset();

    study.points.push_back(sp);
    update_top(study, sp);
    log_event(study, "record", sp.x, y, predicted);

    if (study.phase == Phase::InitialDesign && study.design_queue.empty()) study.phase = Phase::Iterating;
    if (predicted && std::abs(y - *predicted) <= study.config.epsilon) {
        study.phase = Phase::Converged;
    } else if (study.points.size() >= study.config.max_evaluations) {
        study.phase = Phase::BudgetExhausted;
    }
}

void import_point(Study& study, const Point& x, double y, const ImportOptions& options) {
    if (!std::isfinite(y)) throw Error(ErrorKind::NonFiniteMeasurement, "measurement is not finite");
    require_point(study, x);
    const auto existing = study.support_coords();
    if (!options.force && !admissible(study.space, x, existing, study.config.delta_min)) {
        throw Error(ErrorKind::Inadmissible, "point lies within delta_min of an existing support point");
    }

    SupportPoint sp{x, y, options.kind, options.force};
    study.points.push_back(sp);
    update_top(study, sp);
    log_event(study, "import", x, y);

    // A measured point covers any queued design point next to it.
    std::erase_if(study.design_queue, [&](const Point& q) {
        return unit_distance(study.space, q, x) < std::max(study.config.delta_min, kSamePoint);
    });
    if (study.phase == Phase::InitialDesign && study.design_queue.empty() && !study.pending) {
        study.phase = Phase::Iterating;
    }
}

Study extend_space(const Study& study, const ParamSpace& new_space) {
    const auto& old_dims = study.space.dims();
    const auto& new_dims = new_space.dims();
    if (old_dims.size() != new_dims.size()) {
        throw Error(ErrorKind::ShrinkNotAllowed, "extended space must keep every dimension");
    }
    for (std::size_t k = 0; k < old_dims.size(); ++k) {
        const auto& o = old_dims[k];
        const auto& n = new_dims[k];
        if (o.name != n.name || o.integer != n.integer) {
            throw Error(ErrorKind::ShrinkNotAllowed, "dimension " + std::to_string(k) +
                                                         " changed name or integrality");
        }
        if (n.min > o.min || n.max < o.max) {
            throw Error(ErrorKind::ShrinkNotAllowed, "dimension '" + n.name + "' would shrink");
        }
    }
    if (study.pending) {
        throw Error(ErrorKind::PendingOutstanding, "record the pending suggestion before extending");
    }
    validate(study.config, new_space);

    Study out = study;
    out.space = new_space;
    std::vector<Point> candidates = initial_design(new_space);
    candidates.insert(candidates.end(), study.design_queue.begin(), study.design_queue.end());
    out.design_queue = uncovered(new_space, candidates, study.support_coords(), study.config.delta_min);
    if (!out.design_queue.empty()) out.phase = Phase::InitialDesign;
    log_event(out, "extend", new_space.upper());
    return out;
}

void run_loop(Study& study, const Evaluator& evaluator, const RunOptions& options) {
    while (!study.finished()) {
        if (!study.pending && study.points.size() >= study.config.max_evaluations) {
            study.phase = Phase::BudgetExhausted;
            if (options.checkpoint) options.checkpoint(study);
            break;
        }
        if (!study.pending) {
            suggest(study);
            if (options.checkpoint) options.checkpoint(study);
        }
        const Point x = study.pending->x;

        std::optional<double> y;
        std::string last_error;
        for (std::size_t attempt = 0; attempt <= options.retries && !y; ++attempt) {
            try {
                y = evaluator(x);
            } catch (const std::exception& e) {
                last_error = e.what();
            }
        }
        if (!y) {
            throw Error(ErrorKind::EvaluatorFailed,
                        "evaluation failed after " + std::to_string(options.retries + 1) +
                            " attempt(s): " + last_error);
        }
        record(study, x, *y);
        if (options.checkpoint) options.checkpoint(study);
    }
}

void check_invariants(const Study& study) {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::InvariantViolation, what); };
    try {
        validate(study.config, study.space);
    } catch (const Error& e) {
        fail(e.what());
    }
    for (std::size_t i = 0; i < study.points.size(); ++i) {
        const auto& p = study.points[i];
        if (!std::isfinite(p.y)) fail("point " + std::to_string(i) + " has a non-finite value");
        if (p.x.size() != study.space.size() || !study.space.contains(p.x)) {
            fail("point " + std::to_string(i) + " lies outside the d-box");
        }
        if (p.forced) continue;
        for (std::size_t j = 0; j < i; ++j) {
            if (!study.points[j].forced &&
                unit_distance(study.space, p.x, study.points[j].x) < study.config.delta_min) {
                fail("points " + std::to_string(j) + " and " + std::to_string(i) +
                     " are closer than delta_min");
            }
        }
    }
    for (const auto& q : study.design_queue) {
        if (q.size() != study.space.size() || !study.space.contains(q)) fail("queued design point outside the d-box");
    }
    if (study.pending) {
        if (!study.space.contains(study.pending->x)) fail("pending point outside the d-box");
        if (study.pending->predicted && !std::isfinite(*study.pending->predicted)) {
            fail("pending prediction is not finite");
        }
    }

    std::optional<SupportPoint> top;
    for (const auto& p : study.points) {
        if (!top || better(study.config.direction, p.y, top->y)) top = p;
    }
    if (top != study.x_top) fail("x_top does not hold the best measured point");
}

}  // namespace splinenas
