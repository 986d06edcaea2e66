#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "splinenas/halton_search.hpp"
#include "splinenas/paramspace.hpp"
#include "splinenas/spline.hpp"

namespace splinenas {

struct StudyConfig {
    Direction direction = Direction::Maximize;
    /// Convergence threshold on |measured - predicted|, objective units.
    double epsilon = 0.5;
    double residual_tol = kDefaultResidualTol;
    /// Minimum unit-box distance between support points.
    double delta_min = 1e-3;
    std::size_t max_evaluations = 50;
    SearchConfig search;

    bool operator==(const StudyConfig&) const = default;
};

/// Throws InvalidConfig.
void validate(const StudyConfig& cfg, const ParamSpace& space);

enum class Phase { InitialDesign, Iterating, Converged, BudgetExhausted };

std::string_view to_string(Phase p) noexcept;
Phase phase_from_string(std::string_view s);

enum class Rationale { InitialDesign, SplineArgmax };

std::string_view to_string(Rationale r) noexcept;
Rationale rationale_from_string(std::string_view s);

struct Suggestion {
    Point x;
    std::optional<double> predicted;
    Rationale rationale = Rationale::InitialDesign;

    bool operator==(const Suggestion&) const = default;
};

/// One entry of the append-only study log. `seq` is a logical clock so that
/// replays produce identical files.
struct HistoryEvent {
    std::uint64_t seq = 0;
    std::string action;
    Point x;
    std::optional<double> y;
    std::optional<double> predicted;

    bool operator==(const HistoryEvent&) const = default;
};

/// Ask-tell optimizer state. Mutated only through the functions below, by a
/// single writer at a time.
struct Study {
    std::string id;
    ParamSpace space;
    StudyConfig config;
    std::vector<SupportPoint> points;
    /// Design points not measured yet, in suggestion order.
    std::vector<Point> design_queue;
    std::optional<Suggestion> pending;
    std::optional<SupportPoint> x_top;
    Phase phase = Phase::InitialDesign;
    std::vector<HistoryEvent> history;

    bool finished() const noexcept {
        return phase == Phase::Converged || phase == Phase::BudgetExhausted;
    }
    std::vector<Point> support_coords() const;

    bool operator==(const Study&) const = default;
};

enum class DesignMode {
    /// Queue the 2d+3 corner/center design.
    Generate,
    /// Start with an empty queue; points arrive through import_point.
    Skip,
};

Study init_study(const ParamSpace& space, const StudyConfig& config, std::string id = "study",
                 DesignMode mode = DesignMode::Generate);

/// Next point to measure: a queued design point, or the snapped argmax of the
/// spline over all support points. Sets `study.pending`.
Suggestion suggest(Study& study);

/// Fits the surrogate on the current points. Throws FitFailed.
SplineModel fit_study(const Study& study);

/// Records the measurement of the pending suggestion or of any queued design
/// point.
void record(Study& study, const Point& x, double y);

struct ImportOptions {
    PointKind kind = PointKind::Imported;
    /// Skip the minimum-distance rule; the point is flagged as forced.
    bool force = false;
};

void import_point(Study& study, const Point& x, double y, const ImportOptions& options = {});

/// Same points over a wider box; queues the new box's design points that no
/// existing point covers.
Study extend_space(const Study& study, const ParamSpace& new_space);

/// Returns the measurement or throws; any exception counts as a failure.
using Evaluator = std::function<double(const Point&)>;

struct RunOptions {
    std::size_t retries = 0;
    /// Called after every suggest and every record, e.g. to persist the study.
    std::function<void(const Study&)> checkpoint;
};

/// Suggest → evaluate → record until converged or out of budget. On evaluator
/// failure throws EvaluatorFailed, leaving the pending suggestion in place.
void run_loop(Study& study, const Evaluator& evaluator, const RunOptions& options = {});

/// Throws InvariantViolation describing the first broken invariant.
void check_invariants(const Study& study);

}  // namespace splinenas
