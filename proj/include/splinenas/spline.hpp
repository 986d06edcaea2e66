#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "splinenas/paramspace.hpp"

namespace splinenas {

enum class PointKind { Initial, Incremental, Imported };

std::string_view to_string(PointKind kind) noexcept;
PointKind point_kind_from_string(std::string_view s);

/// A measured configuration.
struct SupportPoint {
    Point x;
    double y = 0.0;
    PointKind kind = PointKind::Initial;
    /// Set when the point entered through a forced import that skipped the
    /// minimum-distance rule (fixture replays).
    bool forced = false;

    bool operator==(const SupportPoint&) const = default;
};

inline constexpr double kDefaultResidualTol = 1e-6;
inline constexpr double kDuplicateDistance = 1e-9;

struct Prediction {
    double value = 0.0;
    bool extrapolated = false;
};

/// Polyharmonic spline s(x) = Σ c_j |x - x_j|³ + v_0 + Σ_k v_k x_k.
///
/// Centers are stored in the space's model coordinates (see normalize()).
/// Immutable once fitted; evaluation is safe from any number of threads.
class SplineModel {
public:
    const ParamSpace& space() const noexcept { return space_; }
    const std::vector<std::vector<double>>& centers() const noexcept { return centers_; }
    const std::vector<double>& rbf_coeffs() const noexcept { return rbf_; }
    /// Constant term first, then one slope per dimension.
    const std::vector<double>& poly_coeffs() const noexcept { return poly_; }
    static constexpr int basis_exponent = 3;
    double fit_residual() const noexcept { return fit_residual_; }
    /// Smallest retained |R[k,k]| of the pivoted QR of the column-scaled
    /// spline system.
    double condition_hint() const noexcept { return condition_hint_; }

    /// Evaluation in model coordinates; no box check.
    double evaluate_model(std::span<const double> u) const;

private:
    friend SplineModel fit(const ParamSpace&, std::span<const SupportPoint>, double);

    ParamSpace space_;
    std::vector<std::vector<double>> centers_;
    std::vector<double> rbf_;
    std::vector<double> poly_;
    double fit_residual_ = 0.0;
    double condition_hint_ = 0.0;
};

/// Solves the augmented system [[A, P], [Pᵀ, 0]] [c; v] = [y; 0].
///
/// Throws DegenerateGeometry when the points do not span the box affinely,
/// DuplicatePoints when two centers coincide, and NumericallyUnstable when
/// the solution fails the residual check at `residual_tol`.
SplineModel fit(const ParamSpace& space, std::span<const SupportPoint> points,
                double residual_tol = kDefaultResidualTol);

double evaluate(const SplineModel& model, std::span<const double> x);

/// Like evaluate(), also flags points outside the d-box.
Prediction predict(const SplineModel& model, std::span<const double> x);

/// ∇s in parameter units.
std::vector<double> evaluate_gradient(const SplineModel& model, std::span<const double> x);

}  // namespace splinenas
