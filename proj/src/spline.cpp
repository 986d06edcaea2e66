#include "splinenas/spline.hpp"

#include <algorithm>
#include <cmath>

#include "splinenas/error.hpp"
#include "splinenas/linalg.hpp"

namespace splinenas {

std::string_view to_string(PointKind kind) noexcept {
    switch (kind) {
        case PointKind::Initial: return "initial";
        case PointKind::Incremental: return "incremental";
        case PointKind::Imported: return "imported";
    }
    return "imported";
}

PointKind point_kind_from_string(std::string_view s) {
    if (s == "initial") return PointKind::Initial;
    if (s == "incremental") return PointKind::Incremental;
    if (s == "imported") return PointKind::Imported;
    throw Error(ErrorKind::ParseError, "unknown point kind '" + std::string(s) + "'");
}

namespace {

std::vector<double> model_coords(const ParamSpace& space, std::span<const double> x) {
    if (x.size() != space.size()) {
        throw Error(ErrorKind::OutOfBox, "point dimension does not match the space");
    }
    if (!space.normalize()) return {x.begin(), x.end()};
    return to_unit(space, x);
}

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return std::sqrt(s);
}

// Affine-rank check uses a looser relative tolerance than the spline solve:
// nearly coplanar designs should be rejected before they reach the solver.
constexpr double kAffineRankTol = 1e-10;

}  // namespace

SplineModel fit(const ParamSpace& space, std::span<const SupportPoint> points, double residual_tol) {
    const std::size_t d = space.size();
    const std::size_t n = points.size();
    if (n < d + 2) {
        throw Error(ErrorKind::DegenerateGeometry, "need at least " + std::to_string(d + 2) +
                                                       " support points, have " + std::to_string(n));
    }

    SplineModel model;
    model.space_ = space;
    model.centers_.reserve(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(points[i].y)) {
            throw Error(ErrorKind::NonFiniteInput, "support value " + std::to_string(i) + " is not finite");
        }
        model.centers_.push_back(model_coords(space, points[i].x));
        y[i] = points[i].y;
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (unit_distance(space, points[i].x, points[j].x) < kDuplicateDistance) {
                throw Error(ErrorKind::DuplicatePoints, "support points " + std::to_string(i) + " and " +
                                                            std::to_string(j) + " coincide");
            }
        }
    }

    linalg::Matrix affine(n, d + 1);
    for (std::size_t i = 0; i < n; ++i) {
        affine(i, 0) = 1.0;
        for (std::size_t k = 0; k < d; ++k) affine(i, k + 1) = model.centers_[i][k];
    }
    const auto affine_qr = linalg::qr_decompose(affine, kAffineRankTol);
    if (affine_qr.rank < d + 1) {
        throw Error(ErrorKind::DegenerateGeometry, "support points have affine rank " +
                                                       std::to_string(affine_qr.rank) + " < " +
                                                       std::to_string(d + 1));
    }

    const std::size_t m = n + d + 1;
    linalg::Matrix system(m, m);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double r = distance(model.centers_[i], model.centers_[j]);
            system(i, j) = r * r * r;
        }
        for (std::size_t k = 0; k < d + 1; ++k) {
            system(i, n + k) = affine(i, k);
            system(n + k, i) = affine(i, k);
        }
    }
    std::vector<double> rhs(m, 0.0);
    std::copy(y.begin(), y.end(), rhs.begin());

    // Column equilibration: in raw mode the r³ block can exceed the affine
    // block by many orders of magnitude, which would defeat the relative rank
    // tolerance. The residual is still checked on the unscaled system.
    std::vector<double> scale(m, 1.0);
    linalg::Matrix scaled = system;
    for (std::size_t c = 0; c < m; ++c) {
        double peak = 0.0;
        for (std::size_t r = 0; r < m; ++r) peak = std::max(peak, std::abs(system(r, c)));
        if (peak > 0.0) scale[c] = 1.0 / peak;
        for (std::size_t r = 0; r < m; ++r) scaled(r, c) *= scale[c];
    }

    const auto qr = linalg::qr_decompose(scaled);
    std::vector<double> solution;
    try {
        solution = linalg::qr_solve(qr, rhs);
    } catch (const Error& e) {
        throw Error(ErrorKind::NumericallyUnstable, e.what());
    }
    for (std::size_t c = 0; c < m; ++c) solution[c] *= scale[c];
    const auto check = linalg::verify_residual(system, solution, rhs, residual_tol);
    if (!check.pass) {
        throw Error(ErrorKind::NumericallyUnstable,
                    "spline system residual " + std::to_string(check.max_residual) +
                        " exceeds " + std::to_string(residual_tol));
    }

    model.rbf_.assign(solution.begin(), solution.begin() + static_cast<std::ptrdiff_t>(n));
    model.poly_.assign(solution.begin() + static_cast<std::ptrdiff_t>(n), solution.end());
    model.fit_residual_ = check.max_residual;
    const auto diag = qr.diagonal();
    model.condition_hint_ = diag.empty() ? 0.0 : diag[qr.rank - 1];
    return model;
}

double SplineModel::evaluate_model(std::span<const double> u) const {
    double s = poly_[0];
    for (std::size_t k = 0; k < u.size(); ++k) s += poly_[k + 1] * u[k];
    for (std::size_t j = 0; j < centers_.size(); ++j) {
        const double r = distance(u, centers_[j]);
        s += rbf_[j] * r * r * r;
    }
    return s;
}

double evaluate(const SplineModel& model, std::span<const double> x) {
    return model.evaluate_model(model_coords(model.space(), x));
}

Prediction predict(const SplineModel& model, std::span<const double> x) {
    return {evaluate(model, x), !model.space().contains(x)};
}

std::vector<double> evaluate_gradient(const SplineModel& model, std::span<const double> x) {
    const auto& space = model.space();
    const auto u = model_coords(space, x);
    const std::size_t d = u.size();
    std::vector<double> grad(model.poly_coeffs().begin() + 1, model.poly_coeffs().end());
    const auto& centers = model.centers();
    const auto& c = model.rbf_coeffs();
    for (std::size_t j = 0; j < centers.size(); ++j) {
        // d/du |u - x_j|³ = 3 r (u - x_j); vanishes at the center.
        const double r = distance(u, centers[j]);
        const double w = 3.0 * c[j] * r;
        for (std::size_t k = 0; k < d; ++k) grad[k] += w * (u[k] - centers[j][k]);
    }
    if (space.normalize()) {
        for (std::size_t k = 0; k < d; ++k) grad[k] /= space.dim(k).max - space.dim(k).min;
    }
    return grad;
}

}  // namespace splinenas
