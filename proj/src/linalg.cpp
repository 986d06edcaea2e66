#include "splinenas/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "splinenas/error.hpp"

namespace splinenas::linalg {

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() == 0 ? 0 : rows.begin()->size()) {
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) {
            throw std::invalid_argument("Matrix: ragged initializer");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

std::vector<double> Matrix::multiply(std::span<const double> x) const {
    if (x.size() != cols_) throw std::invalid_argument("Matrix::multiply: size mismatch");
    std::vector<double> out(rows_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * x[c];
        out[r] = acc;
    }
    return out;
}

Matrix Matrix::multiply(const Matrix& rhs) const {
    if (rhs.rows_ != cols_) throw std::invalid_argument("Matrix::multiply: shape mismatch");
    Matrix out(rows_, rhs.cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(r, k);
            if (a == 0.0) continue;
            for (std::size_t c = 0; c < rhs.cols_; ++c) out(r, c) += a * rhs(k, c);
        }
    }
    return out;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

double Matrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix QrFactorization::r() const {
    Matrix out(rows(), cols());
    for (std::size_t i = 0; i < rows(); ++i)
        for (std::size_t j = i; j < cols(); ++j) out(i, j) = packed(i, j);
    return out;
}

void QrFactorization::apply_qt(std::span<double> b) const {
    const std::size_t m = rows();
    for (std::size_t k = 0; k < reflectors.size(); ++k) {
        if (tau[k] == 0.0) continue;
        const auto& v = reflectors[k];
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) s += v[i - k] * b[i];
        s *= tau[k];
        for (std::size_t i = k; i < m; ++i) b[i] -= s * v[i - k];
    }
}

Matrix QrFactorization::q() const {
    // Q = H_0 H_1 ... H_{k-1}; accumulate by applying reflectors right-to-left to I.
    const std::size_t m = rows();
    Matrix out = Matrix::identity(m);
    for (std::size_t kk = reflectors.size(); kk-- > 0;) {
        if (tau[kk] == 0.0) continue;
        const auto& v = reflectors[kk];
        for (std::size_t c = 0; c < m; ++c) {
            double s = 0.0;
            for (std::size_t i = kk; i < m; ++i) s += v[i - kk] * out(i, c);
            s *= tau[kk];
            for (std::size_t i = kk; i < m; ++i) out(i, c) -= s * v[i - kk];
        }
    }
    return out;
}

Matrix QrFactorization::p() const {
    Matrix out(cols(), cols());
    for (std::size_t j = 0; j < cols(); ++j) out(permutation[j], j) = 1.0;
    return out;
}

std::vector<double> QrFactorization::diagonal() const {
    const std::size_t k = std::min(rows(), cols());
    std::vector<double> d(k);
    for (std::size_t i = 0; i < k; ++i) d[i] = std::abs(packed(i, i));
    return d;
}

QrFactorization qr_decompose(const Matrix& a, double rank_tol) {
    if (a.rows() == 0 || a.cols() == 0) {
        throw std::invalid_argument("qr_decompose: empty matrix");
    }
    if (!(rank_tol > 0.0)) throw std::invalid_argument("qr_decompose: rank_tol must be positive");
    if (!a.all_finite()) throw Error(ErrorKind::NonFiniteInput, "matrix has NaN or Inf entries");

    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    const std::size_t steps = std::min(m, n);

    QrFactorization f;
    f.packed = a;
    f.rank_tol = rank_tol;
    f.permutation.resize(n);
    std::iota(f.permutation.begin(), f.permutation.end(), std::size_t{0});
    f.reflectors.reserve(steps);
    f.tau.reserve(steps);

    Matrix& w = f.packed;
    for (std::size_t k = 0; k < steps; ++k) {
        // Pivot: trailing column with the largest remaining norm, first on ties.
        std::size_t pivot = k;
        double best = -1.0;
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += w(i, j) * w(i, j);
            if (s > best) {
                best = s;
                pivot = j;
            }
        }
        if (pivot != k) {
            for (std::size_t i = 0; i < m; ++i) std::swap(w(i, k), w(i, pivot));
            std::swap(f.permutation[k], f.permutation[pivot]);
        }

        std::vector<double> v(m - k);
        for (std::size_t i = k; i < m; ++i) v[i - k] = w(i, k);
        const double norm_x = std::sqrt(best);
        if (norm_x == 0.0) {
            f.reflectors.push_back(std::move(v));
            f.tau.push_back(0.0);
            continue;
        }
        const double alpha = -std::copysign(norm_x, v[0]);
        v[0] -= alpha;
        double vv = 0.0;
        for (double e : v) vv += e * e;
        const double tau = vv == 0.0 ? 0.0 : 2.0 / vv;

        w(k, k) = alpha;
        for (std::size_t i = k + 1; i < m; ++i) w(i, k) = 0.0;
        for (std::size_t j = k + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) s += v[i - k] * w(i, j);
            s *= tau;
            for (std::size_t i = k; i < m; ++i) w(i, j) -= s * v[i - k];
        }
        f.reflectors.push_back(std::move(v));
        f.tau.push_back(tau);
    }

    const auto diag = f.diagonal();
    const double lead = diag.empty() ? 0.0 : diag[0];
    f.rank = 0;
    if (lead > 0.0) {
        for (double d : diag) {
            if (d > rank_tol * lead) ++f.rank;
        }
    }
    return f;
}

std::vector<double> qr_solve(const QrFactorization& f, std::span<const double> b) {
    if (b.size() != f.rows()) throw std::invalid_argument("qr_solve: rhs size mismatch");
    if (f.rank < f.cols()) {
        throw Error(ErrorKind::RankDeficient, "estimated rank " + std::to_string(f.rank) +
                                                  " < " + std::to_string(f.cols()) + " columns");
    }
    std::vector<double> y(b.begin(), b.end());
    f.apply_qt(y);

    const std::size_t n = f.cols();
    std::vector<double> z(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double s = y[i];
        for (std::size_t j = i + 1; j < n; ++j) s -= f.packed(i, j) * z[j];
        z[i] = s / f.packed(i, i);
    }
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) x[f.permutation[j]] = z[j];
    return x;
}

ResidualCheck verify_residual(const Matrix& a, std::span<const double> x,
                              std::span<const double> b, double tol) {
    if (x.size() != a.cols() || b.size() != a.rows()) {
        throw std::invalid_argument("verify_residual: dimension mismatch");
    }
    const auto ax = a.multiply(x);
    ResidualCheck check;
    for (std::size_t i = 0; i < ax.size(); ++i) {
        const double r = std::abs(ax[i] - b[i]);
        if (std::isnan(r)) {
            check.max_residual = r;  // fails the comparison below
            break;
        }
        check.max_residual = std::max(check.max_residual, r);
    }
    check.pass = check.max_residual <= tol;
    return check;
}

}  // namespace splinenas::linalg
