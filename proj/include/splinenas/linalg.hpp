#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace splinenas::linalg {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> entries() const noexcept { return data_; }

    std::vector<double> multiply(std::span<const double> x) const;
    Matrix multiply(const Matrix& rhs) const;
    Matrix transpose() const;

    double max_abs() const noexcept;
    bool all_finite() const noexcept;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Result of a column-pivoting Householder QR, A·P = Q·R.
///
/// R occupies the upper triangle of `packed`. Reflector k acts on rows k..m-1
/// as H_k = I - tau_k v_k v_kᵀ, with v_k stored explicitly in `reflectors`.
/// `permutation[j]` is the original column placed at position j.
struct QrFactorization {
    Matrix packed;
    std::vector<std::vector<double>> reflectors;
    std::vector<double> tau;
    std::vector<std::size_t> permutation;
    std::size_t rank = 0;
    double rank_tol = 0.0;

    std::size_t rows() const noexcept { return packed.rows(); }
    std::size_t cols() const noexcept { return packed.cols(); }

    Matrix r() const;
    /// Full m×m orthogonal factor.
    Matrix q() const;
    /// Permutation matrix P with A·P = Q·R.
    Matrix p() const;
    /// Applies Qᵀ to b in place.
    void apply_qt(std::span<double> b) const;
    /// |R[k,k]| for k < min(rows, cols).
    std::vector<double> diagonal() const;
};

inline constexpr double kDefaultRankTol = 1e-12;

QrFactorization qr_decompose(const Matrix& a, double rank_tol = kDefaultRankTol);

/// Least-squares solution of A·x = b. Throws RankDeficient when the estimated
/// rank is below the column count.
std::vector<double> qr_solve(const QrFactorization& f, std::span<const double> b);

struct ResidualCheck {
    bool pass = false;
    double max_residual = 0.0;
};

ResidualCheck verify_residual(const Matrix& a, std::span<const double> x,
                              std::span<const double> b, double tol);

}  // namespace splinenas::linalg
