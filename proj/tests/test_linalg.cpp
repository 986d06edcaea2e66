#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "splinenas/error.hpp"
#include "splinenas/linalg.hpp"
#include "test_support.hpp"

using namespace splinenas;
using namespace splinenas::linalg;
using splinenas::testing::inf_norm;
using splinenas::testing::max_abs_diff;

namespace {

Matrix reconstruct(const QrFactorization& f) { return f.q().multiply(f.r()).multiply(f.p().transpose()); }

}  // namespace

TEST_CASE("qr_decompose: identity") {
    const auto f = qr_decompose(Matrix::identity(3), 1e-12);
    CHECK(f.rank == 3);
    const auto r = f.r();
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(r(i, j)) == doctest::Approx(i == j ? 1.0 : 0.0));
    }
}

TEST_CASE("qr_decompose: proportional columns have rank 1") {
    const auto f = qr_decompose(Matrix{{1, 2}, {2, 4}}, 1e-10);
    CHECK(f.rank == 1);
}

TEST_CASE("qr_decompose: random 10x10 reconstructs") {
    std::mt19937_64 rng(7);
    const auto a = testing::random_matrix(rng, 10, 10);
    const auto f = qr_decompose(a);
    CHECK(max_abs_diff(reconstruct(f), a) <= 1e-10);
}

TEST_CASE("qr_decompose: rectangular inputs") {
    std::mt19937_64 rng(11);
    for (auto [m, n] : {std::pair{7, 3}, std::pair{3, 7}, std::pair{1, 4}, std::pair{5, 1}}) {
        const auto a = testing::random_matrix(rng, m, n);
        const auto f = qr_decompose(a);
        CHECK(f.rank == std::min<std::size_t>(m, n));
        CHECK(max_abs_diff(reconstruct(f), a) <= 1e-12);
    }
}

TEST_CASE("qr_decompose: rejects non-finite entries") {
    Matrix a{{1, 2}, {3, std::numeric_limits<double>::quiet_NaN()}};
    try {
        qr_decompose(a);
        FAIL("expected NonFiniteInput");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonFiniteInput);
    }
    a(1, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(qr_decompose(a), Error);
}

TEST_CASE("qr_decompose: zero matrix has rank 0") {
    const auto f = qr_decompose(Matrix(3, 3));
    CHECK(f.rank == 0);
}

TEST_CASE("qr_decompose: reconstruction and pivot order on random matrices up to 50x50") {
    std::mt19937_64 rng(2024);
    for (std::size_t n : {1u, 2u, 5u, 13u, 29u, 50u}) {
        const auto a = testing::well_conditioned(rng, n);
        const auto f = qr_decompose(a);
        CHECK(max_abs_diff(reconstruct(f), a) <= 1e-9 * inf_norm(a));
        const auto diag = f.diagonal();
        for (std::size_t k = 0; k + 1 < diag.size(); ++k) CHECK(diag[k] >= diag[k + 1]);
        std::vector<bool> seen(n, false);
        for (auto p : f.permutation) seen.at(p) = true;
        CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));
    }
}

TEST_CASE("qr_decompose: duplicated column never raises the rank") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 3 + trial % 6;
        const std::size_t n = 2 + trial % 5;
        auto a = testing::random_matrix(rng, m, n);
        if (trial % 3 == 0) {  // make it rank deficient first
            for (std::size_t r = 0; r < m; ++r) a(r, n - 1) = 2.0 * a(r, 0);
        }
        Matrix widened(m, n + 1);
        for (std::size_t r = 0; r < m; ++r) {
            for (std::size_t c = 0; c < n; ++c) widened(r, c) = a(r, c);
            widened(r, n) = a(r, trial % n);
        }
        CHECK(qr_decompose(widened).rank <= qr_decompose(a).rank);
    }
}

TEST_CASE("qr_solve: small systems") {
    SUBCASE("identity") {
        const auto x = qr_solve(qr_decompose(Matrix::identity(4)), std::vector<double>{1, 2, 3, 4});
        for (std::size_t i = 0; i < 4; ++i) CHECK(x[i] == doctest::Approx(double(i + 1)).epsilon(1e-14));
    }
    SUBCASE("permutation") {
        const auto x = qr_solve(qr_decompose(Matrix{{0, 1}, {1, 0}}), std::vector<double>{3, 5});
        CHECK(x[0] == doctest::Approx(5.0).epsilon(1e-14));
        CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-14));
    }
    SUBCASE("2x2 hand-solved: 2a+b=5, a+3b=10") {
        const Matrix a{{2, 1}, {1, 3}};
        const std::vector<double> b{5, 10};
        const auto x = qr_solve(qr_decompose(a), b);
        CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(x[1] == doctest::Approx(3.0).epsilon(1e-13));

        const auto ok = verify_residual(a, x, b, 1e-8);
        CHECK(ok.pass);
        CHECK(ok.max_residual <= 1e-12);

        auto bumped = x;
        bumped[1] += 1.0;
        const auto bad = verify_residual(a, bumped, b, 1e-8);
        CHECK_FALSE(bad.pass);
        CHECK(bad.max_residual == doctest::Approx(3.0));
    }
}

TEST_CASE("qr_solve: least squares on an overdetermined system") {
    // Fit y = 1 + 2t through four exact samples.
    const Matrix a{{1, 0}, {1, 1}, {1, 2}, {1, 3}};
    const auto x = qr_solve(qr_decompose(a), std::vector<double>{1, 3, 5, 7});
    CHECK(x[0] == doctest::Approx(1.0));
    CHECK(x[1] == doctest::Approx(2.0));
}

TEST_CASE("qr_solve: rank deficiency is reported") {
    try {
        qr_solve(qr_decompose(Matrix{{1, 2}, {2, 4}}), std::vector<double>{1, 2});
        FAIL("expected RankDeficient");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::RankDeficient);
    }
}

TEST_CASE("solve then verify on random full-rank systems") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + trial % 40;
        const auto a = testing::well_conditioned(rng, n);
        std::vector<double> b(n);
        for (auto& v : b) v = std::uniform_real_distribution<double>(-10, 10)(rng);
        const auto x = qr_solve(qr_decompose(a), b);
        CHECK(verify_residual(a, x, b, 1e-8).pass);
    }
}

TEST_CASE("verify_residual fails on NaN solutions") {
    const auto check = verify_residual(Matrix::identity(2), std::vector<double>{std::nan(""), 1.0},
                                       std::vector<double>{1.0, 1.0}, 1.0);
    CHECK_FALSE(check.pass);
}
