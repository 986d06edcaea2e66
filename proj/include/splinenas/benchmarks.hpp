#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "splinenas/driver.hpp"

namespace splinenas {

/// Synthetic objective over unit-box coordinates.
///
/// `optimum` and `optimum_value` describe the global minimizer of the
/// un-negated function; with `negate` set the same point is the maximizer of
/// the returned values and its value is -optimum_value.
///
///   sphere      Σ (u_k - 1/2)²                      min 0 at the center
///   rosenbrock  z = 4.096 u - 2.048,
///               Σ 100 (z_{k+1} - z_k²)² + (1 - z_k)²  min 0 at z = 1
///   rastrigin   z = 10.24 u - 5.12,
///               10 d + Σ z_k² - 10 cos(2π z_k)      min 0 at the center
///   affine      1 + Σ (k+1) u_k                      min 1 at the all-min corner
struct Benchmark {
    std::string name;
    bool negate = false;
    std::size_t dims = 0;
    std::vector<double> optimum;
    double optimum_value = 0.0;
    std::function<double(std::span<const double>)> raw;

    double operator()(std::span<const double> u) const { return negate ? -raw(u) : raw(u); }
};

std::vector<std::string> benchmark_names();

/// Throws UnknownBenchmark.
Benchmark builtin_benchmark(std::string_view name, bool negate, std::size_t dims);

/// Evaluates the benchmark at the unit-box image of a point of `space`.
Evaluator benchmark_evaluator(Benchmark bench, const ParamSpace& space);

}  // namespace splinenas
