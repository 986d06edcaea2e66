#include "splinenas/benchmarks.hpp"

#include <cmath>
#include <numbers>

#include "splinenas/error.hpp"

namespace splinenas {

namespace {

double sphere(std::span<const double> u) {
    double s = 0.0;
    for (double v : u) s += (v - 0.5) * (v - 0.5);
    return s;
}

constexpr double kRosenbrockHalfWidth = 2.048;

double rosenbrock(std::span<const double> u) {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < u.size(); ++k) {
        const double z = 2.0 * kRosenbrockHalfWidth * u[k] - kRosenbrockHalfWidth;
        const double zn = 2.0 * kRosenbrockHalfWidth * u[k + 1] - kRosenbrockHalfWidth;
        s += 100.0 * (zn - z * z) * (zn - z * z) + (1.0 - z) * (1.0 - z);
    }
    return s;
}

constexpr double kRastriginHalfWidth = 5.12;

double rastrigin(std::span<const double> u) {
    double s = 10.0 * static_cast<double>(u.size());
    for (double v : u) {
        const double z = 2.0 * kRastriginHalfWidth * v - kRastriginHalfWidth;
        s += z * z - 10.0 * std::cos(2.0 * std::numbers::pi * z);
    }
    return s;
}

double affine(std::span<const double> u) {
    double s = 1.0;
    for (std::size_t k = 0; k < u.size(); ++k) s += static_cast<double>(k + 1) * u[k];
    return s;
}

}  // namespace

std::vector<std::string> benchmark_names() { return {"sphere", "rosenbrock", "rastrigin", "affine"}; }

Benchmark builtin_benchmark(std::string_view name, bool negate, std::size_t dims) {
    if (dims == 0) throw Error(ErrorKind::InvalidConfig, "benchmark needs at least one dimension");
    Benchmark b;
    b.name = std::string(name);
    b.negate = negate;
    b.dims = dims;
    if (name == "sphere") {
        b.raw = sphere;
        b.optimum.assign(dims, 0.5);
    } else if (name == "rosenbrock") {
        b.raw = rosenbrock;
        b.optimum.assign(dims, (1.0 + kRosenbrockHalfWidth) / (2.0 * kRosenbrockHalfWidth));
    } else if (name == "rastrigin") {
        b.raw = rastrigin;
        b.optimum.assign(dims, 0.5);
    } else if (name == "affine") {
        b.raw = affine;
        b.optimum.assign(dims, 0.0);
        b.optimum_value = 1.0;
    } else {
        throw Error(ErrorKind::UnknownBenchmark, "no benchmark named '" + std::string(name) + "'");
    }
    if (negate) b.optimum_value = -b.optimum_value;
    return b;
}

Evaluator benchmark_evaluator(Benchmark bench, const ParamSpace& space) {
    return [bench = std::move(bench), space](const Point& x) { return bench(to_unit(space, x)); };
}

}  // namespace splinenas
