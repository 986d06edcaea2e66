#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

#include "splinenas/paramspace.hpp"
#include "splinenas/spline.hpp"

namespace splinenas {

enum class Direction { Maximize, Minimize };

std::string_view to_string(Direction d) noexcept;
Direction direction_from_string(std::string_view s);

/// True when `a` is strictly better than `b` in direction `dir`.
inline bool better(Direction dir, double a, double b) {
    return dir == Direction::Maximize ? a > b : a < b;
}

/// Number of primes provisioned for Halton bases.
inline constexpr std::size_t kMaxHaltonDims = 64;

/// Radical inverse of `index` (≥ 1) in a prime `base`.
double halton(std::uint64_t index, std::uint32_t base);

/// k-th coordinate is halton(index, k-th prime). Throws DimensionTooLarge.
std::vector<double> halton_point(std::uint64_t index, std::size_t d);

std::uint32_t nth_prime(std::size_t k);

struct SearchConfig {
    std::size_t samples_per_level = 8192;
    std::size_t levels = 6;
    double shrink_factor = 0.5;
    double stall_tolerance = 1e-12;
    std::size_t max_total_samples = 8192 * 6;

    bool operator==(const SearchConfig&) const = default;
};

/// Throws InvalidConfig when any field is out of range.
void validate(const SearchConfig& cfg);

/// Axis-aligned sub-box of the space, in parameter units.
struct Box {
    Point lo;
    Point hi;

    static Box of(const ParamSpace& space) { return {space.lower(), space.upper()}; }
    bool contains(std::span<const double> p) const;
};

struct SearchSample {
    Point x;
    double value = 0.0;
    std::uint64_t index = 0;
};

struct SearchReport {
    Point best_x;
    double best_value = 0.0;
    std::size_t levels_run = 0;
    std::size_t samples_used = 0;
    bool stalled = false;
    /// Incumbent value after each level.
    std::vector<double> level_best;
    /// Box scanned at each level.
    std::vector<Box> level_boxes;
};

/// Hierarchical Halton scan of `box` for the spline's extremum.
///
/// Level 0 covers `box`; each later level covers a box shrunk by
/// `shrink_factor` per side around the incumbent, clipped to `box`. The
/// Halton index keeps counting across levels. When `trace` is non-null every
/// evaluated sample is appended to it.
SearchReport search(const SplineModel& model, const Box& box, Direction direction,
                    const SearchConfig& cfg, std::vector<SearchSample>* trace = nullptr);

}  // namespace splinenas
