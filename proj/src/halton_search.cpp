#include "splinenas/halton_search.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "splinenas/error.hpp"

namespace splinenas {

namespace {

// Halton coordinates never reach 0 or 1. Stretching them by this margin per
// side and clamping puts a share of the samples exactly on the level box
// faces, where r³ splines often peak.
constexpr double kFacePad = 1.0 / 8.0;

constexpr std::array<std::uint32_t, kMaxHaltonDims> kPrimes = {
    2,   3,   5,   7,   11,  13,  17,  19,  23,  29,  31,  37,  41,  43,  47,  53,
    59,  61,  67,  71,  73,  79,  83,  89,  97,  101, 103, 107, 109, 113, 127, 131,
    137, 139, 149, 151, 157, 163, 167, 173, 179, 181, 191, 193, 197, 199, 211, 223,
    227, 229, 233, 239, 241, 251, 257, 263, 269, 271, 277, 281, 283, 293, 307, 311};

}  // namespace

std::string_view to_string(Direction d) noexcept {
    return d == Direction::Maximize ? "maximize" : "minimize";
}

Direction direction_from_string(std::string_view s) {
    if (s == "maximize" || s == "max") return Direction::Maximize;
    if (s == "minimize" || s == "min") return Direction::Minimize;
    throw Error(ErrorKind::InvalidConfig, "direction must be maximize or minimize, got '" +
                                              std::string(s) + "'");
}

std::uint32_t nth_prime(std::size_t k) {
    if (k >= kPrimes.size()) {
        throw Error(ErrorKind::DimensionTooLarge,
                    "Halton sequence provisions " + std::to_string(kPrimes.size()) + " dimensions");
    }
    return kPrimes[k];
}

double halton(std::uint64_t index, std::uint32_t base) {
    // Reversed digits as an integer over base^digits; one rounding at the end.
    std::uint64_t numerator = 0;
    std::uint64_t denominator = 1;
    while (index > 0) {
        numerator = numerator * base + index % base;
        denominator *= base;
        index /= base;
    }
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::vector<double> halton_point(std::uint64_t index, std::size_t d) {
    if (d > kPrimes.size()) {
        throw Error(ErrorKind::DimensionTooLarge, "requested " + std::to_string(d) +
                                                      " Halton dimensions, provisioned " +
                                                      std::to_string(kPrimes.size()));
    }
    std::vector<double> u(d);
    for (std::size_t k = 0; k < d; ++k) u[k] = halton(index, kPrimes[k]);
    return u;
}

void validate(const SearchConfig& cfg) {
    if (cfg.samples_per_level == 0 || cfg.levels == 0 || cfg.max_total_samples == 0) {
        throw Error(ErrorKind::InvalidConfig, "search sample counts and levels must be positive");
    }
    if (!(cfg.shrink_factor > 0.0 && cfg.shrink_factor < 1.0)) {
        throw Error(ErrorKind::InvalidConfig, "shrink_factor must lie in (0,1)");
    }
    if (!(cfg.stall_tolerance > 0.0) || !std::isfinite(cfg.stall_tolerance)) {
        throw Error(ErrorKind::InvalidConfig, "stall_tolerance must be positive");
    }
}

bool Box::contains(std::span<const double> p) const {
    if (p.size() != lo.size()) return false;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] < lo[k] || p[k] > hi[k]) return false;
    }
    return true;
}

SearchReport search(const SplineModel& model, const Box& box, Direction direction,
                    const SearchConfig& cfg, std::vector<SearchSample>* trace) {
    validate(cfg);
    const auto& space = model.space();
    const std::size_t d = space.size();
    if (box.lo.size() != d || box.hi.size() != d) {
        throw Error(ErrorKind::OutOfBox, "search box dimension does not match the space");
    }
    bool ordered = true;
    for (std::size_t k = 0; k < d; ++k) ordered = ordered && box.lo[k] <= box.hi[k];
    if (!ordered || !space.contains(box.lo) || !space.contains(box.hi)) {
        throw Error(ErrorKind::OutOfBox, "search box must lie inside the d-box");
    }

    SearchReport report;
    report.best_value = direction == Direction::Maximize ? -std::numeric_limits<double>::infinity()
                                                         : std::numeric_limits<double>::infinity();
    std::uint64_t next_index = 1;
    Box level_box = box;
    Point x(d);

    for (std::size_t level = 0; level < cfg.levels; ++level) {
        const std::size_t remaining = cfg.max_total_samples - report.samples_used;
        const std::size_t count = std::min(cfg.samples_per_level, remaining);
        if (count == 0) break;

        const double before = report.best_value;
        for (std::size_t i = 0; i < count; ++i, ++next_index) {
            for (std::size_t k = 0; k < d; ++k) {
                const double u = (1.0 + 2.0 * kFacePad) * halton(next_index, kPrimes.at(k)) - kFacePad;
                x[k] = level_box.lo[k] + std::clamp(u, 0.0, 1.0) * (level_box.hi[k] - level_box.lo[k]);
            }
            const double v = evaluate(model, x);
            if (trace) trace->push_back({x, v, next_index});
            if (better(direction, v, report.best_value)) {
                report.best_value = v;
                report.best_x = x;
            }
        }
        report.samples_used += count;
        report.levels_run += 1;
        report.level_best.push_back(report.best_value);
        report.level_boxes.push_back(level_box);

        if (level > 0 && std::abs(report.best_value - before) <= cfg.stall_tolerance) {
            report.stalled = true;
            break;
        }

        const double scale = std::pow(cfg.shrink_factor, static_cast<double>(level + 1));
        for (std::size_t k = 0; k < d; ++k) {
            const double half = 0.5 * scale * (box.hi[k] - box.lo[k]);
            level_box.lo[k] = std::max(box.lo[k], report.best_x[k] - half);
            level_box.hi[k] = std::min(box.hi[k], report.best_x[k] + half);
        }
    }
    return report;
}

}  // namespace splinenas
