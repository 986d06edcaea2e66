#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace splinenas {

/// A configuration in parameter units, one coordinate per dimension.
using Point = std::vector<double>;

struct Dimension {
    std::string name;
    double min = 0.0;
    double max = 1.0;
    bool integer = false;

    bool operator==(const Dimension&) const = default;
};

/// The d-box: named bounded dimensions plus the distance policy.
///
/// With `normalize` set (the default) every dimension is mapped to [0,1]
/// before distances are taken, so wide ranges do not dominate narrow ones.
class ParamSpace {
public:
    ParamSpace() = default;
    /// Throws InvalidSpace when any dimension is malformed or names repeat.
    explicit ParamSpace(std::vector<Dimension> dims, bool normalize = true);

    const std::vector<Dimension>& dims() const noexcept { return dims_; }
    const Dimension& dim(std::size_t k) const { return dims_.at(k); }
    std::size_t size() const noexcept { return dims_.size(); }
    bool normalize() const noexcept { return normalize_; }

    std::optional<std::size_t> index_of(const std::string& name) const;
    std::vector<std::string> names() const;

    bool contains(std::span<const double> p) const;
    /// True when integer dimensions hold whole numbers.
    bool on_grid(std::span<const double> p) const;

    Point lower() const;
    Point upper() const;

    bool operator==(const ParamSpace&) const = default;

private:
    std::vector<Dimension> dims_;
    bool normalize_ = true;
};

/// Half-up rounding used for every integer snap.
double round_half_up(double v);

/// Corner/center design with 2d+3 points (fewer for d < 3 after dedup).
std::vector<Point> initial_design(const ParamSpace& space);

/// Coordinates the spline works in: unit box when the space normalizes,
/// parameter units otherwise. Throws OutOfBox.
std::vector<double> normalize(const ParamSpace& space, std::span<const double> p);

/// Inverse of normalize, then integer snap and clamp.
Point denormalize(const ParamSpace& space, std::span<const double> u);

/// Unit-box coordinates regardless of the normalize flag; no box check.
std::vector<double> to_unit(const ParamSpace& space, std::span<const double> p);

/// Maps unit coordinates to parameter units, snapping integer dims and clamping.
Point from_unit(const ParamSpace& space, std::span<const double> u);

/// Snaps integer dims half-up and clamps every coordinate into the box.
Point snap(const ParamSpace& space, std::span<const double> p);

/// Euclidean distance in unit-box coordinates.
double unit_distance(const ParamSpace& space, std::span<const double> a, std::span<const double> b);

bool admissible(const ParamSpace& space, std::span<const double> candidate,
                std::span<const Point> existing, double delta_min);

}  // namespace splinenas
