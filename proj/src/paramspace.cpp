#include "splinenas/paramspace.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "splinenas/error.hpp"

namespace splinenas {

namespace {

// Slack for coordinates that land a few ulps outside the box after arithmetic.
double box_slack(const Dimension& d) { return 1e-12 * (d.max - d.min); }

bool is_whole(double v) { return std::floor(v) == v; }

}  // namespace

ParamSpace::ParamSpace(std::vector<Dimension> dims, bool normalize)
    : dims_(std::move(dims)), normalize_(normalize) {
    if (dims_.empty()) throw Error(ErrorKind::InvalidSpace, "space needs at least one dimension");
    std::set<std::string> seen;
    for (const auto& d : dims_) {
        if (d.name.empty()) throw Error(ErrorKind::InvalidSpace, "dimension name is empty");
        if (!seen.insert(d.name).second) {
            throw Error(ErrorKind::InvalidSpace, "duplicate dimension name '" + d.name + "'");
        }
        if (!std::isfinite(d.min) || !std::isfinite(d.max) || !(d.min < d.max)) {
            throw Error(ErrorKind::InvalidSpace, "dimension '" + d.name + "' needs finite min < max");
        }
        if (d.integer && (!is_whole(d.min) || !is_whole(d.max) || d.max - d.min < 1.0)) {
            throw Error(ErrorKind::InvalidSpace,
                        "integer dimension '" + d.name + "' needs whole bounds at least 1 apart");
        }
    }
}

std::optional<std::size_t> ParamSpace::index_of(const std::string& name) const {
    for (std::size_t k = 0; k < dims_.size(); ++k) {
        if (dims_[k].name == name) return k;
    }
    return std::nullopt;
}

std::vector<std::string> ParamSpace::names() const {
    std::vector<std::string> out;
    out.reserve(dims_.size());
    for (const auto& d : dims_) out.push_back(d.name);
    return out;
}

bool ParamSpace::contains(std::span<const double> p) const {
    if (p.size() != dims_.size()) return false;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const auto& d = dims_[k];
        if (!std::isfinite(p[k])) return false;
        if (p[k] < d.min - box_slack(d) || p[k] > d.max + box_slack(d)) return false;
    }
    return true;
}

bool ParamSpace::on_grid(std::span<const double> p) const {
    if (p.size() != dims_.size()) return false;
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (dims_[k].integer && !is_whole(p[k])) return false;
    }
    return true;
}

Point ParamSpace::lower() const {
    Point p;
    for (const auto& d : dims_) p.push_back(d.min);
    return p;
}

Point ParamSpace::upper() const {
    Point p;
    for (const auto& d : dims_) p.push_back(d.max);
    return p;
}

double round_half_up(double v) { return std::floor(v + 0.5); }

std::vector<Point> initial_design(const ParamSpace& space) {
    const std::size_t d = space.size();
    const Point lo = space.lower();
    const Point hi = space.upper();

    std::vector<Point> candidates;
    candidates.reserve(2 * d + 3);
    candidates.push_back(hi);
    candidates.push_back(lo);

    Point mid(d);
    for (std::size_t k = 0; k < d; ++k) {
        const double m = (lo[k] + hi[k]) / 2.0;
        mid[k] = space.dim(k).integer ? round_half_up(m) : m;
    }
    candidates.push_back(mid);

    for (std::size_t k = 0; k < d; ++k) {
        Point p = hi;
        p[k] = lo[k];
        candidates.push_back(std::move(p));
    }
    for (std::size_t k = 0; k < d; ++k) {
        Point p = lo;
        p[k] = hi[k];
        candidates.push_back(std::move(p));
    }

    std::vector<Point> design;
    for (auto& c : candidates) {
        if (std::find(design.begin(), design.end(), c) == design.end()) design.push_back(std::move(c));
    }
    return design;
}

std::vector<double> to_unit(const ParamSpace& space, std::span<const double> p) {
    std::vector<double> u(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        const auto& d = space.dim(k);
        u[k] = (p[k] - d.min) / (d.max - d.min);
    }
    return u;
}

Point snap(const ParamSpace& space, std::span<const double> p) {
    Point out(p.begin(), p.end());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto& d = space.dim(k);
        if (d.integer) out[k] = round_half_up(out[k]);
        out[k] = std::clamp(out[k], d.min, d.max);
    }
    return out;
}

Point from_unit(const ParamSpace& space, std::span<const double> u) {
    Point p(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) {
        const auto& d = space.dim(k);
        p[k] = d.min + u[k] * (d.max - d.min);
    }
    return snap(space, p);
}

std::vector<double> normalize(const ParamSpace& space, std::span<const double> p) {
    if (p.size() != space.size()) {
        throw Error(ErrorKind::OutOfBox, "point has " + std::to_string(p.size()) +
                                             " coordinates, space has " + std::to_string(space.size()));
    }
    if (!space.contains(p)) throw Error(ErrorKind::OutOfBox, "point lies outside the d-box");
    if (!space.normalize()) return {p.begin(), p.end()};
    return to_unit(space, p);
}

Point denormalize(const ParamSpace& space, std::span<const double> u) {
    if (!space.normalize()) return snap(space, u);
    return from_unit(space, u);
}

double unit_distance(const ParamSpace& space, std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const auto& d = space.dim(k);
        const double t = (a[k] - b[k]) / (d.max - d.min);
        s += t * t;
    }
    return std::sqrt(s);
}

bool admissible(const ParamSpace& space, std::span<const double> candidate,
                std::span<const Point> existing, double delta_min) {
    return std::all_of(existing.begin(), existing.end(), [&](const Point& e) {
        return unit_distance(space, candidate, e) >= delta_min;
    });
}

}  // namespace splinenas
