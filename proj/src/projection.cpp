#include "splinenas/projection.hpp"

#include <cstdio>
#include <set>
#include <sstream>

#include "splinenas/error.hpp"

namespace splinenas {

namespace {

std::vector<double> axis(const Dimension& d, std::size_t n) {
    std::vector<double> a(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = d.min + (d.max - d.min) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    a.back() = d.max;
    return a;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

ProjectionGrid project(const SplineModel& model, const std::string& free_row, const std::string& free_col,
                       const std::map<std::string, double>& fixed, std::size_t resolution) {
    const auto& space = model.space();
    if (resolution < 2) throw Error(ErrorKind::InvalidConfig, "projection resolution must be at least 2");

    const auto row = space.index_of(free_row);
    const auto col = space.index_of(free_col);
    if (!row || !col || *row == *col) {
        throw Error(ErrorKind::BadDimensionNames, "free dimensions must be two distinct names of the space");
    }
    std::set<std::string> covered = {free_row, free_col};
    Point base(space.size());
    for (const auto& [name, value] : fixed) {
        const auto k = space.index_of(name);
        if (!k) throw Error(ErrorKind::BadDimensionNames, "unknown dimension '" + name + "'");
        if (!covered.insert(name).second) {
            throw Error(ErrorKind::BadDimensionNames, "dimension '" + name + "' is both fixed and free");
        }
        const auto& d = space.dim(*k);
        if (value < d.min || value > d.max) {
            throw Error(ErrorKind::OutOfBox, "fixed value for '" + name + "' lies outside the d-box");
        }
        base[*k] = value;
    }
    if (covered.size() != space.size()) {
        throw Error(ErrorKind::BadDimensionNames, "fixed and free dimensions must cover every dimension");
    }

    ProjectionGrid grid;
    grid.fixed = fixed;
    grid.free_row = free_row;
    grid.free_col = free_col;
    grid.resolution = resolution;
    grid.row_axis = axis(space.dim(*row), resolution);
    grid.col_axis = axis(space.dim(*col), resolution);
    grid.values.resize(resolution * resolution);
    Point x = base;
    for (std::size_t i = 0; i < resolution; ++i) {
        x[*row] = grid.row_axis[i];
        for (std::size_t j = 0; j < resolution; ++j) {
            x[*col] = grid.col_axis[j];
            grid.values[i * resolution + j] = evaluate(model, x);
        }
    }
    return grid;
}

std::string to_csv(const ProjectionGrid& grid) {
    std::ostringstream os;
    os << grid.free_row << "\\" << grid.free_col;
    for (double c : grid.col_axis) os << "," << fmt(c);
    os << "\n";
    for (std::size_t i = 0; i < grid.resolution; ++i) {
        os << fmt(grid.row_axis[i]);
        for (std::size_t j = 0; j < grid.resolution; ++j) os << "," << fmt(grid.at(i, j));
        os << "\n";
    }
    return os.str();
}

}  // namespace splinenas
