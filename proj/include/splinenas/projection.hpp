#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "splinenas/spline.hpp"

namespace splinenas {

/// Spline values over a 2-D slice of the d-box.
struct ProjectionGrid {
    std::map<std::string, double> fixed;
    std::string free_row;
    std::string free_col;
    std::size_t resolution = 64;
    std::vector<double> row_axis;
    std::vector<double> col_axis;
    /// values[i * resolution + j] at (row_axis[i], col_axis[j]).
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const { return values[i * resolution + j]; }
};

/// Evaluates the spline on an evenly spaced resolution×resolution grid over
/// the two free dimensions, holding the rest at `fixed`. Throws
/// BadDimensionNames unless fixed ∪ free names every dimension exactly once.
ProjectionGrid project(const SplineModel& model, const std::string& free_row, const std::string& free_col,
                       const std::map<std::string, double>& fixed, std::size_t resolution = 64);

/// CSV: header `row\col,<col axis...>`, then one line per row-axis value.
std::string to_csv(const ProjectionGrid& grid);

}  // namespace splinenas
