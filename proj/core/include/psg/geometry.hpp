#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psg/julia.hpp"

namespace psg {

struct DimensionFit {
    double dimension = 0.0;
    std::vector<double> scales;        // strictly decreasing
    std::vector<std::int64_t> counts;  // nondecreasing as scales decrease
    double r_squared = 0.0;
};

struct AreaEstimate {
    std::vector<double> cell_sizes;
    std::vector<double> covered_areas;  // N_r * r^2
    double extrapolated = 0.0;
    bool positive = false;
};

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
};

LinearFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys);

// Dyadic box counts N_r at r = diam/2^k for k = 3 .. 3+scale_count, with the
// dimension fit over the middle scales (coarsest and finest dropped).
DimensionFit box_dimension(const PointCloud& cloud, int scale_count);

// Covered-area plateau detection: positive when the last three reliable
// scales (mean points per occupied cell >= 4) agree within plateau_tol.
AreaEstimate area_estimate(const PointCloud& cloud, int scale_count, double plateau_tol = 0.2);

// Box counts shared by both estimators.
std::vector<std::int64_t> grid_counts(const PointCloud& cloud, const std::vector<double>& scales);

std::string dimension_csv(const DimensionFit& fit, const AreaEstimate& area);

}  // namespace psg
