#include "psg/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <unordered_set>

#include "psg/errors.hpp"

namespace psg {

LinearFit least_squares(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2) fail(ErrorCode::Validation, "need >= 2 fit points");
    double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    double vx = sxx - sx * sx / n;
    double vy = syy - sy * sy / n;
    double cov = sxy - sx * sy / n;
    LinearFit fit;
    if (vx <= 0.0) fail(ErrorCode::Validation, "degenerate abscissae in fit");
    fit.slope = cov / vx;
    fit.intercept = (sy - fit.slope * sx) / n;
    fit.r_squared = vy > 0.0 ? (cov * cov) / (vx * vy) : 1.0;
    return fit;
}

namespace {

struct CloudFrame {
    cpx lo;
    double diam;
};

CloudFrame frame_of(const PointCloud& cloud) {
    cpx lo, hi;
    cloud.bounding_box(lo, hi);
    double w = hi.real() - lo.real();
    double h = hi.imag() - lo.imag();
    double diam = std::max(w, h);
    if (!(diam > 0.0)) fail(ErrorCode::DegenerateCloud, "all cloud points coincide");
    return {lo, diam};
}

}  // namespace

std::vector<std::int64_t> grid_counts(const PointCloud& cloud, const std::vector<double>& scales) {
    CloudFrame fr = frame_of(cloud);
    std::vector<std::int64_t> counts;
    counts.reserve(scales.size());
    std::unordered_set<std::uint64_t> cells;
    for (double r : scales) {
        cells.clear();
        for (const cpx& p : cloud.points) {
            auto ix = static_cast<std::uint64_t>((p.real() - fr.lo.real()) / r);
            auto iy = static_cast<std::uint64_t>((p.imag() - fr.lo.imag()) / r);
            cells.insert((ix << 32) ^ (iy & 0xffffffffULL));
        }
        counts.push_back(static_cast<std::int64_t>(cells.size()));
    }
    return counts;
}

DimensionFit box_dimension(const PointCloud& cloud, int scale_count) {
    if (cloud.count() < 10'000) fail(ErrorCode::Validation, "cloud too small for a dimension fit");
    if (scale_count < 4) fail(ErrorCode::Validation, "need at least 4 scales");
    CloudFrame fr = frame_of(cloud);

    DimensionFit fit;
    for (int k = 3; k <= 3 + scale_count; ++k) fit.scales.push_back(fr.diam / std::pow(2.0, k));
    fit.counts = grid_counts(cloud, fit.scales);

    // Trustworthy scales need enough boxes for statistics and enough points
    // per box for coverage. Coarser scales carry an O(r * perimeter/area)
    // undercount on full-dimensional sets, so the fit window is the finest
    // four qualifying scales with the very finest dropped.
    std::size_t first_q = fit.scales.size(), last_q = 0;
    for (std::size_t i = 0; i < fit.scales.size(); ++i) {
        bool boxes_ok = fit.counts[i] >= 64;
        bool coverage_ok = static_cast<double>(cloud.count()) >= 8.0 * static_cast<double>(fit.counts[i]);
        if (boxes_ok && coverage_ok) {
            first_q = std::min(first_q, i);
            last_q = std::max(last_q, i);
        }
    }
    std::size_t lo, hi;  // window [lo, hi] inclusive
    if (first_q < fit.scales.size() && last_q > first_q + 1) {
        hi = last_q - 1;  // drop the finest qualifying scale
        lo = hi >= first_q + 3 ? hi - 3 : first_q;
    } else {
        lo = 1;  // fall back to dropping the single coarsest and finest
        hi = fit.scales.size() - 2;
    }

    std::vector<double> xs, ys;
    for (std::size_t i = lo; i <= hi; ++i) {
        xs.push_back(std::log(1.0 / fit.scales[i]));
        ys.push_back(std::log(static_cast<double>(fit.counts[i])));
    }
    LinearFit lf = least_squares(xs, ys);
    fit.dimension = lf.slope;
    fit.r_squared = lf.r_squared;
    return fit;
}

AreaEstimate area_estimate(const PointCloud& cloud, int scale_count, double plateau_tol) {
    if (cloud.count() < 10'000) fail(ErrorCode::Validation, "cloud too small for an area estimate");
    if (scale_count < 4) fail(ErrorCode::Validation, "need at least 4 scales");
    CloudFrame fr = frame_of(cloud);

    AreaEstimate est;
    std::vector<double> scales;
    for (int k = 3; k <= 3 + scale_count; ++k) scales.push_back(fr.diam / std::pow(2.0, k));
    std::vector<std::int64_t> counts = grid_counts(cloud, scales);

    est.cell_sizes = scales;
    for (std::size_t i = 0; i < scales.size(); ++i)
        est.covered_areas.push_back(static_cast<double>(counts[i]) * scales[i] * scales[i]);

    // finest scale with mean per-cell density still >= 4
    std::size_t last_reliable = 0;
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (static_cast<double>(cloud.count()) / static_cast<double>(counts[i]) >= 4.0) last_reliable = i;
    }
    est.extrapolated = est.covered_areas[last_reliable];

    if (last_reliable >= 2) {
        double a = est.covered_areas[last_reliable - 2];
        double b = est.covered_areas[last_reliable - 1];
        double c = est.covered_areas[last_reliable];
        double mx = std::max({a, b, c});
        double mn = std::min({a, b, c});
        est.positive = mn > 0.0 && (mx - mn) / mx <= plateau_tol;
    }
    return est;
}

std::string dimension_csv(const DimensionFit& fit, const AreaEstimate& area) {
    std::string out = "scale,count,covered_area\n";
    char buf[128];
    for (std::size_t i = 0; i < fit.scales.size(); ++i) {
        double covered = i < area.covered_areas.size() ? area.covered_areas[i] : 0.0;
        std::snprintf(buf, sizeof buf, "%.17g,%lld,%.17g\n", fit.scales[i],
                      static_cast<long long>(fit.counts[i]), covered);
        out += buf;
    }
    return out;
}

}  // namespace psg
