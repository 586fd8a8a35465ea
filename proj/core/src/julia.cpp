#include "psg/julia.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "psg/errors.hpp"
#include "psg/hashgrid.hpp"
#include "psg/rng.hpp"

namespace psg {

void PointCloud::bounding_box(cpx& lo, cpx& hi) const {
    double x0 = std::numeric_limits<double>::infinity(), y0 = x0;
    double x1 = -x0, y1 = -x0;
    for (const cpx& p : points) {
        x0 = std::min(x0, p.real());
        y0 = std::min(y0, p.imag());
        x1 = std::max(x1, p.real());
        y1 = std::max(y1, p.imag());
    }
    lo = cpx(x0, y0);
    hi = cpx(x1, y1);
}

std::size_t GridRaster::occupied_cells() const {
    std::size_t n = 0;
    for (std::uint8_t b : occupancy) n += b;
    return n;
}

double cloud_resolution(const std::vector<cpx>& pts, std::size_t sample) {
    if (pts.size() < 2) return 0.0;
    PointCloud tmp;
    tmp.points = pts;
    cpx lo, hi;
    tmp.bounding_box(lo, hi);
    double diam = std::max(hi.real() - lo.real(), hi.imag() - lo.imag());
    if (diam <= 0.0) return 0.0;

    double cell = std::max(diam / std::sqrt(static_cast<double>(pts.size())), 1e-12 * diam);
    HashGrid grid(pts, cell);
    std::vector<double> dists;
    std::size_t stride = std::max<std::size_t>(1, pts.size() / sample);
    for (std::size_t i = 0; i < pts.size(); i += stride)
        dists.push_back(grid.nearest_distance(pts[i], std::numeric_limits<double>::infinity(), i));
    std::sort(dists.begin(), dists.end());
    return dists[dists.size() / 2];
}

PointCloud backward_orbit(const MultiMap& f, std::size_t n_points, int burn_in, std::uint64_t seed,
                          const cpx* start) {
    cpx z;
    if (start != nullptr) {
        z = *start;
    } else {
        // Fixed points of f_1; take the one with the largest |f_1'|.
        const Polynomial& g1 = f.gen(1);
        std::vector<cpx> fc = g1.coeffs();
        fc[1] -= 1.0;
        Polynomial fixeq(std::move(fc));
        if (fixeq.degree() < 1)
            fail(ErrorCode::NoRepellingFixedPoint, "f_1(z) - z is constant");
        std::vector<cpx> fixed = poly_roots(fixeq);
        double best = -1.0;
        for (const cpx& p : fixed) {
            double d = std::abs(g1.eval_derivative(p));
            if (d > best) {
                best = d;
                z = p;
            }
        }
        if (best <= 1.0)
            fail(ErrorCode::NoRepellingFixedPoint, "all fixed points of f_1 have |f_1'| <= 1");
    }

    Rng rng(seed);
    PointCloud cloud;
    cloud.generator_seed = seed;
    cloud.burn_in = burn_in;
    cloud.points.reserve(n_points);

    std::size_t total = n_points + static_cast<std::size_t>(burn_in);
    for (std::size_t step = 0; step < total; ++step) {
        int j = 1 + static_cast<int>(rng.next_below(static_cast<std::uint32_t>(f.count())));
        std::vector<cpx> roots = inverse_branches(f, j, z);
        z = roots[rng.next_below(static_cast<std::uint32_t>(roots.size()))];
        if (step >= static_cast<std::size_t>(burn_in)) cloud.points.push_back(z);
    }
    return cloud;
}

GridRaster rasterize(const PointCloud& cloud, const cpx& bbox_min, const cpx& bbox_max, int nx, int ny) {
    if (nx < 2 || ny < 2) fail(ErrorCode::Validation, "resolution must be at least 2x2");
    if (!(bbox_max.real() > bbox_min.real()) || !(bbox_max.imag() > bbox_min.imag()))
        fail(ErrorCode::Validation, "degenerate bounding box");

    GridRaster r;
    r.bbox_min = bbox_min;
    r.bbox_max = bbox_max;
    r.nx = nx;
    r.ny = ny;
    r.occupancy.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0);

    double wx = bbox_max.real() - bbox_min.real();
    double wy = bbox_max.imag() - bbox_min.imag();
    for (const cpx& p : cloud.points) {
        double fx = (p.real() - bbox_min.real()) / wx;
        double fy = (p.imag() - bbox_min.imag()) / wy;
        if (fx < 0.0 || fx > 1.0 || fy < 0.0 || fy > 1.0) {
            ++r.outside_count;
            continue;
        }
        int ix = std::min(nx - 1, static_cast<int>(fx * nx));
        int iy = std::min(ny - 1, static_cast<int>(fy * ny));
        r.occupancy[static_cast<std::size_t>(iy) * nx + ix] = 1;
    }
    return r;
}

FilledSetOracle::FilledSetOracle(Polynomial map, double escape_radius, int max_iter)
    : map_(std::move(map)), radius_(escape_radius), max_iter_(max_iter) {
    if (map_.degree() < 2) fail(ErrorCode::Validation, "filled set oracle needs degree >= 2");
    if (max_iter_ < 1) fail(ErrorCode::Validation, "max_iter must be >= 1");
    // Coefficient bound: |z| > R implies |map(z)| > 2|z|.
    double lead = std::abs(map_.leading());
    double tail = map_.lower_coeff_abs_sum();
    double r = radius_;
    bool ok = r >= 1.0 && lead * std::pow(r, map_.degree()) - tail * std::pow(r, map_.degree() - 1) > 2.0 * r;
    if (!ok) fail(ErrorCode::Validation, "escape radius too small for the coefficient bound");
}

double FilledSetOracle::auto_escape_radius(const Polynomial& map) {
    double lead = std::abs(map.leading());
    int d = map.degree();
    double r = 1.0;
    // grow until the construction bound holds, then pad
    for (int i = 0; i < 4096; ++i) {
        double tail = map.lower_coeff_abs_sum();
        if (lead * std::pow(r, d) - tail * std::pow(r, d - 1) > 2.0 * r) return 1.25 * r;
        r *= 1.25;
    }
    fail(ErrorCode::Validation, "could not find a valid escape radius");
}

int FilledSetOracle::escape_step(const cpx& z) const {
    cpx w = z;
    for (int k = 0; k < max_iter_; ++k) {
        if (std::abs(w) > radius_) return k;
        w = map_.eval(w);
    }
    return std::abs(w) > radius_ ? max_iter_ : -1;
}

InclusionResult inclusion_test(const MembershipFn& b_membership, const std::vector<cpx>& a_boundary_samples,
                               double margin) {
    static const double kCos[8] = {1, 0.7071067811865476, 0, -0.7071067811865476, -1, -0.7071067811865476, 0, 0.7071067811865476};
    static const double kSin[8] = {0, 0.7071067811865476, 1, 0.7071067811865476, 0, -0.7071067811865476, -1, -0.7071067811865476};
    for (const cpx& s : a_boundary_samples) {
        if (!b_membership(s)) return {false, s};
        for (int k = 0; k < 8; ++k) {
            cpx probe = s + margin * cpx(kCos[k], kSin[k]);
            if (!b_membership(probe)) return {false, probe};
        }
    }
    return {true, cpx(0, 0)};
}

OscReport osc_check(const MultiMap& f, const OpenSetSpec& u, double margin) {
    OscReport rep;

    std::vector<cpx> in_samples;
    for (const cpx& s : u.interior_samples)
        if (u.membership(s)) in_samples.push_back(s);

    // Forward invariance: preimages of interior samples stay in U.
    std::vector<std::vector<cpx>> open_pre(static_cast<std::size_t>(f.count()));
    for (int j = 1; j <= f.count(); ++j) {
        for (const cpx& s : in_samples) {
            for (const cpx& z : inverse_branches(f, j, s)) {
                open_pre[static_cast<std::size_t>(j - 1)].push_back(z);
                if (!u.membership(z) && rep.forward_invariance) {
                    rep.forward_invariance = false;
                    rep.invariance_witness = z;
                }
            }
        }
    }

    // Open disjointness: a witness z in f_i^{-1}(U) with f_j(z) also in U.
    for (int i = 1; i <= f.count() && rep.pairwise_disjoint; ++i) {
        for (const cpx& z : open_pre[static_cast<std::size_t>(i - 1)]) {
            for (int j = 1; j <= f.count(); ++j) {
                if (j == i) continue;
                if (u.membership(f.gen(j).eval(z))) {
                    rep.pairwise_disjoint = false;
                    rep.disjoint_witness = z;
                    break;
                }
            }
            if (!rep.pairwise_disjoint) break;
        }
    }

    // Separating variant: closure preimages of distinct generators must keep
    // a gap above the margin. Closure sampled as interior + boundary samples;
    // the grid query is capped at 4x the margin, which is all the verdict
    // needs.
    std::vector<cpx> closure_samples = in_samples;
    closure_samples.insert(closure_samples.end(), u.boundary_samples.begin(), u.boundary_samples.end());
    std::vector<std::vector<cpx>> closed_pre(static_cast<std::size_t>(f.count()));
    for (int j = 1; j <= f.count(); ++j)
        for (const cpx& s : closure_samples)
            for (const cpx& z : inverse_branches(f, j, s)) closed_pre[static_cast<std::size_t>(j - 1)].push_back(z);

    double gap = std::numeric_limits<double>::infinity();
    double cap = 4.0 * margin;
    for (int i = 1; i <= f.count(); ++i) {
        for (int j = i + 1; j <= f.count(); ++j) {
            const auto& a = closed_pre[static_cast<std::size_t>(i - 1)];
            const auto& b = closed_pre[static_cast<std::size_t>(j - 1)];
            if (a.empty() || b.empty()) continue;
            HashGrid grid(b, std::max(margin, 1e-12));
            for (const cpx& z : a) gap = std::min(gap, grid.nearest_distance(z, cap));
        }
    }
    rep.closure_gap = std::min(gap, cap);
    rep.separating = rep.pairwise_disjoint && gap > margin;
    return rep;
}

void write_pgm(const GridRaster& r, const std::string& path) {
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(r.nx) * static_cast<std::size_t>(r.ny));
    // row 0 of the file is the top of the image, i.e. max imaginary part
    for (int y = 0; y < r.ny; ++y) {
        for (int x = 0; x < r.nx; ++x) {
            std::uint8_t occ = r.occupancy[static_cast<std::size_t>(r.ny - 1 - y) * r.nx + x];
            pixels[static_cast<std::size_t>(y) * r.nx + x] = occ ? 0 : 255;
        }
    }
    write_pgm_gray(pixels, r.nx, r.ny, path);
}

void write_pgm_gray(const std::vector<std::uint8_t>& pixels, int nx, int ny, const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (fp == nullptr) fail(ErrorCode::Validation, "cannot open output file " + path);
    std::fprintf(fp, "P5\n%d %d\n255\n", nx, ny);
    std::fwrite(pixels.data(), 1, pixels.size(), fp);
    std::fclose(fp);
}

}  // namespace psg
