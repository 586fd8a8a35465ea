#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "psg/cpx.hpp"
#include "psg/semigroup.hpp"

namespace psg {

// Julia-set approximation from the backward chaos game.
class PointCloud {
  public:
    std::vector<cpx> points;
    std::uint64_t generator_seed = 0;
    int burn_in = 0;

    std::size_t count() const { return points.size(); }
    void bounding_box(cpx& lo, cpx& hi) const;
};

struct GridRaster {
    cpx bbox_min, bbox_max;
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> occupancy;  // row-major, y*nx + x
    std::size_t outside_count = 0;

    std::size_t occupied_cells() const;
};

// Random inverse-branch iteration of Eq-style backward self-similarity.
// Starts at a repelling fixed point of f_1 (largest |f_1'| among the fixed
// points) unless an explicit start is given. Deterministic per seed.
PointCloud backward_orbit(const MultiMap& f, std::size_t n_points, int burn_in, std::uint64_t seed,
                          const cpx* start = nullptr);

GridRaster rasterize(const PointCloud& cloud, const cpx& bbox_min, const cpx& bbox_max, int nx, int ny);

// Binary PGM, maxval 255, occupied = 0 (black); row 0 = max imaginary part.
void write_pgm(const GridRaster& r, const std::string& path);
void write_pgm_gray(const std::vector<std::uint8_t>& pixels, int nx, int ny, const std::string& path);

// Escape-time membership test for the filled Julia set K(map).
class FilledSetOracle {
  public:
    FilledSetOracle(Polynomial map, double escape_radius, int max_iter);

    // Smallest radius valid for this map (coefficient bound), with padding.
    static double auto_escape_radius(const Polynomial& map);

    bool inside(const cpx& z) const { return escape_step(z) < 0; }
    // -1 if still bounded after max_iter, else the first step past the radius.
    int escape_step(const cpx& z) const;

    const Polynomial& map() const { return map_; }
    double escape_radius() const { return radius_; }

  private:
    Polynomial map_;
    double radius_;
    int max_iter_;
};

using MembershipFn = std::function<bool(const cpx&)>;

struct InclusionResult {
    bool holds = true;
    cpx witness{0, 0};
};

// Numerical surrogate for A subset B (and compactly-contained variants):
// every boundary sample of A must lie in B together with an 8-point compass
// probe at the given margin.
InclusionResult inclusion_test(const MembershipFn& b_membership, const std::vector<cpx>& a_boundary_samples,
                               double margin);

// Open set U for the open-set-condition checks: a membership predicate with
// caller-supplied boundary and interior samples.
struct OpenSetSpec {
    MembershipFn membership;
    std::vector<cpx> boundary_samples;
    std::vector<cpx> interior_samples;
};

struct OscReport {
    bool forward_invariance = true;
    bool pairwise_disjoint = true;
    bool separating = true;
    cpx invariance_witness{0, 0};
    cpx disjoint_witness{0, 0};
    double closure_gap = 0.0;  // min distance between sampled closure preimages
};

// Open-set condition probes. Forward invariance and open disjointness are
// tested through the membership predicate on sampled preimages; the
// separating variant requires the sampled closure preimages of distinct
// generators to keep a gap above `margin`.
OscReport osc_check(const MultiMap& f, const OpenSetSpec& u, double margin);

}  // namespace psg
