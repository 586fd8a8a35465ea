#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psg/cpx.hpp"
#include "psg/semigroup.hpp"

namespace psg {

struct EscapeConfig {
    std::vector<double> probabilities;
    double escape_radius = 2.0;
    int max_iter = 200;
    int trials = 1000;
    std::uint64_t seed = 1;

    void validate(const MultiMap& f) const;
};

struct TInfinityEstimate {
    double value = 0.0;       // escape fraction in [0,1]
    double std_error = 0.0;   // sqrt(p(1-p)/trials)
    int undecided = 0;        // neither escaped nor entered the certified trap
    int trials = 0;
};

// Largest radius r with max_j sum_k |c_{j,k}| r^k < r: orbits inside stay
// inside forever, certifying non-escape. Zero when no such radius exists.
double certified_trap_radius(const MultiMap& f, double escape_radius);

// Monte-Carlo escape probability of the random composition orbit from z.
// Stream index separates parallel pixels; estimates are pure functions of
// (cfg, stream, z).
TInfinityEstimate t_infinity(const MultiMap& f, const EscapeConfig& cfg, const cpx& z,
                             std::uint64_t stream = 0);

struct ColiseumRaster {
    cpx bbox_min, bbox_max;
    int nx = 0, ny = 0;
    std::vector<std::uint8_t> pixels;  // row 0 = top, value = round(255 * T_inf)
};

ColiseumRaster coliseum_raster(const MultiMap& f, const EscapeConfig& cfg, const cpx& bbox_min,
                               const cpx& bbox_max, int nx, int ny);

void write_coliseum_pgm(const ColiseumRaster& r, const std::string& path);

}  // namespace psg
