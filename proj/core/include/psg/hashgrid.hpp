#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "psg/cpx.hpp"

namespace psg {

// Uniform-cell spatial hash over a point set; nearest-distance queries for
// cloud resolution estimates, overlap detection and dedup.
class HashGrid {
  public:
    HashGrid(const std::vector<cpx>& pts, double cell) : pts_(pts), cell_(cell) {
        for (std::size_t i = 0; i < pts.size(); ++i) cells_[key(pts[i])].push_back(i);
    }

    static constexpr std::size_t kNoExclude = std::numeric_limits<std::size_t>::max();

    // Distance from z to the nearest stored point, searching rings of cells
    // outward; returns +inf if farther than max_radius.
    double nearest_distance(const cpx& z, double max_radius = std::numeric_limits<double>::infinity(),
                            std::size_t exclude_index = kNoExclude) const {
        double best = std::numeric_limits<double>::infinity();
        std::int64_t cx = coord(z.real()), cy = coord(z.imag());
        int max_ring = max_radius == std::numeric_limits<double>::infinity()
                           ? 96
                           : static_cast<int>(max_radius / cell_) + 2;
        for (int ring = 0; ring <= max_ring; ++ring) {
            if (best < (ring - 1) * cell_) break;  // no closer point possible
            for (std::int64_t dx = -ring; dx <= ring; ++dx) {
                for (std::int64_t dy = -ring; dy <= ring; ++dy) {
                    if (std::max(std::abs(dx), std::abs(dy)) != ring) continue;
                    auto it = cells_.find(pack(cx + dx, cy + dy));
                    if (it == cells_.end()) continue;
                    for (std::size_t i : it->second) {
                        if (i == exclude_index) continue;
                        best = std::min(best, std::abs(z - pts_[i]));
                    }
                }
            }
        }
        return best;
    }

    bool has_within(const cpx& z, double r) const { return nearest_distance(z, r) <= r; }

  private:
    std::int64_t coord(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
    std::uint64_t pack(std::int64_t x, std::int64_t y) const {
        return (static_cast<std::uint64_t>(x) << 32) ^ (static_cast<std::uint64_t>(y) & 0xffffffffULL);
    }
    std::uint64_t key(const cpx& z) const { return pack(coord(z.real()), coord(z.imag())); }

    const std::vector<cpx>& pts_;
    double cell_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

// Median nearest-neighbor spacing of a sample of the cloud.
double cloud_resolution(const std::vector<cpx>& pts, std::size_t sample = 256);

}  // namespace psg
