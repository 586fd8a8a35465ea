#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "psg/cpx.hpp"
#include "psg/semigroup.hpp"

namespace psg {

struct PressureSample {
    double t = 0.0;
    int level = 0;
    double value = 0.0;
    std::int64_t term_count = 0;
};

struct BowenResult {
    double delta = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    int level = 0;
    double residual = 0.0;
};

// Log chain derivatives of all depth-n preimages of one or more base points;
// the level-n pressure at any t is a log-sum-exp over this list (averaged
// over base points), so one tree serves every t.
class PreimageTree {
  public:
    PreimageTree(const MultiMap& f, const cpx& z0, int level, Metric metric = Metric::Euclidean,
                 std::int64_t term_budget = 10'000'000);
    PreimageTree(const MultiMap& f, const std::vector<cpx>& bases, int level,
                 Metric metric = Metric::Euclidean, std::int64_t term_budget = 10'000'000);

    double pressure(double t) const;
    std::int64_t term_count() const { return static_cast<std::int64_t>(log_chain_.size()); }
    int level() const { return level_; }

  private:
    std::vector<double> log_chain_;
    int level_;
    int base_count_ = 1;
};

// P_n(t): preimage (Poincare) sum approximant of the topological pressure of
// -t log |f'| at level n, base point z0.
PressureSample pressure_approx(const MultiMap& f, double t, int level, const cpx& z0,
                               Metric metric = Metric::Euclidean);

// Bowen parameter: bisection for the zero of t -> P_n(t).
BowenResult bowen_parameter(const MultiMap& f, int level, double tol, const cpx& z0,
                            Metric metric = Metric::Euclidean);

// Default variant: preimage trees pooled over a handful of chaos-game sample
// points (fixed internal seed). A single extreme base point biases the
// level-n zero by O(1/n) with a sign picked by its position in J; pooling
// centers the bias at the backward-orbit average.
BowenResult bowen_parameter(const MultiMap& f, int level, double tol);

// Repelling fixed point of f_1 (the chaos-game start).
cpx pressure_base_point(const MultiMap& f);

// The pooled default base points (chaos-game samples, deterministic).
std::vector<cpx> pressure_base_pool(const MultiMap& f, int count = 8, std::uint64_t seed = 0xb0113);

// Unique t >= 0 with sum r_i^{-t} = 1 (similarity dimension of the inverse
// similitudes). Every ratio must exceed 1.
double moran_delta(const std::vector<double>& ratios);

// log(d1+d2) / ((d1 log d1 + d2 log d2)/(d1+d2)).
double d1d2_lower_bound(int d1, int d2);

// CSV rows "t,n,pressure" over a t-grid at several levels.
std::string pressure_grid_csv(const MultiMap& f, const std::vector<double>& ts, const std::vector<int>& levels,
                              const cpx& z0, Metric metric = Metric::Euclidean);

}  // namespace psg
