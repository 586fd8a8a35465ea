#pragma once

#include <optional>
#include <string>
#include <vector>

#include "psg/cpx.hpp"
#include "psg/julia.hpp"
#include "psg/semigroup.hpp"

namespace psg {

enum class PerturbationKind { Conjugation, Monomial, DerivativePerturb, Translation };

// One-complex-parameter family around a base multimap: exactly one generator
// depends on the parameter. At lambda0 the family reproduces the base.
class PerturbationFamily {
  public:
    // g_index + lambda z^exponent
    static PerturbationFamily monomial(MultiMap base, int index, int exponent, cpx lambda0 = cpx(0, 0));
    // g_index + lambda g_index'
    static PerturbationFamily derivative_perturb(MultiMap base, int index, cpx lambda0 = cpx(0, 0));
    // alpha_l o g_index o alpha_l^{-1} with affine alpha_l(z) = a(l) z + b(l),
    // coefficients affine in l, alpha at lambda0 = Id.
    static PerturbationFamily conjugation(MultiMap base, int index, cpx a1, cpx b1, cpx lambda0 = cpx(0, 0));
    // The (z - l)^d + l style family: conjugation by z + (l - lambda0).
    static PerturbationFamily translation(MultiMap base, int index, cpx lambda0 = cpx(0, 0));

    const MultiMap& base() const { return base_; }
    MultiMap& base() { return base_; }
    PerturbationKind kind() const { return kind_; }
    int index() const { return index_; }
    cpx lambda0() const { return lambda0_; }

    // f_{l,j}; the unperturbed generators are returned by reference cost.
    Polynomial generator_at(const cpx& lambda, int j) const;
    // d f_{l,index} / d l at lambda0, evaluated at z.
    cpx dlambda(const cpx& z) const;

  private:
    PerturbationFamily(MultiMap base, PerturbationKind kind, int index, cpx lambda0);

    MultiMap base_;
    PerturbationKind kind_;
    int index_;
    int exponent_ = 0;
    cpx conj_a1_{0, 0}, conj_b1_{0, 0};  // alpha_l(z) = (1 + (l-l0) a1) z + (l-l0) b1
    cpx lambda0_;
};

struct ContinuationOptions {
    int path_steps = 64;
    double collision_threshold = 1e-8;
    int newton_max_iter = 50;
};

// h_l(w, z_w): the repelling periodic point of f_{l,period} continued from
// lambda0 along a straight path, pulled back through the preperiod with
// nearest-branch tracking. seed, when given, fixes the lambda0 point z_w.
cpx conjugacy_point(const PerturbationFamily& fam, const EPWord& w, const cpx& lambda,
                    const ContinuationOptions& opts = {}, const std::optional<cpx>& seed = std::nullopt);

// The lambda0 point z_w itself.
cpx canonical_point(const PerturbationFamily& fam, const EPWord& w,
                    const std::optional<cpx>& seed = std::nullopt);

struct ConjugacyDerivative {
    cpx value{0, 0};
    int terms_used = 0;
    double tail_bound = 0.0;
    bool heuristic_constants = true;
};

// Partial sum of the parameter-derivative series of the conjugacy point:
//   sum_n (1/f_{l0,w|n}'(z)) * (-d f_{l,w_n}/dl (f_{l0,w|n-1}(z)))
// with the per-kind simplifications applied. Requires an expanding estimate
// on the base for the geometric tail bound.
ConjugacyDerivative dh_series(const PerturbationFamily& fam, const EPWord& w, int terms,
                              const std::optional<cpx>& at = std::nullopt);

struct OverlapPoint {
    cpx z{0, 0};
    int i = 0, j = 0;
    EPWord word_i;  // i alpha_ij^inf
    EPWord word_j;  // j alpha_ji^inf
    int alpha_ij = 0, alpha_ji = 0;
};

// Candidate points of f_i^{-1}(J) intersect f_j^{-1}(J) from cloud preimages,
// deduplicated at spacing tol, tagged with the nearest single-generator
// Julia set of the forward images.
std::vector<OverlapPoint> find_overlaps(const MultiMap& f, const PointCloud& cloud, double tol);

struct OverlapGradient {
    OverlapPoint overlap;
    cpx gradient{0, 0};
    double tail_bound = 0.0;
};

struct AtcReport {
    int overlap_count = 0;
    double min_grad_modulus = 0.0;
    bool all_nonzero = true;
    bool cond_i = true;
    bool cond_ii = true;
    bool cond_iii = true;
    bool heuristic_constants = true;
    int expanding_level = 0;  // sampling level behind the (C, eta) estimate
    std::vector<OverlapGradient> gradients;

    std::string to_text() const;
};

// Certifies the nonvanishing of the conjugacy-derivative difference at every
// detected overlap, plus the structural conditions on the base system.
// Throws Inconclusive when a gradient modulus does not clear its tail bound.
AtcReport atc_certify(const PerturbationFamily& fam, const PointCloud& cloud, double tol, int terms);

// Affine-system certification: for each overlap (i, j) the system is
// translated so the fixed point of g_i sits at 0 and the generator g_i is
// perturbed by lambda z. The gradient then has the closed form -z0/a_i.
struct AffineAtcReport {
    AtcReport report;
    std::vector<cpx> expected_gradients;  // -z0/a_i per overlap
};
AffineAtcReport atc_certify_affine(const MultiMap& f, const PointCloud& cloud, double tol, int terms);

struct GridSpec {
    cpx center{0, 0};
    double radius = 0.05;
    int n = 64;
};

struct TcProbeRow {
    double r = 0.0;
    double measure_fraction = 0.0;
    std::int64_t covering_count = 0;
};

struct TcProbeResult {
    std::vector<TcProbeRow> rows;
    double measure_exponent = 0.0;   // TC predicts ~2
    double covering_exponent = 0.0;  // STC predicts ~2-d = 0 for d = 2
    int skipped_nodes = 0;
    int valid_nodes = 0;

    std::string to_csv() const;
};

// Evaluates Delta(l) = h_l(w1) - h_l(w2) over a parameter grid and measures
// the sublevel sets {|Delta| <= r}.
TcProbeResult tc_scaling_probe(const PerturbationFamily& fam, const EPWord& w1, const EPWord& w2,
                               const GridSpec& grid, const std::vector<double>& radii,
                               const std::optional<cpx>& seed = std::nullopt,
                               const ContinuationOptions& opts = {});

}  // namespace psg
