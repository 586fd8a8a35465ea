#include "psg/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "psg/errors.hpp"
#include "psg/julia.hpp"
#include "psg/parallel.hpp"

namespace psg {

namespace {

// Collapse multiple roots: expanding semigroups have no critical points on
// the Julia set, so a genuine cluster only appears on bad input.
void dedupe_roots(std::vector<cpx>& roots) {
    std::sort(roots.begin(), roots.end(), [](const cpx& a, const cpx& b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    std::size_t w = 0;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (w == 0 || std::abs(roots[i] - roots[w - 1]) > 1e-10 * (1.0 + std::abs(roots[i])))
            roots[w++] = roots[i];
    }
    roots.resize(w);
}

}  // namespace

PreimageTree::PreimageTree(const MultiMap& f, const cpx& z0, int level, Metric metric,
                           std::int64_t term_budget)
    : PreimageTree(f, std::vector<cpx>{z0}, level, metric, term_budget) {}

PreimageTree::PreimageTree(const MultiMap& f, const std::vector<cpx>& bases, int level, Metric metric,
                           std::int64_t term_budget)
    : level_(level), base_count_(static_cast<int>(bases.size())) {
    if (level < 1) fail(ErrorCode::Validation, "level must be >= 1");
    if (bases.empty()) fail(ErrorCode::Validation, "need at least one base point");
    double per_level = static_cast<double>(f.total_degree());
    if (static_cast<double>(bases.size()) * std::pow(per_level, level) > static_cast<double>(term_budget))
        fail(ErrorCode::BudgetExceeded, "preimage term count beyond budget");

    // One first-level branch per (base, generator, root); branches are
    // independent and concatenated in index order so the result is
    // thread-count stable.
    struct Branch {
        cpx z;
        double log_chain;
    };
    std::vector<Branch> first;
    for (const cpx& z0 : bases) {
        for (int j = 1; j <= f.count(); ++j) {
            std::vector<cpx> roots = inverse_branches(f, j, z0);
            dedupe_roots(roots);
            for (const cpx& r : roots) {
                double d = deriv_norm(f.gen(j), r, metric);
                if (d < 1e-9) fail(ErrorCode::NotExpanding, "near-critical preimage in the tree");
                first.push_back({r, std::log(d)});
            }
        }
    }

    if (level == 1) {
        for (const Branch& b : first) log_chain_.push_back(b.log_chain);
        return;
    }

    std::vector<std::vector<double>> per_branch(first.size());
    parallel_for(first.size(), [&](std::size_t lo, std::size_t hi) {
        struct Node {
            cpx z;
            double log_chain;
            int depth;
        };
        for (std::size_t b = lo; b < hi; ++b) {
            std::vector<Node> stack{{first[b].z, first[b].log_chain, 1}};
            std::vector<double>& out = per_branch[b];
            while (!stack.empty()) {
                Node node = stack.back();
                stack.pop_back();
                if (node.depth == level_) {
                    out.push_back(node.log_chain);
                    continue;
                }
                for (int j = 1; j <= f.count(); ++j) {
                    std::vector<cpx> roots = inverse_branches(f, j, node.z);
                    dedupe_roots(roots);
                    for (const cpx& r : roots) {
                        double d = deriv_norm(f.gen(j), r, metric);
                        if (d < 1e-9) fail(ErrorCode::NotExpanding, "near-critical preimage in the tree");
                        stack.push_back({r, node.log_chain + std::log(d), node.depth + 1});
                    }
                }
            }
        }
    });
    for (const auto& v : per_branch) log_chain_.insert(log_chain_.end(), v.begin(), v.end());
}

double PreimageTree::pressure(double t) const {
    // (1/n) log of the base-point average of sum exp(-t log D_i),
    // stabilized by the max exponent.
    double mx = -std::numeric_limits<double>::infinity();
    for (double lc : log_chain_) mx = std::max(mx, -t * lc);
    double s = 0.0;
    for (double lc : log_chain_) s += std::exp(-t * lc - mx);
    return (mx + std::log(s / base_count_)) / level_;
}

PressureSample pressure_approx(const MultiMap& f, double t, int level, const cpx& z0, Metric metric) {
    PreimageTree tree(f, z0, level, metric);
    return {t, level, tree.pressure(t), tree.term_count()};
}

cpx pressure_base_point(const MultiMap& f) {
    const Polynomial& g1 = f.gen(1);
    std::vector<cpx> fc = g1.coeffs();
    fc[1] -= 1.0;
    Polynomial fixeq(std::move(fc));
    if (fixeq.degree() < 1) fail(ErrorCode::NoRepellingFixedPoint, "f_1(z) - z is constant");
    cpx z(0, 0);
    double best = -1.0;
    for (const cpx& p : poly_roots(fixeq)) {
        double d = std::abs(g1.eval_derivative(p));
        if (d > best) {
            best = d;
            z = p;
        }
    }
    if (best <= 1.0) fail(ErrorCode::NoRepellingFixedPoint, "all fixed points of f_1 have |f_1'| <= 1");
    return z;
}

namespace {

BowenResult bowen_from_tree(const PreimageTree& tree, int level, double tol) {
    double p0 = tree.pressure(0.0);
    if (p0 < 0.0) fail(ErrorCode::NoSignChange, "P_n(0) < 0; upstream enumeration is broken");

    double hi = 4.0;
    int guard = 0;
    while (tree.pressure(hi) >= 0.0) {
        hi *= 2.0;
        if (++guard > 60) fail(ErrorCode::NotExpanding, "pressure does not become negative");
    }
    double lo = 0.0;
    // bisection on the stored tree; each evaluation is a log-sum-exp pass
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        double pm = tree.pressure(mid);
        if (pm >= 0.0)
            lo = mid;
        else
            hi = mid;
        if (std::abs(pm) < tol && hi - lo < tol) break;
    }
    BowenResult res;
    res.delta = 0.5 * (lo + hi);
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    res.level = level;
    res.residual = tree.pressure(res.delta);
    return res;
}

}  // namespace

BowenResult bowen_parameter(const MultiMap& f, int level, double tol, const cpx& z0, Metric metric) {
    PreimageTree tree(f, z0, level, metric);
    return bowen_from_tree(tree, level, tol);
}

std::vector<cpx> pressure_base_pool(const MultiMap& f, int count, std::uint64_t seed) {
    PointCloud chain = backward_orbit(f, static_cast<std::size_t>(8 * count), 64, seed);
    std::vector<cpx> bases;
    for (int i = 0; i < count; ++i) bases.push_back(chain.points[static_cast<std::size_t>(8 * i)]);
    return bases;
}

BowenResult bowen_parameter(const MultiMap& f, int level, double tol) {
    PreimageTree tree(f, pressure_base_pool(f), level, Metric::Euclidean);
    return bowen_from_tree(tree, level, tol);
}

double moran_delta(const std::vector<double>& ratios) {
    if (ratios.empty()) fail(ErrorCode::Validation, "ratio list must be nonempty");
    for (double r : ratios)
        if (!(r > 1.0)) fail(ErrorCode::Validation, "every ratio must exceed 1");

    bool all_equal = std::all_of(ratios.begin(), ratios.end(),
                                 [&](double r) { return r == ratios.front(); });
    if (all_equal) return std::log(static_cast<double>(ratios.size())) / std::log(ratios.front());

    auto g = [&](double t) {
        double s = 0.0;
        for (double r : ratios) s += std::pow(r, -t);
        return s - 1.0;
    };
    double lo = 0.0, hi = 4.0;
    while (g(hi) > 0.0) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (std::abs(g(mid)) < 1e-12) return mid;
        if (g(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double d1d2_lower_bound(int d1, int d2) {
    if (d1 < 2 || d2 < 2) fail(ErrorCode::Validation, "degrees must be >= 2");
    double total = d1 + d2;
    double denom = (d1 * std::log(static_cast<double>(d1)) + d2 * std::log(static_cast<double>(d2))) / total;
    return std::log(total) / denom;
}

std::string pressure_grid_csv(const MultiMap& f, const std::vector<double>& ts, const std::vector<int>& levels,
                              const cpx& z0, Metric metric) {
    std::string out = "t,n,pressure\n";
    char buf[96];
    for (int n : levels) {
        PreimageTree tree(f, z0, n, metric);
        for (double t : ts) {
            std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", t, n, tree.pressure(t));
            out += buf;
        }
    }
    return out;
}

}  // namespace psg
