#include "psg/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include "psg/errors.hpp"
#include "psg/julia.hpp"

namespace psg {

EPWord EPWord::shifted() const {
    EPWord out;
    if (!preperiod.empty()) {
        out.preperiod.symbols.assign(preperiod.symbols.begin() + 1, preperiod.symbols.end());
        out.period = period;
        return out;
    }
    out.period.symbols.assign(period.symbols.begin() + 1, period.symbols.end());
    out.period.symbols.push_back(period.symbols.front());
    return out;
}

MultiMap::MultiMap(std::vector<Polynomial> generators) : gens_(std::move(generators)) {
    if (gens_.empty()) fail(ErrorCode::Validation, "multimap needs at least one generator");
    for (const Polynomial& g : gens_) {
        if (g.degree() < 1) fail(ErrorCode::Validation, "generator degree must be >= 1");
        total_degree_ += g.degree();
        dgens_.push_back(g.derivative());
    }
}

bool MultiMap::all_affine() const {
    return std::all_of(gens_.begin(), gens_.end(), [](const Polynomial& g) { return g.degree() == 1; });
}

namespace {

void check_word(const MultiMap& f, const Word& w) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] < 1 || w[i] > f.count()) fail(ErrorCode::Validation, "word symbol out of range");
    }
}

}  // namespace

cpx compose_along(const MultiMap& f, const Word& w, cpx z) {
    check_word(f, w);
    for (std::size_t i = 0; i < w.size(); ++i) {
        z = f.gen(w[i]).eval(z);
        if (std::abs(z) > kEscapeSentinel) fail(ErrorCode::Overflow, "orbit escaped past sentinel");
    }
    return z;
}

ChainDeriv chain_deriv(const MultiMap& f, const Word& w, cpx z, Metric metric) {
    check_word(f, w);
    ChainDeriv out;
    out.endpoint = z;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const Polynomial& g = f.gen(w[i]);
        out.norm *= deriv_norm(g, out.endpoint, metric);
        out.complex_deriv *= g.eval_derivative(out.endpoint);
        out.endpoint = g.eval(out.endpoint);
        if (std::abs(out.endpoint) > kEscapeSentinel || std::abs(out.complex_deriv) > kEscapeSentinel)
            fail(ErrorCode::Overflow, "orbit escaped past sentinel");
    }
    return out;
}

std::vector<cpx> inverse_branches(const MultiMap& f, int j, const cpx& w) {
    if (j < 1 || j > f.count()) fail(ErrorCode::Validation, "generator index out of range");
    return poly_roots(f.gen(j) - w);
}

ExpandingEstimate estimate_expanding(const MultiMap& f, const PointCloud& cloud, int level, Metric metric,
                                     int sample_points) {
    if (level < 1) fail(ErrorCode::Validation, "level must be >= 1");
    if (cloud.points.empty()) fail(ErrorCode::Validation, "empty cloud");

    std::vector<double> min_chain(static_cast<std::size_t>(level) + 1,
                                  std::numeric_limits<double>::infinity());

    // Depth-first preimage tree: node carries (point, accumulated |chain|).
    // The chain derivative of f_w at a preimage z of the start point w0 is the
    // product of per-step norms along the forward orbit z -> ... -> w0.
    struct Node {
        cpx z;
        double chain;
        int depth;
    };

    std::size_t stride = std::max<std::size_t>(1, cloud.points.size() / static_cast<std::size_t>(sample_points));
    for (std::size_t idx = 0; idx < cloud.points.size(); idx += stride) {
        std::vector<Node> stack{{cloud.points[idx], 1.0, 0}};
        while (!stack.empty()) {
            Node node = stack.back();
            stack.pop_back();
            if (node.depth == level) continue;
            for (int j = 1; j <= f.count(); ++j) {
                for (const cpx& pre : inverse_branches(f, j, node.z)) {
                    double step = deriv_norm(f.gen(j), pre, metric);
                    double chain = node.chain * step;
                    int d = node.depth + 1;
                    min_chain[static_cast<std::size_t>(d)] =
                        std::min(min_chain[static_cast<std::size_t>(d)], chain);
                    stack.push_back({pre, chain, d});
                }
            }
        }
    }

    double top = min_chain[static_cast<std::size_t>(level)];
    if (!(top > 1.0)) fail(ErrorCode::NotExpanding, "min chain derivative <= 1 at requested level");

    ExpandingEstimate est;
    est.eta = std::pow(top, 1.0 / level);
    est.level = level;
    double c = 1.0;
    for (int k = 1; k <= level; ++k)
        c = std::min(c, min_chain[static_cast<std::size_t>(k)] / std::pow(est.eta, k));
    est.C = std::min(1.0, c);
    return est;
}

PostcriticalSample postcritical_sample(const MultiMap& f, int depth, double escape_radius) {
    if (depth < 0) fail(ErrorCode::Validation, "depth must be >= 0");

    PostcriticalSample out;
    std::vector<cpx> level;
    for (int j = 1; j <= f.count(); ++j) {
        const Polynomial& g = f.gen(j);
        if (g.degree() < 2) continue;  // no finite critical points
        for (const cpx& c : poly_roots(f.gen_derivative(j))) level.push_back(g.eval(c));
    }

    auto dedupe = [](std::vector<cpx>& pts) {
        std::sort(pts.begin(), pts.end(), [](const cpx& a, const cpx& b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        std::vector<cpx> out;
        for (const cpx& p : pts) {
            if (out.empty() || std::abs(p - out.back()) > 1e-9 * (1.0 + std::abs(p))) out.push_back(p);
        }
        pts = std::move(out);
    };

    dedupe(level);
    for (const cpx& p : level) {
        out.points.push_back(p);
        out.radius = std::max(out.radius, std::abs(p));
        if (std::abs(p) > escape_radius) out.bounded = false;
    }
    for (int d = 0; d < depth; ++d) {
        std::vector<cpx> next;
        for (const cpx& p : level) {
            if (std::abs(p) > escape_radius) continue;  // escaped branches stop growing
            for (int j = 1; j <= f.count(); ++j) next.push_back(f.gen(j).eval(p));
        }
        dedupe(next);
        for (const cpx& p : next) {
            out.points.push_back(p);
            out.radius = std::max(out.radius, std::abs(p));
            if (std::abs(p) > escape_radius) out.bounded = false;
        }
        level = std::move(next);
    }
    dedupe(out.points);
    return out;
}

}  // namespace psg
