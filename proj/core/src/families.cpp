#include "psg/families.hpp"

#include <cmath>

#include "psg/errors.hpp"
#include "psg/julia.hpp"

namespace psg {

namespace {

Polynomial affine(const cpx& a, const cpx& b) { return Polynomial({b, a}); }

// a(z - p) + p = a z + (1-a) p
Polynomial similarity_about(const cpx& a, const cpx& p) { return affine(a, (cpx(1, 0) - a) * p); }

}  // namespace

MultiMap make_interval() {
    return MultiMap({affine(cpx(2, 0), cpx(0, 0)), affine(cpx(2, 0), cpx(-1, 0))});
}

MultiMap make_sierpinski(const cpx& p1, const cpx& p2, const cpx& p3) {
    double d12 = std::abs(p1 - p2), d23 = std::abs(p2 - p3), d31 = std::abs(p3 - p1);
    double scale = std::max({d12, d23, d31});
    if (scale <= 0.0 || std::abs(d12 - d23) > 1e-10 * scale || std::abs(d23 - d31) > 1e-10 * scale)
        fail(ErrorCode::BadVertices, "sierpinski vertices must form an equilateral triangle");
    return MultiMap({similarity_about(cpx(2, 0), p1), similarity_about(cpx(2, 0), p2),
                     similarity_about(cpx(2, 0), p3)});
}

MultiMap make_snowflake() {
    std::vector<Polynomial> gens;
    for (int j = 1; j <= 6; ++j) {
        double th = 2.0 * M_PI * j / 6.0;
        gens.push_back(similarity_about(cpx(3, 0), cpx(std::cos(th), std::sin(th))));
    }
    gens.push_back(similarity_about(cpx(3, 0), cpx(0, 0)));
    return MultiMap(std::move(gens));
}

MultiMap make_pentakun() { return make_nkun(5); }

MultiMap make_nkun(int k) {
    if (k < 3) fail(ErrorCode::Validation, "nkun needs at least 3 vertices");
    double s = 1.0;
    for (int l = 1; l <= k / 4; ++l) s += std::cos(2.0 * M_PI * l / k);
    cpx a(2.0 * s, 0.0);
    std::vector<Polynomial> gens;
    for (int j = 1; j <= k; ++j) {
        double th = 2.0 * M_PI * j / k;
        gens.push_back(similarity_about(a, cpx(std::cos(th), std::sin(th))));
    }
    return MultiMap(std::move(gens));
}

std::vector<double> affine_ratios(const MultiMap& f) {
    if (!f.all_affine()) fail(ErrorCode::Validation, "ratios need an affine multimap");
    std::vector<double> out;
    for (int j = 1; j <= f.count(); ++j) out.push_back(std::abs(f.gen(j).coeffs()[1]));
    return out;
}

D1D2Params D1D2Params::make(int d1, int d2, const cpx& b, double t) {
    if (d1 < 2 || d2 < 2) fail(ErrorCode::Validation, "degrees must be >= 2");
    if (d1 == 2 && d2 == 2) fail(ErrorCode::Validation, "(2,2) is excluded");
    double u = std::abs(b);
    if (!(u > 0.0) || !(u < 1.0)) fail(ErrorCode::Validation, "need 0 < |b| < 1");
    if (!(t > 0.0)) fail(ErrorCode::Validation, "need t > 0");
    double theta = std::arg(b);
    if (theta < 0.0) theta += 2.0 * M_PI;
    // d2(pi+theta) + alpha = theta (mod 2 pi)
    double alpha = std::fmod(theta - d2 * (M_PI + theta), 2.0 * M_PI);
    if (alpha < 0.0) alpha += 2.0 * M_PI;
    D1D2Params p;
    p.d1 = d1;
    p.d2 = d2;
    p.b = b;
    p.alpha = alpha;
    p.t = t;
    return p;
}

MultiMap make_d1d2(const D1D2Params& p) {
    Polynomial beta1 = Polynomial::monomial_shifted(cpx(1, 0), cpx(0, 0), p.d1, cpx(0, 0));
    cpx lead = p.t * cpx(std::cos(p.alpha), std::sin(p.alpha));
    Polynomial gt = Polynomial::monomial_shifted(lead, p.b, p.d2, p.b);
    return MultiMap({beta1, gt});
}

namespace {

struct T1Machinery {
    int d1, d2;
    cpx b;
    double alpha;
    int boundary_samples;
    double margin_scale;
    int oracle_max_iter;

    // J(g_t) is the circle |z - b| = (1/t)^{1/(d2-1)}.
    double gt_julia_radius(double t) const { return std::pow(1.0 / t, 1.0 / (d2 - 1)); }

    Polynomial gt_poly(double t) const {
        cpx lead = t * cpx(std::cos(alpha), std::sin(alpha));
        return Polynomial::monomial_shifted(lead, b, d2, b);
    }

    bool predicate(double t, int* evals) const {
        if (evals != nullptr) ++*evals;
        double rho = gt_julia_radius(t);
        double margin = margin_scale * 2.0 * rho;
        Polynomial gt = gt_poly(t);
        Polynomial beta1 = Polynomial::monomial_shifted(cpx(1, 0), cpx(0, 0), d1, cpx(0, 0));

        FilledSetOracle k_gt(gt, FilledSetOracle::auto_escape_radius(gt), oracle_max_iter);
        MembershipFn in_kgt = [&](const cpx& z) { return k_gt.inside(z); };
        MembershipFn in_kb1 = [](const cpx& z) { return std::abs(z) <= 1.0; };
        MembershipFn in_b1inv_kgt = [&](const cpx& z) { return k_gt.inside(std::pow(z, d1)); };
        MembershipFn in_gtinv_kb1 = [&](const cpx& z) { return std::abs(gt.eval(z)) <= 1.0; };

        // boundary of K(beta1): unit circle
        std::vector<cpx> unit_circle;
        unit_circle.reserve(static_cast<std::size_t>(boundary_samples));
        for (int k = 0; k < boundary_samples; ++k) {
            double th = 2.0 * M_PI * k / boundary_samples;
            unit_circle.push_back(cpx(std::cos(th), std::sin(th)));
        }
        // boundary of beta1^{-1}(K(g_t)): all d1-th preimages of J(g_t)
        std::vector<cpx> b1inv_boundary;
        // boundary of g_t^{-1}(K(beta1)): all d2-th preimages of the unit circle
        std::vector<cpx> gtinv_boundary;
        MultiMap pair({beta1, gt});
        int coarse = boundary_samples / 2;
        for (int k = 0; k < coarse; ++k) {
            double th = 2.0 * M_PI * k / coarse;
            cpx on_jgt = b + rho * cpx(std::cos(th), std::sin(th));
            for (const cpx& z : inverse_branches(pair, 1, on_jgt)) b1inv_boundary.push_back(z);
            cpx on_jb1(std::cos(th), std::sin(th));
            for (const cpx& z : inverse_branches(pair, 2, on_jb1)) gtinv_boundary.push_back(z);
        }

        // K(b1) in int(b1^{-1}(K(g_t)))
        if (!inclusion_test(in_b1inv_kgt, unit_circle, margin).holds) return false;
        // b1^{-1}(K(g_t)) compactly inside int(g_t^{-1}(K(b1)))
        if (!inclusion_test(in_gtinv_kb1, b1inv_boundary, margin).holds) return false;
        // g_t^{-1}(K(b1)) compactly inside int(K(g_t))
        if (!inclusion_test(in_kgt, gtinv_boundary, margin).holds) return false;
        // K(b1) in int(g_t^{-1}(K(b1))), the g_t(K(b1)) subset int K(b1) form
        if (!inclusion_test(in_gtinv_kb1, unit_circle, margin).holds) return false;
        return true;
    }
};

}  // namespace

bool t1_inclusion_predicate(int d1, int d2, const cpx& b, double t, const T1Options& opts) {
    D1D2Params p = D1D2Params::make(d1, d2, b, t);
    T1Machinery m{p.d1, p.d2, p.b, p.alpha, opts.boundary_samples, opts.margin_scale, opts.oracle_max_iter};
    return m.predicate(t, nullptr);
}

T1Result find_t1(int d1, int d2, const cpx& b, const T1Options& opts) {
    D1D2Params probe = D1D2Params::make(d1, d2, b, 0.5);  // validates ranges, computes alpha
    T1Machinery m{probe.d1, probe.d2, probe.b, probe.alpha,
                  opts.boundary_samples, opts.margin_scale, opts.oracle_max_iter};

    double u = std::abs(b);
    double v = 1.0 + u;
    double hi = std::pow(1.0 / v, static_cast<double>(d2 - 1));

    T1Result res;
    res.upper_bound = hi;

    // certified lower bound a_R = R^{-(d2-1)} from the growth-rate inequality
    double r = 1.0 - 0.5 * u;  // midpoint of (1-u, 1)
    double expo = (-d1 * std::log(r) + d1 * d2 * std::log(2.0)) / (d1 * d2 - d1 - d2);
    double R = std::exp(expo);
    R = std::max(R, std::pow(2.0 * (1.0 + u), static_cast<double>(d1)));
    R = std::max(R, std::pow(1.5, static_cast<double>(d1) / (d1 - 1)));
    R *= 1.0 + 1e-9;
    res.certified_lower = std::pow(R, -static_cast<double>(d2 - 1));

    int evals = 0;
    // monotonicity scan: pattern must be true...true false...false
    const int scan_n = 8;
    std::vector<bool> pattern;
    for (int k = 1; k <= scan_n; ++k) pattern.push_back(m.predicate(hi * k / (scan_n + 1.0), &evals));
    bool seen_false = false;
    for (bool ok : pattern) {
        if (!ok) seen_false = true;
        else if (seen_false)
            fail(ErrorCode::PredicateNonMonotone, "inclusion predicate true above false");
    }

    double lo = 0.0;
    double lo_known_true = 0.0;
    double hi_work = hi;
    if (pattern.front()) lo_known_true = hi / (scan_n + 1.0);
    if (!m.predicate(hi_work * (1.0 - 1e-12), &evals)) {
        // standard case: predicate fails at the top of the range
        lo = lo_known_true;
        while (hi_work - lo > opts.tol) {
            double mid = 0.5 * (lo + hi_work);
            if (m.predicate(mid, &evals))
                lo = mid;
            else
                hi_work = mid;
        }
        res.t1 = 0.5 * (lo + hi_work);
    } else {
        res.t1 = hi_work;  // the whole admissible range passes
    }
    res.predicate_evals = evals;
    return res;
}

MultiMap make_quadratic_pair(const cpx& a, QuadKind kind, const cpx& lambda) {
    double am = std::abs(a);
    if (std::abs(am) < 1e-12 || std::abs(am - 1.0) < 1e-12)
        fail(ErrorCode::BadModulus, "|a| must differ from 0 and 1");
    Polynomial first = Polynomial::monomial_shifted(a, cpx(0, 0), 2, cpx(0, 0));
    Polynomial second =
        kind == QuadKind::Translation
            ? Polynomial::monomial_shifted(cpx(1, 0), lambda, 2, lambda)  // (z-l)^2 + l
            : Polynomial::monomial_shifted(cpx(1, 0), cpx(0, 0), 2, lambda);  // z^2 + l
    return MultiMap({first, second});
}

bool quadratic_translation_eligible(const cpx& a) {
    if (std::abs(a) < 1e-12) return false;
    return std::abs(std::abs(cpx(2, 0) + a + cpx(1, 0) / a) - 4.0) > 1e-12;
}

}  // namespace psg
