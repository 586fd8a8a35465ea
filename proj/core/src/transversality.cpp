#include "psg/transversality.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <unordered_set>

#include "psg/errors.hpp"
#include "psg/geometry.hpp"
#include "psg/hashgrid.hpp"

namespace psg {

PerturbationFamily::PerturbationFamily(MultiMap base, PerturbationKind kind, int index, cpx lambda0)
    : base_(std::move(base)), kind_(kind), index_(index), lambda0_(lambda0) {
    if (index_ < 1 || index_ > base_.count()) fail(ErrorCode::Validation, "perturbed index out of range");
}

PerturbationFamily PerturbationFamily::monomial(MultiMap base, int index, int exponent, cpx lambda0) {
    if (exponent < 0) fail(ErrorCode::Validation, "monomial exponent must be >= 0");
    PerturbationFamily fam(std::move(base), PerturbationKind::Monomial, index, lambda0);
    if (exponent > fam.base_.gen(index).degree())
        fail(ErrorCode::Validation, "monomial exponent above generator degree");
    fam.exponent_ = exponent;
    return fam;
}

PerturbationFamily PerturbationFamily::derivative_perturb(MultiMap base, int index, cpx lambda0) {
    return PerturbationFamily(std::move(base), PerturbationKind::DerivativePerturb, index, lambda0);
}

PerturbationFamily PerturbationFamily::conjugation(MultiMap base, int index, cpx a1, cpx b1, cpx lambda0) {
    PerturbationFamily fam(std::move(base), PerturbationKind::Conjugation, index, lambda0);
    fam.conj_a1_ = a1;
    fam.conj_b1_ = b1;
    return fam;
}

PerturbationFamily PerturbationFamily::translation(MultiMap base, int index, cpx lambda0) {
    PerturbationFamily fam(std::move(base), PerturbationKind::Translation, index, lambda0);
    fam.conj_a1_ = cpx(0, 0);
    fam.conj_b1_ = cpx(1, 0);
    return fam;
}

Polynomial PerturbationFamily::generator_at(const cpx& lambda, int j) const {
    const Polynomial& g = base_.gen(j);
    if (j != index_) return g;
    cpx dl = lambda - lambda0_;
    switch (kind_) {
        case PerturbationKind::Monomial: {
            std::vector<cpx> c = g.coeffs();
            if (static_cast<std::size_t>(exponent_) >= c.size()) c.resize(exponent_ + 1, cpx(0, 0));
            c[static_cast<std::size_t>(exponent_)] += dl;
            return Polynomial(std::move(c));
        }
        case PerturbationKind::DerivativePerturb:
            return g + base_.gen_derivative(index_).scaled(dl);
        case PerturbationKind::Conjugation:
        case PerturbationKind::Translation: {
            // alpha(z) = a z + b, alpha^{-1}(z) = (z - b)/a
            cpx a = cpx(1, 0) + dl * conj_a1_;
            cpx b = dl * conj_b1_;
            if (std::abs(a) < 1e-14) fail(ErrorCode::Validation, "degenerate conjugation");
            Polynomial inner({-b / a, cpx(1, 0) / a});  // alpha^{-1}
            Polynomial comp = g.compose(inner);
            std::vector<cpx> c = comp.coeffs();
            for (cpx& v : c) v *= a;
            c[0] += b;
            return Polynomial(std::move(c));
        }
    }
    fail(ErrorCode::Validation, "unreachable");
}

cpx PerturbationFamily::dlambda(const cpx& z) const {
    const Polynomial& g = base_.gen(index_);
    switch (kind_) {
        case PerturbationKind::Monomial:
            return exponent_ == 0 ? cpx(1, 0) : std::pow(z, exponent_);
        case PerturbationKind::DerivativePerturb:
            return g.eval_derivative(z);
        case PerturbationKind::Conjugation:
        case PerturbationKind::Translation: {
            // d/dl [alpha_l o g o alpha_l^{-1}] at Id = -g'(z) A(z) + A(g(z)),
            // A(z) = a1 z + b1.
            cpx A_z = conj_a1_ * z + conj_b1_;
            cpx A_gz = conj_a1_ * g.eval(z) + conj_b1_;
            return -g.eval_derivative(z) * A_z + A_gz;
        }
    }
    fail(ErrorCode::Validation, "unreachable");
}

namespace {

// Repelling fixed point of the composition along `period` at lambda0, chosen
// with the largest derivative modulus (ties broken lexicographically).
cpx base_cycle_point(const PerturbationFamily& fam, const Word& period) {
    Polynomial comp({cpx(0, 0), cpx(1, 0)});
    for (std::size_t i = 0; i < period.size(); ++i)
        comp = fam.generator_at(fam.lambda0(), period[i]).compose(comp);
    if (comp.degree() > 4096) fail(ErrorCode::Validation, "period composition degree too large");
    std::vector<cpx> c = comp.coeffs();
    if (c.size() < 2) c.resize(2, cpx(0, 0));
    c[1] -= 1.0;
    Polynomial fixeq(std::move(c));
    if (fixeq.degree() < 1) fail(ErrorCode::NoRepellingFixedPoint, "cycle equation is constant");

    cpx best{0, 0};
    double best_mod = -1.0;
    for (const cpx& p : poly_roots(fixeq)) {
        double m = std::abs(comp.eval_derivative(p));
        if (m > best_mod + 1e-12 ||
            (std::abs(m - best_mod) <= 1e-12 &&
             (p.real() < best.real() || (p.real() == best.real() && p.imag() < best.imag())))) {
            best_mod = m;
            best = p;
        }
    }
    if (best_mod <= 1.0) fail(ErrorCode::NoRepellingFixedPoint, "no repelling cycle for the period");
    return best;
}

cpx newton_cycle(const std::vector<Polynomial>& gens_at_lambda, const Word& period, cpx x,
                 const ContinuationOptions& opts) {
    for (int it = 0; it < opts.newton_max_iter; ++it) {
        cpx y = x, deriv(1, 0);
        for (std::size_t i = 0; i < period.size(); ++i) {
            const Polynomial& g = gens_at_lambda[static_cast<std::size_t>(period[i] - 1)];
            deriv *= g.eval_derivative(y);
            y = g.eval(y);
        }
        cpx val = y - x;
        if (std::abs(val) < 1e-13 * (1.0 + std::abs(x))) return x;
        cpx dd = deriv - cpx(1, 0);
        if (std::abs(dd) < 1e-300) fail(ErrorCode::NewtonDivergence, "singular cycle derivative");
        x -= val / dd;
        if (!is_finite(x) || std::abs(x) > 1e10) fail(ErrorCode::NewtonDivergence, "cycle iterate blew up");
    }
    fail(ErrorCode::NewtonDivergence, "cycle Newton did not converge");
}

// Root of g(x) = target nearest to ref, with a branch-collision guard.
cpx nearest_branch(const Polynomial& g, const cpx& target, const cpx& ref, double collision_threshold) {
    std::vector<cpx> roots = poly_roots(g - target);
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < roots.size(); ++k) {
        double d = std::abs(roots[k] - ref);
        if (d < bd) {
            bd = d;
            best = k;
        }
    }
    if (roots.size() > 1) {
        double second = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < roots.size(); ++k) {
            if (k == best) continue;
            second = std::min(second, std::abs(roots[k] - roots[best]));
        }
        if (second < collision_threshold)
            fail(ErrorCode::BranchCollision, "inverse branches nearly collide on the path");
    }
    return roots[best];
}

struct OrbitFrame {
    std::vector<cpx> points;  // points[0] = z_w, ..., points[k] = cycle point
};

OrbitFrame base_frame(const PerturbationFamily& fam, const EPWord& w, const std::optional<cpx>& seed) {
    const Word& u = w.preperiod;
    if (w.period.empty()) fail(ErrorCode::Validation, "EPWord needs a nonempty period");

    OrbitFrame frame;
    if (seed.has_value()) {
        // forward orbit of the seed through the preperiod, then polish the
        // cycle endpoint
        cpx z = *seed;
        frame.points.push_back(z);
        for (std::size_t i = 0; i < u.size(); ++i) {
            z = fam.generator_at(fam.lambda0(), u[i]).eval(z);
            frame.points.push_back(z);
        }
        std::vector<Polynomial> gens;
        for (int j = 1; j <= fam.base().count(); ++j) gens.push_back(fam.generator_at(fam.lambda0(), j));
        ContinuationOptions opts;
        frame.points.back() = newton_cycle(gens, w.period, frame.points.back(), opts);
        return frame;
    }

    cpx c = base_cycle_point(fam, w.period);
    frame.points.assign(u.size() + 1, c);
    // pull back through the preperiod, nearest branch to the value pulled from
    for (std::size_t i = u.size(); i-- > 0;) {
        const Polynomial g = fam.generator_at(fam.lambda0(), u[i]);
        ContinuationOptions opts;
        frame.points[i] = nearest_branch(g, frame.points[i + 1], frame.points[i + 1], opts.collision_threshold);
    }
    return frame;
}

}  // namespace

cpx canonical_point(const PerturbationFamily& fam, const EPWord& w, const std::optional<cpx>& seed) {
    return base_frame(fam, w, seed).points.front();
}

cpx conjugacy_point(const PerturbationFamily& fam, const EPWord& w, const cpx& lambda,
                    const ContinuationOptions& opts, const std::optional<cpx>& seed) {
    if (opts.path_steps < 1) fail(ErrorCode::Validation, "path_steps must be >= 1");
    OrbitFrame frame = base_frame(fam, w, seed);
    const Word& u = w.preperiod;

    for (int s = 1; s <= opts.path_steps; ++s) {
        cpx l = fam.lambda0() + (lambda - fam.lambda0()) * (static_cast<double>(s) / opts.path_steps);
        std::vector<Polynomial> gens;
        gens.reserve(static_cast<std::size_t>(fam.base().count()));
        for (int j = 1; j <= fam.base().count(); ++j) gens.push_back(fam.generator_at(l, j));

        frame.points.back() = newton_cycle(gens, w.period, frame.points.back(), opts);
        for (std::size_t i = u.size(); i-- > 0;) {
            frame.points[i] = nearest_branch(gens[static_cast<std::size_t>(u[i] - 1)], frame.points[i + 1],
                                             frame.points[i], opts.collision_threshold);
        }
    }
    return frame.points.front();
}

ConjugacyDerivative dh_series(const PerturbationFamily& fam, const EPWord& w, int terms,
                              const std::optional<cpx>& at) {
    if (terms < 1) fail(ErrorCode::Validation, "need at least one term");
    const auto& est_opt = fam.base().expanding_estimate();
    if (!est_opt.has_value())
        fail(ErrorCode::NotExpanding, "base multimap carries no expanding estimate");
    const ExpandingEstimate& est = est_opt.value();
    if (!(est.eta > 1.0) || !(est.C > 0.0)) fail(ErrorCode::NotExpanding, "invalid expanding estimate");

    cpx z = at.has_value() ? *at : canonical_point(fam, w);

    ConjugacyDerivative out;
    out.heuristic_constants = !(est.user_supplied && fam.base().all_affine());

    cpx y = z;          // f_{l0, w|n-1}(z)
    cpx chain(1, 0);    // f_{l0, w|n}'(z)
    cpx sum(0, 0);
    double max_an = 0.0;
    int used = 0;
    bool truncated = false;

    // Finite-precision base points desynchronize from their itinerary at a
    // rate of eta per step, after which the terms stop decaying. Watch the
    // nonzero-term envelope and truncate the series there; the analytic tail
    // bound is then taken at the truncation index.
    std::vector<double> nonzero_terms;
    std::size_t watch = std::max<std::size_t>(3, w.period.size() + 1);

    // Words whose period avoids the perturbed index have a_n = 0 past the
    // preperiod: the series is finite and the tail vanishes.
    bool period_has_index = false;
    for (std::size_t i = 0; i < w.period.size(); ++i)
        if (w.period[i] == fam.index()) period_has_index = true;
    if (!period_has_index)
        terms = std::min(terms, static_cast<int>(w.preperiod.size()));

    // The tail constant M is the periodic-part maximum of |a_n| (only those
    // values appear beyond any truncation point); two periods of scan cover
    // it. The series itself runs up to `terms` or its truncation point.
    std::size_t m_scan = w.preperiod.size() + 2 * w.period.size();
    std::size_t scan = std::max<std::size_t>(static_cast<std::size_t>(terms), m_scan);
    if (!period_has_index) scan = static_cast<std::size_t>(terms);
    for (std::size_t n = 1; n <= scan; ++n) {
        int sym = w.symbol_at(n - 1);
        const Polynomial& g = fam.base().gen(sym);
        cpx a_n(0, 0);
        if (sym == fam.index()) a_n = -fam.dlambda(y);
        if (n <= m_scan) max_an = std::max(max_an, std::abs(a_n));

        if (static_cast<int>(n) <= terms && !truncated) {
            chain *= g.eval_derivative(y);
            if (std::abs(chain) < 1e-300)
                fail(ErrorCode::NotExpanding, "vanishing chain derivative along the orbit");
            if (sym == fam.index() && std::abs(a_n) > 0.0) {
                cpx term = a_n / chain;
                double mag = std::abs(term);
                if (nonzero_terms.size() >= watch &&
                    mag >= 0.9 * nonzero_terms[nonzero_terms.size() - watch]) {
                    truncated = true;  // decay stalled: orbit left the itinerary
                } else if (mag <= 1e-16 * std::abs(sum)) {
                    sum += term;
                    used = static_cast<int>(n);
                    truncated = true;  // converged to double precision
                } else {
                    sum += term;
                    nonzero_terms.push_back(mag);
                    used = static_cast<int>(n);
                }
            } else {
                used = static_cast<int>(n);
            }
            if (std::abs(chain) > 1e120) truncated = true;  // later terms below precision
        }
        if (n >= m_scan && (truncated || static_cast<int>(n) >= terms)) break;
        y = g.eval(y);
        if (std::abs(y) > kEscapeSentinel) fail(ErrorCode::Overflow, "orbit escaped past sentinel");
    }

    out.value = sum;
    out.terms_used = used;
    if (!period_has_index && used >= static_cast<int>(w.preperiod.size())) {
        out.tail_bound = 0.0;  // every remaining a_n is identically zero
    } else {
        // M * sum_{n > used} (C eta^n)^{-1} = M/C * eta^{-used}/(eta - 1)
        out.tail_bound = max_an / est.C * std::pow(est.eta, -used) / (est.eta - 1.0);
    }
    return out;
}

namespace {

// Approximate single-generator Julia sets, for tagging overlaps. Degree-1
// generators have the single point -b/(a-1).
std::vector<std::vector<cpx>> generator_julia_samples(const MultiMap& f) {
    std::vector<std::vector<cpx>> out(static_cast<std::size_t>(f.count()));
    for (int j = 1; j <= f.count(); ++j) {
        const Polynomial& g = f.gen(j);
        if (g.degree() == 1) {
            cpx a = g.coeffs()[1], b = g.coeffs()[0];
            out[static_cast<std::size_t>(j - 1)].push_back(-b / (a - cpx(1, 0)));
        } else {
            MultiMap single({g});
            PointCloud jc = backward_orbit(single, 2048, 128, 0x9d5ab1ull + static_cast<std::uint64_t>(j));
            out[static_cast<std::size_t>(j - 1)] = std::move(jc.points);
        }
    }
    return out;
}

double dist_to_samples(const cpx& z, const std::vector<cpx>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (const cpx& p : pts) best = std::min(best, std::abs(z - p));
    return best;
}

// Exact single-generator Julia descriptor where one exists: a point for
// degree-1 maps, a circle for self-centered shifted monomials c(z-b)^d + b.
struct JDesc {
    bool is_point = false;
    cpx center{0, 0};
    double radius = 0.0;
};

std::optional<JDesc> generator_j_descriptor(const Polynomial& g) {
    if (g.degree() == 1) {
        cpx a = g.coeffs()[1], b = g.coeffs()[0];
        if (std::abs(a - cpx(1, 0)) < 1e-14) return std::nullopt;
        JDesc d;
        d.is_point = true;
        d.center = -b / (a - cpx(1, 0));
        return d;
    }
    if (!g.is_shifted_monomial()) return std::nullopt;
    if (std::abs(g.sm_offset() - g.sm_center()) > 1e-12 * (1.0 + std::abs(g.sm_center())))
        return std::nullopt;
    JDesc d;
    d.center = g.sm_center();
    d.radius = std::pow(std::abs(g.sm_scale()), -1.0 / (g.degree() - 1));
    return d;
}

// Gauss-Newton projection of an overlap candidate onto the exact overlap
// conditions f_i(z) in J(f_a), f_j(z) in J(f_b), when both targets have
// closed-form descriptors. Returns the candidate unchanged otherwise.
cpx polish_overlap(const MultiMap& f, cpx z, int i, int j, const std::optional<JDesc>& ti,
                   const std::optional<JDesc>& tj, double max_move) {
    if (!ti.has_value() || !tj.has_value()) return z;

    struct Cond {
        const Polynomial* g;
        JDesc t;
    };
    Cond conds[2] = {{&f.gen(i), *ti}, {&f.gen(j), *tj}};

    cpx z0 = z;
    for (int iter = 0; iter < 12; ++iter) {
        // stacked residuals r and 2-column real Jacobian (J^T J) dz = -J^T r
        double jtj[3] = {0, 0, 0};  // [xx, xy, yy]
        double jtr[2] = {0, 0};
        double rnorm = 0.0;
        for (const Cond& c : conds) {
            cpx w = c.g->eval(z) - c.t.center;
            cpx dw = c.g->eval_derivative(z);
            if (c.t.is_point) {
                // two real residuals (Re w, Im w); Jacobian is the real form
                // of the complex derivative
                double rx = w.real(), ry = w.imag();
                double a = dw.real(), b = -dw.imag(), c2 = dw.imag(), d = dw.real();
                jtj[0] += a * a + c2 * c2;
                jtj[1] += a * b + c2 * d;
                jtj[2] += b * b + d * d;
                jtr[0] += a * rx + c2 * ry;
                jtr[1] += b * rx + d * ry;
                rnorm += rx * rx + ry * ry;
            } else {
                double aw = std::abs(w);
                if (aw < 1e-14) continue;
                double r = aw - c.t.radius;
                cpx wc = std::conj(w) * dw;
                double gx = wc.real() / aw;
                double gy = -wc.imag() / aw;
                jtj[0] += gx * gx;
                jtj[1] += gx * gy;
                jtj[2] += gy * gy;
                jtr[0] += gx * r;
                jtr[1] += gy * r;
                rnorm += r * r;
            }
        }
        if (rnorm < 1e-28) break;
        // Levenberg damping: consistent conditions can have parallel
        // gradients (two circles through the same locus), making J^T J
        // singular; the damped step then follows the common normal.
        double mu = 1e-9 * (jtj[0] + jtj[2]) + 1e-30;
        double a11 = jtj[0] + mu, a22 = jtj[2] + mu;
        double det = a11 * a22 - jtj[1] * jtj[1];
        if (!(det > 0.0)) break;
        double dx = (-jtr[0] * a22 + jtr[1] * jtj[1]) / det;
        double dy = (-jtr[1] * a11 + jtr[0] * jtj[1]) / det;
        z += cpx(dx, dy);
        if (!is_finite(z)) return z0;
    }
    if (std::abs(z - z0) > max_move) return z0;
    return z;
}

}  // namespace

std::vector<OverlapPoint> find_overlaps(const MultiMap& f, const PointCloud& cloud, double tol) {
    if (cloud.points.empty()) fail(ErrorCode::Validation, "empty cloud");

    // keep preimage sets a manageable size
    std::size_t max_base = 20000;
    std::size_t stride = std::max<std::size_t>(1, cloud.points.size() / max_base);
    std::vector<std::vector<cpx>> pre(static_cast<std::size_t>(f.count()));
    for (int j = 1; j <= f.count(); ++j) {
        for (std::size_t i = 0; i < cloud.points.size(); i += stride) {
            for (const cpx& r : inverse_branches(f, j, cloud.points[i]))
                pre[static_cast<std::size_t>(j - 1)].push_back(r);
        }
    }

    std::vector<std::vector<cpx>> jsets = generator_julia_samples(f);
    std::vector<std::optional<JDesc>> descs;
    for (int j = 1; j <= f.count(); ++j) descs.push_back(generator_j_descriptor(f.gen(j)));

    std::vector<OverlapPoint> found;
    std::vector<cpx> kept;
    for (int i = 1; i <= f.count(); ++i) {
        for (int j = i + 1; j <= f.count(); ++j) {
            const auto& pi = pre[static_cast<std::size_t>(i - 1)];
            const auto& pj = pre[static_cast<std::size_t>(j - 1)];
            HashGrid grid(pj, std::max(tol, 1e-12));
            for (const cpx& x : pi) {
                if (grid.nearest_distance(x, tol) > tol) continue;
                bool dup = false;
                for (const cpx& k : kept) {
                    if (std::abs(x - k) < tol) {
                        dup = true;
                        break;
                    }
                }
                if (dup) continue;

                OverlapPoint op;
                op.z = x;
                op.i = i;
                op.j = j;
                cpx fi = f.gen(i).eval(x), fj = f.gen(j).eval(x);
                double bi = std::numeric_limits<double>::infinity();
                double bj = bi;
                for (int k = 1; k <= f.count(); ++k) {
                    double di = dist_to_samples(fi, jsets[static_cast<std::size_t>(k - 1)]);
                    double dj = dist_to_samples(fj, jsets[static_cast<std::size_t>(k - 1)]);
                    if (di < bi) {
                        bi = di;
                        op.alpha_ij = k;
                    }
                    if (dj < bj) {
                        bj = dj;
                        op.alpha_ji = k;
                    }
                }
                // project onto the exact overlap conditions where the target
                // Julia sets have closed forms; derivative-series evaluation
                // is only stable at genuinely admissible points
                op.z = polish_overlap(f, op.z, i, j, descs[static_cast<std::size_t>(op.alpha_ij - 1)],
                                      descs[static_cast<std::size_t>(op.alpha_ji - 1)], 3 * tol);
                dup = false;
                for (const cpx& k : kept) {
                    if (std::abs(op.z - k) < tol) {
                        dup = true;
                        break;
                    }
                }
                if (dup) continue;
                kept.push_back(op.z);

                op.word_i.preperiod.symbols = {static_cast<std::uint8_t>(i)};
                op.word_i.period.symbols = {static_cast<std::uint8_t>(op.alpha_ij)};
                op.word_j.preperiod.symbols = {static_cast<std::uint8_t>(j)};
                op.word_j.period.symbols = {static_cast<std::uint8_t>(op.alpha_ji)};
                found.push_back(op);
            }
        }
    }
    return found;
}

std::string AtcReport::to_text() const {
    char buf[160];
    std::string out;
    std::snprintf(buf, sizeof buf, "overlaps %d\n", overlap_count);
    out += buf;
    if (overlap_count == 0) {
        out += "atc vacuous\n";
    } else {
        std::snprintf(buf, sizeof buf, "min_grad_modulus %.12g\n", min_grad_modulus);
        out += buf;
        std::snprintf(buf, sizeof buf, "all_nonzero %s\n", all_nonzero ? "true" : "false");
        out += buf;
    }
    std::snprintf(buf, sizeof buf, "genprin_i %s\ngenprin_ii %s\ngenprin_iii %s\n",
                  cond_i ? "true" : "false", cond_ii ? "true" : "false", cond_iii ? "true" : "false");
    out += buf;
    std::snprintf(buf, sizeof buf, "heuristic_constants %s\nexpanding_level %d\n",
                  heuristic_constants ? "true" : "false", expanding_level);
    out += buf;
    for (const OverlapGradient& g : gradients) {
        std::snprintf(buf, sizeof buf, "overlap z=(%.9g,%.9g) pair=(%d,%d) grad=(%.9g,%.9g) tail=%.3g\n",
                      g.overlap.z.real(), g.overlap.z.imag(), g.overlap.i, g.overlap.j,
                      g.gradient.real(), g.gradient.imag(), g.tail_bound);
        out += buf;
    }
    return out;
}

AtcReport atc_certify(const PerturbationFamily& fam, const PointCloud& cloud, double tol, int terms) {
    const MultiMap& f = fam.base();
    std::vector<OverlapPoint> overlaps = find_overlaps(f, cloud, tol);
    std::vector<std::vector<cpx>> jsets = generator_julia_samples(f);
    HashGrid cloud_grid(cloud.points, std::max(tol, 1e-12));

    AtcReport rep;
    rep.overlap_count = static_cast<int>(overlaps.size());
    rep.min_grad_modulus = std::numeric_limits<double>::infinity();
    if (fam.base().expanding_estimate().has_value())
        rep.expanding_level = fam.base().expanding_estimate()->level;

    for (const OverlapPoint& op : overlaps) {
        // (i): forward images of the overlap land on a single-generator Julia set
        cpx fi = f.gen(op.i).eval(op.z);
        cpx fj = f.gen(op.j).eval(op.z);
        if (dist_to_samples(fi, jsets[static_cast<std::size_t>(op.alpha_ij - 1)]) > 3 * tol) rep.cond_i = false;
        if (dist_to_samples(fj, jsets[static_cast<std::size_t>(op.alpha_ji - 1)]) > 3 * tol) rep.cond_i = false;
        // (ii): other generators push the overlap into the Fatou set
        for (int k = 1; k <= f.count(); ++k) {
            if (k == op.i || k == op.j) continue;
            if (cloud_grid.nearest_distance(f.gen(k).eval(op.z), 4 * tol) <= 3 * tol) rep.cond_ii = false;
        }
    }
    // (iii): f_k(J(f_j)) in the Fatou set for k != j
    for (int j = 1; j <= f.count(); ++j) {
        for (int k = 1; k <= f.count(); ++k) {
            if (k == j) continue;
            for (const cpx& s : jsets[static_cast<std::size_t>(j - 1)]) {
                if (cloud_grid.nearest_distance(f.gen(k).eval(s), 4 * tol) <= 3 * tol) {
                    rep.cond_iii = false;
                    break;
                }
            }
        }
    }

    for (const OverlapPoint& op : overlaps) {
        ConjugacyDerivative di = dh_series(fam, op.word_i, terms, op.z);
        ConjugacyDerivative dj = dh_series(fam, op.word_j, terms, op.z);
        OverlapGradient og;
        og.overlap = op;
        og.gradient = di.value - dj.value;
        og.tail_bound = di.tail_bound + dj.tail_bound;
        rep.heuristic_constants = di.heuristic_constants || dj.heuristic_constants;
        rep.gradients.push_back(og);
        rep.min_grad_modulus = std::min(rep.min_grad_modulus, std::abs(og.gradient));
        if (std::abs(og.gradient) <= og.tail_bound) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "gradient below tail bound at z=(%.9g,%.9g)", op.z.real(),
                          op.z.imag());
            fail(ErrorCode::Inconclusive, buf);
        }
    }
    if (overlaps.empty()) rep.min_grad_modulus = 0.0;
    return rep;
}

AffineAtcReport atc_certify_affine(const MultiMap& f, const PointCloud& cloud, double tol, int terms) {
    if (!f.all_affine()) fail(ErrorCode::Validation, "affine certification needs degree-1 generators");
    std::vector<OverlapPoint> overlaps = find_overlaps(f, cloud, tol);

    AffineAtcReport out;
    out.report.overlap_count = static_cast<int>(overlaps.size());
    out.report.min_grad_modulus = std::numeric_limits<double>::infinity();
    out.report.heuristic_constants = false;

    double eta = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= f.count(); ++j) eta = std::min(eta, std::abs(f.gen(j).coeffs()[1]));
    if (!(eta > 1.0)) fail(ErrorCode::NotExpanding, "affine system with |a| <= 1");

    for (const OverlapPoint& op : overlaps) {
        // translate so the fixed point of g_i is the origin
        cpx ai = f.gen(op.i).coeffs()[1];
        cpx bi = f.gen(op.i).coeffs()[0];
        cpx fix_i = -bi / (ai - cpx(1, 0));
        std::vector<Polynomial> shifted;
        for (int k = 1; k <= f.count(); ++k) {
            cpx a = f.gen(k).coeffs()[1], b = f.gen(k).coeffs()[0];
            // g(z + p) - p = a z + (a p + b - p)
            shifted.push_back(Polynomial({a * fix_i + b - fix_i, a}));
        }
        MultiMap shifted_map(std::move(shifted));
        ExpandingEstimate est;
        est.C = 1.0;
        est.eta = eta;
        est.level = 0;
        est.user_supplied = true;
        shifted_map.expanding_estimate() = est;

        PerturbationFamily fam = PerturbationFamily::monomial(std::move(shifted_map), op.i, 1);
        cpx z0 = op.z - fix_i;
        ConjugacyDerivative di = dh_series(fam, op.word_i, terms, z0);
        ConjugacyDerivative dj = dh_series(fam, op.word_j, terms, z0);

        OverlapGradient og;
        og.overlap = op;
        og.gradient = di.value - dj.value;
        og.tail_bound = di.tail_bound + dj.tail_bound;
        out.report.gradients.push_back(og);
        out.expected_gradients.push_back(-z0 / ai);
        out.report.min_grad_modulus = std::min(out.report.min_grad_modulus, std::abs(og.gradient));
        if (std::abs(og.gradient) <= og.tail_bound)
            fail(ErrorCode::Inconclusive, "affine gradient below tail bound");
    }
    if (overlaps.empty()) out.report.min_grad_modulus = 0.0;
    return out;
}

std::string TcProbeResult::to_csv() const {
    std::string out = "r,measure_fraction,covering_count\n";
    char buf[96];
    for (const TcProbeRow& row : rows) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%lld\n", row.r, row.measure_fraction,
                      static_cast<long long>(row.covering_count));
        out += buf;
    }
    return out;
}

TcProbeResult tc_scaling_probe(const PerturbationFamily& fam, const EPWord& w1, const EPWord& w2,
                               const GridSpec& grid, const std::vector<double>& radii,
                               const std::optional<cpx>& seed, const ContinuationOptions& opts) {
    if (w1.symbol_at(0) == w2.symbol_at(0))
        fail(ErrorCode::Validation, "probe words must differ in the first symbol");
    if (grid.n < 2) fail(ErrorCode::Validation, "grid needs at least 2 nodes per side");

    TcProbeResult res;
    std::vector<cpx> lambdas;
    std::vector<double> deltas;
    int skipped = 0;
    for (int iy = 0; iy < grid.n; ++iy) {
        for (int ix = 0; ix < grid.n; ++ix) {
            cpx l = grid.center + cpx(-grid.radius + 2.0 * grid.radius * ix / (grid.n - 1),
                                      -grid.radius + 2.0 * grid.radius * iy / (grid.n - 1));
            try {
                cpx a = conjugacy_point(fam, w1, l, opts, seed);
                cpx b = conjugacy_point(fam, w2, l, opts, seed);
                lambdas.push_back(l);
                deltas.push_back(std::abs(a - b));
            } catch (const Error& e) {
                if (e.code() == ErrorCode::BranchCollision || e.code() == ErrorCode::NewtonDivergence)
                    ++skipped;
                else
                    throw;
            }
        }
    }
    res.skipped_nodes = skipped;
    res.valid_nodes = static_cast<int>(deltas.size());
    if (deltas.empty()) fail(ErrorCode::Inconclusive, "every grid node failed to continue");

    std::vector<double> log_r, log_frac, log_cov;
    for (double r : radii) {
        TcProbeRow row;
        row.r = r;
        std::int64_t hits = 0;
        std::unordered_set<std::uint64_t> boxes;
        for (std::size_t k = 0; k < deltas.size(); ++k) {
            if (deltas[k] <= r) {
                ++hits;
                auto bx = static_cast<std::int64_t>(std::floor(lambdas[k].real() / r));
                auto by = static_cast<std::int64_t>(std::floor(lambdas[k].imag() / r));
                boxes.insert((static_cast<std::uint64_t>(bx) << 32) ^
                             (static_cast<std::uint64_t>(by) & 0xffffffffULL));
            }
        }
        row.measure_fraction = static_cast<double>(hits) / static_cast<double>(deltas.size());
        row.covering_count = static_cast<std::int64_t>(boxes.size());
        res.rows.push_back(row);
        if (row.measure_fraction > 0.0) {
            log_r.push_back(std::log(r));
            log_frac.push_back(std::log(row.measure_fraction));
            log_cov.push_back(std::log(static_cast<double>(row.covering_count)));
        }
    }
    if (log_r.size() >= 2) {
        res.measure_exponent = least_squares(log_r, log_frac).slope;
        res.covering_exponent = least_squares(log_r, log_cov).slope;
    }
    return res;
}

}  // namespace psg
