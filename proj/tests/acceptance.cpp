// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerances in code.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "psg/errors.hpp"
#include "psg/families.hpp"
#include "psg/geometry.hpp"
#include "psg/julia.hpp"
#include "psg/randomdyn.hpp"
#include "psg/rng.hpp"
#include "psg/semigroup.hpp"
#include "psg/thermo.hpp"
#include "psg/transversality.hpp"

using namespace psg;

namespace {

int g_failures = 0;

class Criterion {
  public:
    Criterion(int index, const char* name) : index_(index), name_(name) {
        start_ = std::chrono::steady_clock::now();
    }

    void expect(bool ok, const std::string& what) {
        if (!ok) {
            failed_.push_back(what);
        }
    }

    void expect_close(double value, double target, double tol, const std::string& what) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%s = %.8g (target %.8g +- %.3g)", what.c_str(), value, target, tol);
        expect(std::abs(value - target) <= tol, buf);
    }

    void budget(double seconds) { budget_ = seconds; }

    ~Criterion() {
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        bool ok = failed_.empty() && (budget_ <= 0.0 || secs < budget_);
        if (budget_ > 0.0 && secs >= budget_) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "runtime %.1fs over the %.0fs budget", secs, budget_);
            failed_.push_back(buf);
        }
        std::printf("%s criterion %2d (%s) [%.1fs]", ok ? "PASS" : "FAIL", index_, name_, secs);
        if (!ok) {
            for (const std::string& f : failed_) std::printf(" | %s", f.c_str());
            ++g_failures;
        }
        std::printf("\n");
        std::fflush(stdout);
    }

  private:
    int index_;
    const char* name_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> failed_;
    double budget_ = 0.0;
};

MultiMap annulus_pair() { return make_quadratic_pair(cpx(2, 0), QuadKind::Additive, cpx(0, 0)); }

MultiMap gasket() {
    return make_sierpinski(cpx(1, 0), cpx(-0.5, std::sqrt(3.0) / 2), cpx(-0.5, -std::sqrt(3.0) / 2));
}

PerturbationFamily additive_family() {
    MultiMap base = annulus_pair();
    ExpandingEstimate est;
    est.C = 0.5;
    est.eta = 2.0;
    est.user_supplied = true;
    base.expanding_estimate() = est;
    return PerturbationFamily::monomial(std::move(base), 2, 0);
}

PerturbationFamily translation_family() {
    MultiMap base = annulus_pair();
    ExpandingEstimate est;
    est.C = 0.5;
    est.eta = 2.0;
    est.user_supplied = true;
    base.expanding_estimate() = est;
    return PerturbationFamily::translation(std::move(base), 2);
}

EPWord word_21() {
    EPWord w;
    w.preperiod = Word{2};
    w.period = Word{1};
    return w;
}

EPWord word_12() {
    EPWord w;
    w.preperiod = Word{1};
    w.period = Word{2};
    return w;
}

void criterion_1() {
    {
        Criterion c(1, "moran/bowen agreement");
        c.budget(40.0);  // < 10 s each for the four checks
        BowenResult interval = bowen_parameter(make_interval(), 8, 1e-8);
        c.expect_close(interval.delta, 1.0, 1e-6, "bowen(2z, 2z-1)");
        BowenResult sier = bowen_parameter(gasket(), 8, 1e-8);
        c.expect_close(sier.delta, 1.5849625007211562, 1e-4, "bowen(sierpinski)");
        c.expect_close(moran_delta(affine_ratios(make_snowflake())), std::log(7.0) / std::log(3.0), 1e-9,
                       "moran(snowflake)");
        c.expect_close(moran_delta(affine_ratios(make_pentakun())), 1.6722759381845547, 1e-9,
                       "moran(pentakun)");
    }
}

void criterion_2() {
    Criterion c(2, "box dimension under OSC");
    c.budget(30.0);
    PointCloud interval_cloud = backward_orbit(make_interval(), 200000, 256, 2026);
    DimensionFit di = box_dimension(interval_cloud, 8);
    c.expect_close(di.dimension, 1.0, 0.05, "dim(interval)");
    c.expect(di.r_squared >= 0.99, "interval fit r^2 >= 0.99");

    PointCloud gasket_cloud = backward_orbit(gasket(), 200000, 256, 2026);
    DimensionFit dg = box_dimension(gasket_cloud, 8);
    c.expect_close(dg.dimension, 1.5849625007211562, 0.05, "dim(sierpinski)");
    c.expect(dg.r_squared >= 0.99, "sierpinski fit r^2 >= 0.99");
}

void criterion_3() {
    Criterion c(3, "annulus geometry");
    c.budget(60.0);
    PointCloud cloud = backward_orbit(annulus_pair(), 6000000, 1000, 2026);
    double lo = 1e9, hi = 0.0;
    for (const cpx& p : cloud.points) {
        double r = std::abs(p);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    c.expect(lo >= 0.5 - 1e-3, "min |z| >= 0.5 - 1e-3");
    c.expect(hi <= 1.0 + 1e-3, "max |z| <= 1 + 1e-3");

    AreaEstimate area = area_estimate(cloud, 9);
    c.expect(area.positive, "area plateau detected");
    c.expect(std::abs(area.extrapolated - 0.75 * M_PI) <= 0.05 * 0.75 * M_PI,
             "area = 0.75 pi within 5%");

    DimensionFit fit = box_dimension(cloud, 9);
    c.expect_close(fit.dimension, 2.0, 0.05, "dim(annulus)");
}

void criterion_4() {
    Criterion c(4, "bowen at the classification boundary");
    c.budget(300.0);
    BowenResult r6 = bowen_parameter(annulus_pair(), 6, 1e-8);
    BowenResult r8 = bowen_parameter(annulus_pair(), 8, 1e-8);
    c.expect(r6.delta >= 1.9 && r6.delta <= 2.05, "delta at level 6 in [1.9, 2.05]");
    c.expect(r8.delta >= 1.9 && r8.delta <= 2.05, "delta at level 8 in [1.9, 2.05]");
    c.expect(std::abs(r8.delta - 2.0) <= std::abs(r6.delta - 2.0),
             "level 8 is closer to 2 than level 6");
}

void criterion_5() {
    Criterion c(5, "derivative series vs finite differences");
    c.budget(10.0);
    double eps = 1e-5;

    // monomial and conjugation-translation kinds on the quadratic pair,
    // derivative kind on the d1d2 family
    std::vector<PerturbationFamily> fams;
    fams.push_back(additive_family());
    fams.push_back(translation_family());
    {
        MultiMap base = make_d1d2(D1D2Params::make(3, 2, cpx(0.1, 0), 0.25));
        PointCloud cloud = backward_orbit(base, 20000, 512, 7);
        base.expanding_estimate() = estimate_expanding(base, cloud, 5);
        fams.push_back(PerturbationFamily::derivative_perturb(std::move(base), 2));
    }

    for (std::size_t k = 0; k < fams.size(); ++k) {
        for (const EPWord& w : {word_21(), word_12()}) {
            ConjugacyDerivative d = dh_series(fams[k], w, 64);
            cpx hp = conjugacy_point(fams[k], w, cpx(eps, 0));
            cpx hm = conjugacy_point(fams[k], w, cpx(-eps, 0));
            cpx h0 = conjugacy_point(fams[k], w, cpx(0, 0));
            cpx fd = (hp - hm) / (2.0 * eps);
            double curvature = std::abs(hp + hm - 2.0 * h0) / (eps * eps);
            double tol = 10.0 * (d.tail_bound + eps * eps * curvature) + 1e-9;
            char buf[64];
            std::snprintf(buf, sizeof buf, "family %zu word %d...", k, w.symbol_at(0));
            c.expect(std::abs(d.value - fd) < tol, std::string(buf) + " series matches FD");
        }
    }

    ConjugacyDerivative d21 = dh_series(fams[0], word_21(), 64);
    c.expect_close(std::abs(d21.value), 0.7071067811865476, 1e-4, "|dh(21^inf)| on (2z^2, z^2+l)");
}

void criterion_6() {
    Criterion c(6, "ATC certification of the paper families");
    c.budget(60.0);
    {
        PerturbationFamily fam = additive_family();
        PointCloud cloud = backward_orbit(fam.base(), 60000, 1000, 5);
        AtcReport rep = atc_certify(fam, cloud, 1e-2, 64);
        c.expect(rep.overlap_count > 0, "annulus overlaps detected");
        c.expect(rep.all_nonzero, "annulus gradients all nonzero");
        c.expect(rep.min_grad_modulus >= 0.35, "annulus min gradient modulus >= 0.35");
    }
    {
        PointCloud cloud = backward_orbit(gasket(), 60000, 512, 5);
        AffineAtcReport rep = atc_certify_affine(gasket(), cloud, 5e-3, 64);
        c.expect(rep.report.overlap_count == 3, "three gasket overlaps");
        c.expect(rep.report.all_nonzero, "gasket gradients all nonzero");
        bool match = true;
        for (std::size_t k = 0; k < rep.report.gradients.size(); ++k) {
            if (std::abs(rep.report.gradients[k].gradient - rep.expected_gradients[k]) > 1e-6) match = false;
        }
        c.expect(match, "gasket gradients match -z0/2 to 1e-6");
    }
}

void criterion_7() {
    Criterion c(7, "t1 pipeline");
    c.budget(300.0);
    T1Result t1 = find_t1(3, 2, cpx(0.1, 0));
    c.expect(t1.t1 > 0.0 && t1.t1 < 1.0 / 1.1, "t1 in (0, 0.9091)");
    c.expect(t1.certified_lower > 0.0 && t1.certified_lower <= t1.t1, "certified lower bound <= t1");

    // separating OSC and empty overlaps at t1/2
    double t_half = t1.t1 / 2;
    MultiMap f_half = make_d1d2(D1D2Params::make(3, 2, cpx(0.1, 0), t_half));
    PointCloud cloud_half = backward_orbit(f_half, 60000, 512, 17);
    c.expect(find_overlaps(f_half, cloud_half, 1e-2).empty(), "overlaps empty at t1/2");

    {
        double rho = std::pow(1.0 / t_half, 1.0);
        Polynomial gt = f_half.gen(2);
        FilledSetOracle kgt(gt, FilledSetOracle::auto_escape_radius(gt), 256);
        OpenSetSpec u;
        u.membership = [&kgt](const cpx& z) { return std::abs(z) > 1.0 && kgt.inside(z); };
        for (int k = 0; k < 360; ++k) {
            double th = 2.0 * M_PI * k / 360.0;
            u.boundary_samples.push_back(std::polar(1.0, th));
            u.boundary_samples.push_back(cpx(0.1, 0) + std::polar(rho, th));
        }
        for (int k = 0; k < 720; ++k) {
            double th = 2.0 * M_PI * k / 720.0;
            for (double s : {0.25, 0.5, 0.75}) {
                cpx inner = std::polar(1.0, th);
                cpx outer = cpx(0.1, 0) + std::polar(rho, th);
                cpx z = inner + s * (outer - inner);
                if (u.membership(z)) u.interior_samples.push_back(z);
            }
        }
        OscReport osc = osc_check(f_half, u, 1e-3 * 2.0 * rho);
        c.expect(osc.forward_invariance && osc.pairwise_disjoint && osc.separating,
                 "separating OSC at t1/2");
    }

    MultiMap f_at = make_d1d2(D1D2Params::make(3, 2, cpx(0.1, 0), t1.t1));
    PointCloud cloud_at = backward_orbit(f_at, 60000, 512, 17);
    c.expect(!find_overlaps(f_at, cloud_at, 1e-2).empty(), "overlaps nonempty at t1");

    double delta = bowen_parameter(f_half, 8, 1e-8).delta;
    double lower = d1d2_lower_bound(3, 2);
    char buf[128];
    std::snprintf(buf, sizeof buf, "delta(t1/2) = %.6f strictly in (%.6f, 2)", delta, lower);
    c.expect(delta > lower && delta < 2.0, buf);
}

void criterion_8() {
    Criterion c(8, "derivative-difference inequality at t1");
    c.budget(10.0);
    static T1Result t1 = find_t1(3, 2, cpx(0.1, 0));
    MultiMap base = make_d1d2(D1D2Params::make(3, 2, cpx(0.1, 0), t1.t1));
    PointCloud cloud = backward_orbit(base, 60000, 512, 5);
    base.expanding_estimate() = estimate_expanding(base, cloud, 5);
    PerturbationFamily fam = PerturbationFamily::derivative_perturb(std::move(base), 2);

    std::vector<OverlapPoint> ov = find_overlaps(fam.base(), cloud, 1e-2);
    c.expect(!ov.empty(), "overlap found at t1");
    if (ov.empty()) return;
    const OverlapPoint& op = ov.front();
    ConjugacyDerivative da = dh_series(fam, op.word_j, 64, op.z);  // starts with symbol 2
    ConjugacyDerivative db = dh_series(fam, op.word_i, 64, op.z);  // the tail series S
    double S = std::abs(db.value);
    c.expect(std::abs(da.value - cpx(-1, 0)) < 1e-12, "leading term is exactly -1");
    c.expect(S < 1.0, "|S| < 1");
    double diff = std::abs(da.value - db.value);
    c.expect(diff >= 1.0 - S - 1e-9 && diff > 0.0, "difference modulus >= 1 - |S| > 0");
}

void criterion_9() {
    Criterion c(9, "TC/STC scaling probes");
    c.budget(600.0);
    PerturbationFamily fam = translation_family();
    GridSpec grid;
    grid.center = cpx(0, 0);
    grid.radius = 0.05;
    grid.n = 64;
    // the overlap point -1/sqrt(2) carries the strong gradient of the pair
    cpx seed(-std::sqrt(0.5), 0);
    std::vector<double> radii = {0.06, 0.042, 0.0294, 0.0206, 0.0144, 0.0101};
    ContinuationOptions opts;
    opts.path_steps = 32;
    TcProbeResult res = tc_scaling_probe(fam, word_21(), word_12(), grid, radii, seed, opts);
    c.expect(res.skipped_nodes == 0, "no skipped grid nodes");
    c.expect_close(res.measure_exponent, 2.0, 0.3, "measure exponent");
    c.expect(std::abs(res.covering_exponent) <= 0.3, "covering count bounded (exponent ~ 0)");
}

void criterion_10() {
    Criterion c(10, "devil's coliseum estimates");
    c.budget(600.0);
    MultiMap f = annulus_pair();
    EscapeConfig cfg;
    cfg.probabilities = {0.5, 0.5};
    cfg.escape_radius = 2.0;
    cfg.max_iter = 200;
    cfg.seed = 2026;

    cfg.trials = 10000;
    bool zeros = true, ones = true;
    Rng rng(1);
    for (int k = 0; k < 8; ++k) {
        double th = 2.0 * M_PI * k / 8.0;
        if (t_infinity(f, cfg, std::polar(0.4 * rng.next_double(), th)).value != 0.0) zeros = false;
        if (t_infinity(f, cfg, std::polar(1.5 + rng.next_double(), th)).value != 1.0) ones = false;
    }
    c.expect(zeros, "T_inf exactly 0 for |z| <= 0.4");
    c.expect(ones, "T_inf exactly 1 for |z| >= 1.5");

    TInfinityEstimate a = t_infinity(f, cfg, cpx(0.30, 0));
    TInfinityEstimate b = t_infinity(f, cfg, cpx(0.31, 0));
    c.expect(std::abs(a.value - b.value) <= 2.0 * std::max(a.std_error, b.std_error) + 1e-12,
             "fatou probes agree within 2 SE");

    auto t0 = std::chrono::steady_clock::now();
    cfg.trials = 1000;
    ColiseumRaster r1 = coliseum_raster(f, cfg, cpx(-1.5, -1.5), cpx(1.5, 1.5), 512, 512);
    double raster_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    c.expect(raster_secs < 300.0, "512^2 raster within 5 minutes");
    ColiseumRaster r2 = coliseum_raster(f, cfg, cpx(-1.5, -1.5), cpx(1.5, 1.5), 512, 512);
    c.expect(r1.pixels == r2.pixels, "raster reproduces byte for byte");
}

void criterion_11() {
    Criterion c(11, "randomized invariant suites");
    c.budget(300.0);
    MultiMap f = annulus_pair();
    Rng rng(424242);

    // composition associativity and chain-rule multiplicativity
    int assoc_fail = 0, chain_fail = 0;
    for (int i = 0; i < 1000; ++i) {
        Word u, v;
        for (std::uint32_t k = 0; k < 1 + rng.next_below(3); ++k)
            u.symbols.push_back(static_cast<std::uint8_t>(1 + rng.next_below(2)));
        for (std::uint32_t k = 0; k < 1 + rng.next_below(3); ++k)
            v.symbols.push_back(static_cast<std::uint8_t>(1 + rng.next_below(2)));
        cpx z(1.8 * rng.next_double() - 0.9, 1.8 * rng.next_double() - 0.9);
        try {
            cpx whole = compose_along(f, u.concat(v), z);
            cpx split = compose_along(f, v, compose_along(f, u, z));
            if (std::abs(whole - split) > 1e-10 * (1.0 + std::abs(whole))) ++assoc_fail;
            double dw = chain_deriv(f, u.concat(v), z).norm;
            double dl = chain_deriv(f, u, z).norm;
            double dr = chain_deriv(f, v, compose_along(f, u, z)).norm;
            if (std::abs(dw - dl * dr) > 1e-10 * (1.0 + dw)) ++chain_fail;
        } catch (const Error&) {
            continue;  // escaped orbits are fine
        }
    }
    c.expect(assoc_fail == 0, "composition associativity (1000 cases)");
    c.expect(chain_fail == 0, "chain-rule multiplicativity (1000 cases)");

    // root residuals
    int root_fail = 0;
    for (int i = 0; i < 1000; ++i) {
        std::uint32_t deg = 1 + rng.next_below(6);
        std::vector<cpx> coeffs;
        for (std::uint32_t k = 0; k <= deg; ++k)
            coeffs.push_back(cpx(2 * rng.next_double() - 1, 2 * rng.next_double() - 1));
        if (std::abs(coeffs.back()) < 0.1) coeffs.back() += cpx(1, 0);
        Polynomial p(coeffs);
        double scale = 0.0;
        for (const cpx& cc : p.coeffs()) scale = std::max(scale, std::abs(cc));
        for (const cpx& r : poly_roots(p))
            if (std::abs(p.eval(r)) > 1e-10 * (1.0 + scale) * std::pow(1.0 + std::abs(r), p.degree()))
                ++root_fail;
    }
    c.expect(root_fail == 0, "root residuals (1000 cases)");

    // conjugacy cocycle identity
    PerturbationFamily fam = additive_family();
    EPWord words[] = {word_21(), word_12()};
    int cocycle_fail = 0;
    for (int i = 0; i < 1000; ++i) {
        cpx lambda(0.08 * rng.next_double() - 0.04, 0.08 * rng.next_double() - 0.04);
        const EPWord& w = words[rng.next_below(2)];
        cpx hw = conjugacy_point(fam, w, lambda);
        cpx hsw = conjugacy_point(fam, w.shifted(), lambda);
        cpx mapped = fam.generator_at(lambda, w.symbol_at(0)).eval(hw);
        if (std::abs(hsw - mapped) > 1e-9 * (1.0 + std::abs(hsw))) ++cocycle_fail;
    }
    c.expect(cocycle_fail == 0, "conjugacy cocycle identity (1000 cases)");

    // tail-bound stability: doubling the term count moves the value by at
    // most the previous tail bound
    PerturbationFamily tfam = translation_family();
    int tail_fail = 0;
    for (int i = 0; i < 1000; ++i) {
        const EPWord& w = words[rng.next_below(2)];
        PerturbationFamily& which = (i % 2 == 0) ? fam : tfam;
        int n = 4 + static_cast<int>(rng.next_below(28));
        cpx at = std::polar(std::sqrt(0.5), 2.0 * M_PI * rng.next_double());
        ConjugacyDerivative a = dh_series(which, w, n, at);
        ConjugacyDerivative b = dh_series(which, w, 2 * n, at);
        if (std::abs(b.value - a.value) > a.tail_bound + 1e-15) ++tail_fail;
    }
    c.expect(tail_fail == 0, "tail-bound stability (1000 cases)");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria failed\n", g_failures);
    return 1;
}
