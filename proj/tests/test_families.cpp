#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "psg/errors.hpp"
#include "psg/families.hpp"
#include "psg/julia.hpp"
#include "psg/thermo.hpp"
#include "psg/transversality.hpp"

#include "test_util.hpp"

using namespace psg;

TEST_CASE("named families match their Moran dimensions") {
    CHECK(test::close(moran_delta(affine_ratios(make_interval())), 1.0, 1e-12));

    MultiMap gasket = make_sierpinski(cpx(1, 0), cpx(-0.5, std::sqrt(3.0) / 2), cpx(-0.5, -std::sqrt(3.0) / 2));
    CHECK(test::close(moran_delta(affine_ratios(gasket)), std::log(3.0) / std::log(2.0), 1e-12));

    MultiMap snow = make_snowflake();
    CHECK(snow.count() == 7);
    CHECK(test::close(moran_delta(affine_ratios(snow)), std::log(7.0) / std::log(3.0), 1e-12));

    MultiMap penta = make_pentakun();
    CHECK(penta.count() == 5);
    CHECK(test::close(moran_delta(affine_ratios(penta)), 1.6722759381845547, 1e-9));

    // pentakun ratio is exactly 2/(3-sqrt 5)
    double ratio = affine_ratios(penta)[0];
    CHECK(test::close(ratio, 2.0 / (3.0 - std::sqrt(5.0)), 1e-12));
}

TEST_CASE("nkun ratios are the just-touching expansions") {
    CHECK(test::close(affine_ratios(make_nkun(3))[0], 2.0, 1e-12));
    CHECK(test::close(affine_ratios(make_nkun(5))[0], (3.0 + std::sqrt(5.0)) / 2.0, 1e-12));
    CHECK(test::close(affine_ratios(make_nkun(6))[0], 3.0, 1e-12));
    CHECK(test::close(affine_ratios(make_nkun(8))[0], 2.0 + std::sqrt(2.0), 1e-12));
}

TEST_CASE("sierpinski rejects non-equilateral vertices") {
    CHECK_THROWS_AS(make_sierpinski(cpx(0, 0), cpx(1, 0), cpx(2, 0)), Error);
    CHECK_THROWS_AS(make_sierpinski(cpx(0, 0), cpx(1, 0), cpx(0.5, 0.1)), Error);
}

TEST_CASE("bowen and moran agree on every named affine family") {
    // equal-ratio systems have level-exact pressure, so the level only has
    // to keep the term budget in range
    struct Case {
        MultiMap f;
        int level;
    };
    Case cases[] = {{make_interval(), 10},
                    {make_sierpinski(cpx(1, 0), cpx(-0.5, std::sqrt(3.0) / 2), cpx(-0.5, -std::sqrt(3.0) / 2)),
                     10},
                    {make_pentakun(), 6}};
    for (Case& c : cases) {
        double moran = moran_delta(affine_ratios(c.f));
        double bowen = bowen_parameter(c.f, c.level, 1e-9).delta;
        CHECK(test::close(bowen, moran, 1e-6));
    }
}

TEST_CASE("d1d2 alpha solves the rotation congruence") {
    // theta = 0, d2 = 2: alpha = 0
    D1D2Params p = D1D2Params::make(3, 2, cpx(0.1, 0), 0.2);
    CHECK(test::close(p.alpha, 0.0, 1e-12));

    // b = 0.1i (theta = pi/2), d2 = 2: alpha = 3 pi/2
    D1D2Params q = D1D2Params::make(3, 2, cpx(0, 0.1), 0.2);
    CHECK(test::close(q.alpha, 3.0 * M_PI / 2.0, 1e-12));

    // congruence residual: d2(pi+theta) + alpha = theta (mod 2 pi)
    for (const D1D2Params& r : {p, q}) {
        double theta = std::arg(r.b);
        if (theta < 0) theta += 2.0 * M_PI;
        double resid = std::fmod(r.d2 * (M_PI + theta) + r.alpha - theta, 2.0 * M_PI);
        if (resid < 0) resid += 2.0 * M_PI;
        resid = std::min(resid, 2.0 * M_PI - resid);
        CHECK(resid < 1e-12);
    }

    CHECK_THROWS_AS(D1D2Params::make(2, 2, cpx(0.1, 0), 0.2), Error);
    CHECK_THROWS_AS(D1D2Params::make(3, 2, cpx(0.1, 0), 0.0), Error);
    CHECK_THROWS_AS(D1D2Params::make(3, 2, cpx(1.5, 0), 0.2), Error);
}

TEST_CASE("make_d1d2 builds the stated polynomials") {
    D1D2Params p = D1D2Params::make(3, 2, cpx(0.1, 0), 0.25);
    MultiMap f = make_d1d2(p);
    REQUIRE(f.count() == 2);
    CHECK(f.gen(1).degree() == 3);
    CHECK(f.gen(2).degree() == 2);
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        cpx z = test::random_point(rng);
        CHECK(test::close(f.gen(1).eval(z), z * z * z, 1e-12));
        cpx w = z - p.b;
        CHECK(test::close(f.gen(2).eval(z), 0.25 * w * w + p.b, 1e-12));
    }
}

TEST_CASE("find_t1 brackets and certifies") {
    T1Result res = find_t1(3, 2, cpx(0.1, 0));
    // upper bound 1/v^{d2-1} with v = 1.1
    CHECK(test::close(res.upper_bound, 1.0 / 1.1, 1e-12));
    CHECK(res.t1 > 0.0);
    CHECK(res.t1 < res.upper_bound);
    CHECK(res.certified_lower > 0.0);
    CHECK(res.certified_lower <= res.t1);
    // regression constant from the bisection oracle
    CHECK(test::close(res.t1, 0.497998, 2e-3));

    // predicate really holds at half the result and fails just above
    CHECK(t1_inclusion_predicate(3, 2, cpx(0.1, 0), res.t1 / 2));
    CHECK_FALSE(t1_inclusion_predicate(3, 2, cpx(0.1, 0), std::min(res.upper_bound * 0.999, res.t1 * 1.05)));
}

TEST_CASE("d1d2 bowen parameter sits between the lower bound and 2") {
    T1Result t1 = find_t1(3, 2, cpx(0.1, 0));
    double lower = d1d2_lower_bound(3, 2);
    for (double t : {t1.t1 / 2, t1.t1}) {
        MultiMap f = make_d1d2(D1D2Params::make(3, 2, cpx(0.1, 0), t));
        double delta = bowen_parameter(f, 6, 1e-8).delta;
        CHECK(delta > lower);
        CHECK(delta < 2.0);
    }
}

TEST_CASE("d1d2 overlaps appear exactly at t1") {
    T1Result t1 = find_t1(3, 2, cpx(0.1, 0));
    MultiMap below = make_d1d2(D1D2Params::make(3, 2, cpx(0.1, 0), t1.t1 / 2));
    PointCloud cb = backward_orbit(below, 40000, 512, 17);
    CHECK(find_overlaps(below, cb, 1e-2).empty());

    MultiMap at = make_d1d2(D1D2Params::make(3, 2, cpx(0.1, 0), t1.t1));
    PointCloud ca = backward_orbit(at, 40000, 512, 17);
    CHECK_FALSE(find_overlaps(at, ca, 1e-2).empty());
}

TEST_CASE("quadratic pair construction and eligibility") {
    MultiMap add = make_quadratic_pair(cpx(2, 0), QuadKind::Additive, cpx(0.3, -0.1));
    Rng rng(9);
    for (int i = 0; i < 50; ++i) {
        cpx z = test::random_point(rng);
        CHECK(test::close(add.gen(1).eval(z), 2.0 * z * z, 1e-12));
        CHECK(test::close(add.gen(2).eval(z), z * z + cpx(0.3, -0.1), 1e-12));
    }
    MultiMap tr = make_quadratic_pair(cpx(2, 0), QuadKind::Translation, cpx(0.05, 0));
    for (int i = 0; i < 50; ++i) {
        cpx z = test::random_point(rng);
        cpx w = z - cpx(0.05, 0);
        CHECK(test::close(tr.gen(2).eval(z), w * w + cpx(0.05, 0), 1e-12));
    }

    CHECK_THROWS_AS(make_quadratic_pair(cpx(1, 0), QuadKind::Additive, cpx(0, 0)), Error);
    CHECK_THROWS_AS(make_quadratic_pair(cpx(0, 0), QuadKind::Additive, cpx(0, 0)), Error);

    CHECK(quadratic_translation_eligible(cpx(2, 0)));  // |2+2+1/2| = 4.5
    // |2 + a + 1/a| = 4 on the boundary case a = 1 (excluded anyway)
    CHECK_FALSE(quadratic_translation_eligible(cpx(1, 0)));
}
