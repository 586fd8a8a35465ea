#pragma once

#include <string>
#include <vector>

#include "psg/cpx.hpp"
#include "psg/semigroup.hpp"

namespace psg {

// (2z, 2z-1); Julia set [0,1].
MultiMap make_interval();
// Three maps 2(z - p_i) + p_i on an equilateral triangle; gasket.
MultiMap make_sierpinski(const cpx& p1, const cpx& p2, const cpx& p3);
// Seven maps 3(z - p_j) + p_j, p_j = exp(2 pi i j/6) and p_7 = 0; snowflake.
MultiMap make_snowflake();
// Five maps (2/(3-sqrt 5))(z - p_j) + p_j on the fifth roots of unity.
MultiMap make_pentakun();
// k-gon analogue with the just-touching expansion 2(1 + sum cos(2 pi l/k)).
MultiMap make_nkun(int k);

// Contraction ratios |a_j| of an affine multimap, for the Moran equation.
std::vector<double> affine_ratios(const MultiMap& f);

struct D1D2Params {
    int d1 = 3;
    int d2 = 2;
    cpx b{0.1, 0.0};
    double alpha = 0.0;  // rotation angle satisfying d2(pi+theta)+alpha = theta mod 2pi
    double t = 0.0;

    // Computes alpha from b and validates the ranges.
    static D1D2Params make(int d1, int d2, const cpx& b, double t);
};

// (z^{d1}, t e^{i alpha}(z-b)^{d2} + b).
MultiMap make_d1d2(const D1D2Params& p);

struct T1Result {
    double t1 = 0.0;
    double upper_bound = 0.0;     // 1/v^{d2-1}, v = 1+|b|
    double certified_lower = 0.0; // a_R from the growth-rate inequality
    int predicate_evals = 0;
};

struct T1Options {
    double tol = 1e-4;
    int boundary_samples = 720;
    double margin_scale = 1e-3;  // margin = margin_scale * diameter of K(g_c)
    int oracle_max_iter = 256;
};

// Bisection boundary of the nested filled-set inclusion chain in t, assumed
// monotone; a violated monotonicity scan throws PredicateNonMonotone.
T1Result find_t1(int d1, int d2, const cpx& b, const T1Options& opts = {});

// The inclusion predicate itself, exposed for the OSC/overlap cross-checks.
bool t1_inclusion_predicate(int d1, int d2, const cpx& b, double t, const T1Options& opts = {});

enum class QuadKind { Translation, Additive };

// (az^2, (z-l)^2 + l) or (az^2, z^2 + l). BadModulus when |a| is 0 or 1.
MultiMap make_quadratic_pair(const cpx& a, QuadKind kind, const cpx& lambda);

// Membership in the paper-style eligibility set |2 + a + 1/a| != 4 used by
// the translation-family certification.
bool quadratic_translation_eligible(const cpx& a);

}  // namespace psg
