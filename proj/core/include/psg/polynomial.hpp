#pragma once

#include <vector>

#include "psg/cpx.hpp"

namespace psg {

// Dense polynomial with complex coefficients in ascending degree order.
// Trailing coefficients below 1e-14 of the largest modulus are trimmed to
// define the effective degree.
class Polynomial {
  public:
    Polynomial() = default;
    explicit Polynomial(std::vector<cpx> coeffs);

    static Polynomial monomial_shifted(const cpx& scale, const cpx& center, int degree, const cpx& offset);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_constant() const { return coeffs_.size() == 1; }
    const std::vector<cpx>& coeffs() const { return coeffs_; }
    const cpx& leading() const { return coeffs_.back(); }

    cpx eval(const cpx& z) const;
    cpx eval_derivative(const cpx& z) const;
    Polynomial derivative() const;

    Polynomial operator-(const cpx& c) const;
    Polynomial operator+(const Polynomial& q) const;
    Polynomial scaled(const cpx& s) const;

    // p(q(z)) by Horner over coefficient polynomials.
    Polynomial compose(const Polynomial& q) const;

    // Shifted-monomial shape c*(z-b)^d + e, detected at construction.
    // Makes root extraction closed-form for every family in this project.
    bool is_shifted_monomial() const { return shifted_monomial_; }
    const cpx& sm_scale() const { return sm_scale_; }
    const cpx& sm_center() const { return sm_center_; }
    const cpx& sm_offset() const { return sm_offset_; }

    // Sum of coefficient moduli for degrees < deg; used for escape-radius
    // bounds |p(z)| >= |lead| |z|^d - lower_tail(|z|).
    double lower_coeff_abs_sum() const;

  private:
    void detect_shifted_monomial();

    std::vector<cpx> coeffs_ = {cpx(0.0, 0.0)};
    bool shifted_monomial_ = false;
    cpx sm_scale_{}, sm_center_{}, sm_offset_{};
};

struct RootOptions {
    double residual_tol = 1e-12;
    int max_iter = 500;
};

// All deg(p) roots with multiplicity. Closed form through degree 2 and for
// shifted monomials; Aberth-Ehrlich simultaneous iteration otherwise.
// Throws NonConvergence if the residual target is not met.
std::vector<cpx> poly_roots(const Polynomial& p, const RootOptions& opts = {});

}  // namespace psg
