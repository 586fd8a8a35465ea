#include "psg/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "psg/errors.hpp"

namespace psg {

namespace {

constexpr double kTrimTol = 1e-14;

double max_coeff_abs(const std::vector<cpx>& c) {
    double m = 0.0;
    for (const cpx& v : c) m = std::max(m, std::abs(v));
    return m;
}

// Coefficients of scale*(z-center)^degree + offset, ascending.
std::vector<cpx> shifted_monomial_coeffs(const cpx& scale, const cpx& center, int degree, const cpx& offset) {
    std::vector<cpx> c(static_cast<std::size_t>(degree) + 1, cpx(0, 0));
    double binom = 1.0;
    cpx pw(1.0, 0.0);
    for (int k = degree; k >= 0; --k) {
        c[static_cast<std::size_t>(k)] = scale * binom * pw;
        if (k > 0) {
            binom = binom * k / (degree - k + 1);
            pw *= -center;
        }
    }
    c[0] += offset;
    return c;
}

}  // namespace

Polynomial::Polynomial(std::vector<cpx> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) fail(ErrorCode::Validation, "polynomial needs at least one coefficient");
    for (const cpx& c : coeffs_) {
        if (!is_finite(c)) fail(ErrorCode::Validation, "non-finite polynomial coefficient");
    }
    double scale = max_coeff_abs(coeffs_);
    while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= kTrimTol * scale) coeffs_.pop_back();
    detect_shifted_monomial();
}

Polynomial Polynomial::monomial_shifted(const cpx& scale, const cpx& center, int degree, const cpx& offset) {
    return Polynomial(shifted_monomial_coeffs(scale, center, degree, offset));
}

cpx Polynomial::eval(const cpx& z) const {
    cpx acc(0.0, 0.0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

cpx Polynomial::eval_derivative(const cpx& z) const {
    cpx acc(0.0, 0.0);
    for (int k = degree(); k >= 1; --k) acc = acc * z + coeffs_[static_cast<std::size_t>(k)] * static_cast<double>(k);
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (is_constant()) return Polynomial({cpx(0, 0)});
    std::vector<cpx> c(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) c[k - 1] = coeffs_[k] * static_cast<double>(k);
    return Polynomial(std::move(c));
}

Polynomial Polynomial::operator-(const cpx& c) const {
    std::vector<cpx> out = coeffs_;
    out[0] -= c;
    return Polynomial(std::move(out));
}

Polynomial Polynomial::operator+(const Polynomial& q) const {
    std::vector<cpx> out(std::max(coeffs_.size(), q.coeffs_.size()), cpx(0, 0));
    for (std::size_t k = 0; k < coeffs_.size(); ++k) out[k] += coeffs_[k];
    for (std::size_t k = 0; k < q.coeffs_.size(); ++k) out[k] += q.coeffs_[k];
    return Polynomial(std::move(out));
}

Polynomial Polynomial::scaled(const cpx& s) const {
    std::vector<cpx> out = coeffs_;
    for (cpx& c : out) c *= s;
    return Polynomial(std::move(out));
}

Polynomial Polynomial::compose(const Polynomial& q) const {
    Polynomial acc({coeffs_.back()});
    for (int k = degree() - 1; k >= 0; --k) {
        Polynomial prod({cpx(0, 0)});
        // acc * q
        std::vector<cpx> pc(acc.coeffs_.size() + q.coeffs_.size() - 1, cpx(0, 0));
        for (std::size_t i = 0; i < acc.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < q.coeffs_.size(); ++j) pc[i + j] += acc.coeffs_[i] * q.coeffs_[j];
        pc[0] += coeffs_[static_cast<std::size_t>(k)];
        acc = Polynomial(std::move(pc));
    }
    return acc;
}

void Polynomial::detect_shifted_monomial() {
    shifted_monomial_ = false;
    int d = degree();
    if (d < 1) return;
    if (d == 1) {
        shifted_monomial_ = true;
        sm_scale_ = coeffs_[1];
        sm_center_ = cpx(0, 0);
        sm_offset_ = coeffs_[0];
        return;
    }
    // If p = c(z-b)^d + e then b = -c_{d-1}/(d c_d).
    cpx lead = coeffs_.back();
    cpx b = -coeffs_[static_cast<std::size_t>(d) - 1] / (lead * static_cast<double>(d));
    std::vector<cpx> cand = shifted_monomial_coeffs(lead, b, d, cpx(0, 0));
    double scale = max_coeff_abs(coeffs_);
    for (int k = 1; k <= d; ++k) {
        if (std::abs(cand[static_cast<std::size_t>(k)] - coeffs_[static_cast<std::size_t>(k)]) > 1e-12 * scale)
            return;
    }
    shifted_monomial_ = true;
    sm_scale_ = lead;
    sm_center_ = b;
    sm_offset_ = coeffs_[0] - cand[0];
}

double Polynomial::lower_coeff_abs_sum() const {
    double s = 0.0;
    for (std::size_t k = 0; k + 1 < coeffs_.size(); ++k) s += std::abs(coeffs_[k]);
    return s;
}

namespace {

std::vector<cpx> roots_shifted_monomial(const Polynomial& p) {
    // c(z-b)^d + e = 0  =>  z = b + w, w^d = -e/c.
    int d = p.degree();
    cpx rhs = -p.sm_offset() / p.sm_scale();
    double r = std::pow(std::abs(rhs), 1.0 / d);
    double base = std::arg(rhs) / d;
    std::vector<cpx> out;
    out.reserve(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        double th = base + 2.0 * M_PI * k / d;
        out.push_back(p.sm_center() + cpx(r * std::cos(th), r * std::sin(th)));
    }
    return out;
}

std::vector<cpx> roots_quadratic(const Polynomial& p) {
    const cpx a = p.coeffs()[2], b = p.coeffs()[1], c = p.coeffs()[0];
    cpx disc = std::sqrt(b * b - 4.0 * a * c);
    // Pick the sign that avoids cancellation in -b -/+ disc.
    cpx q = (std::real(std::conj(b) * disc) >= 0.0) ? -0.5 * (b + disc) : -0.5 * (b - disc);
    std::vector<cpx> out(2);
    if (std::abs(q) > 0.0) {
        out[0] = q / a;
        out[1] = c / q;
    } else {
        out[0] = out[1] = cpx(0, 0);
    }
    return out;
}

}  // namespace

std::vector<cpx> poly_roots(const Polynomial& p, const RootOptions& opts) {
    int d = p.degree();
    if (d < 1) fail(ErrorCode::Validation, "poly_roots needs degree >= 1");
    if (d == 1) return {-p.coeffs()[0] / p.coeffs()[1]};
    if (p.is_shifted_monomial()) return roots_shifted_monomial(p);
    if (d == 2) return roots_quadratic(p);

    // Aberth-Ehrlich on the max-coefficient-normalized polynomial.
    double scale = 0.0;
    for (const cpx& c : p.coeffs()) scale = std::max(scale, std::abs(c));
    Polynomial q = p.scaled(cpx(1.0 / scale, 0.0));

    // Cauchy-style inclusion radius.
    double radius = 0.0;
    for (int k = 0; k < d; ++k)
        radius = std::max(radius, std::abs(q.coeffs()[static_cast<std::size_t>(k)] / q.leading()));
    radius = 1.0 + radius;

    std::vector<cpx> z(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
        double th = 2.0 * M_PI * k / d + 0.4;  // offset avoids symmetry stalls
        z[static_cast<std::size_t>(k)] = 0.5 * radius * cpx(std::cos(th), std::sin(th));
    }

    auto residual_ok = [&](const cpx& r) {
        return std::abs(q.eval(r)) < opts.residual_tol * std::pow(1.0 + std::abs(r), d);
    };

    for (int iter = 0; iter < opts.max_iter; ++iter) {
        bool all_ok = true;
        for (std::size_t i = 0; i < z.size(); ++i) {
            cpx pi = q.eval(z[i]);
            if (std::abs(pi) < 1e-300) continue;
            cpx dpi = q.eval_derivative(z[i]);
            cpx ratio = (std::abs(dpi) > 0.0) ? pi / dpi : cpx(opts.residual_tol, 0);
            cpx sum(0, 0);
            for (std::size_t j = 0; j < z.size(); ++j) {
                if (j == i) continue;
                cpx diff = z[i] - z[j];
                if (std::abs(diff) < 1e-300) diff = cpx(1e-300, 0);
                sum += 1.0 / diff;
            }
            cpx denom = 1.0 - ratio * sum;
            cpx step = (std::abs(denom) > 1e-300) ? ratio / denom : ratio;
            z[i] -= step;
            if (std::abs(step) > 1e-15 * (1.0 + std::abs(z[i]))) all_ok = false;
        }
        if (all_ok) break;
    }

    for (const cpx& r : z) {
        if (!residual_ok(r) || !is_finite(r))
            fail(ErrorCode::NonConvergence, "root residual target not met");
    }
    return z;
}

}  // namespace psg
