#include "psg/metrics.hpp"

#include <cmath>

#include "psg/errors.hpp"

namespace psg {

double spherical_distance(const cpx& z, const cpx& w) {
    if (!is_finite(z) || !is_finite(w)) fail(ErrorCode::Validation, "non-finite point");
    return 2.0 * std::abs(z - w) / std::sqrt((1.0 + norm2(z)) * (1.0 + norm2(w)));
}

double deriv_norm(const Polynomial& p, const cpx& z, Metric metric) {
    if (!is_finite(z)) fail(ErrorCode::Validation, "non-finite point");
    double d = std::abs(p.eval_derivative(z));
    if (metric == Metric::Euclidean) return d;
    return d * (1.0 + norm2(z)) / (1.0 + norm2(p.eval(z)));
}

}  // namespace psg
