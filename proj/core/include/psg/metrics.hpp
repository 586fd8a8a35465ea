#pragma once

#include "psg/cpx.hpp"
#include "psg/polynomial.hpp"

namespace psg {

enum class Metric { Euclidean, Spherical };

// Chordal metric 2|z-w| / sqrt((1+|z|^2)(1+|w|^2)); a constant multiple of
// spherical arc length, which is all the estimates here need.
double spherical_distance(const cpx& z, const cpx& w);

// Euclidean: |p'(z)|. Spherical: |p'(z)| (1+|z|^2)/(1+|p(z)|^2).
double deriv_norm(const Polynomial& p, const cpx& z, Metric metric);

}  // namespace psg
