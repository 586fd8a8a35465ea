#pragma once

#include <cmath>

#include "psg/cpx.hpp"
#include "psg/rng.hpp"

namespace psg::test {

inline cpx random_point(Rng& rng, double radius = 2.0) {
    return cpx(radius * (2.0 * rng.next_double() - 1.0), radius * (2.0 * rng.next_double() - 1.0));
}

inline bool close(const cpx& a, const cpx& b, double tol) { return std::abs(a - b) <= tol; }

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace psg::test
