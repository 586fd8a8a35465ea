#include "psg/randomdyn.hpp"

#include <cmath>

#include "psg/errors.hpp"
#include "psg/julia.hpp"
#include "psg/parallel.hpp"
#include "psg/rng.hpp"

namespace psg {

void EscapeConfig::validate(const MultiMap& f) const {
    if (static_cast<int>(probabilities.size()) != f.count())
        fail(ErrorCode::Validation, "probability count must match generator count");
    double s = 0.0;
    for (double p : probabilities) {
        if (!(p > 0.0)) fail(ErrorCode::Validation, "probabilities must be positive");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-12) fail(ErrorCode::Validation, "probabilities must sum to 1");
    if (max_iter < 1 || trials < 1) fail(ErrorCode::Validation, "max_iter and trials must be >= 1");

    // |z| > R must force monotone escape under every generator.
    for (int j = 1; j <= f.count(); ++j) {
        const Polynomial& g = f.gen(j);
        double lead = std::abs(g.leading());
        double tail = g.lower_coeff_abs_sum();
        double grow = lead * std::pow(escape_radius, g.degree()) - tail * std::pow(escape_radius, g.degree() - 1);
        if (g.degree() == 1) grow = lead * escape_radius - tail;
        if (!(grow > escape_radius))
            fail(ErrorCode::Validation, "escape radius too small for generator growth bound");
    }
}

double certified_trap_radius(const MultiMap& f, double escape_radius) {
    double best = 0.0;
    for (int k = 0; k < 400; ++k) {
        double r = escape_radius * std::pow(0.97, k);
        double img = 0.0;
        for (int j = 1; j <= f.count(); ++j) {
            const Polynomial& g = f.gen(j);
            double s = 0.0, pw = 1.0;
            for (const cpx& c : g.coeffs()) {
                s += std::abs(c) * pw;
                pw *= r;
            }
            img = std::max(img, s);
        }
        if (img < r * (1.0 - 1e-9)) best = std::max(best, r);
    }
    return best;
}

namespace {

// Cumulative probability table for generator choice from one uniform draw.
std::vector<double> cumulative(const std::vector<double>& p) {
    std::vector<double> c(p.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        acc += p[i];
        c[i] = acc;
    }
    c.back() = 1.0;
    return c;
}

}  // namespace

namespace {

TInfinityEstimate t_infinity_impl(const MultiMap& f, const EscapeConfig& cfg, const cpx& z,
                                  std::uint64_t stream, const std::vector<double>& cum, double trap) {
    double r2 = cfg.escape_radius * cfg.escape_radius;
    double trap2 = trap * trap;

    int escaped = 0, undecided = 0;
    for (int trial = 0; trial < cfg.trials; ++trial) {
        Rng rng(cfg.seed ^ (0xa5c1e5d2b9ULL * (stream + 1)), static_cast<std::uint64_t>(trial));
        cpx w = z;
        bool esc = false, trapped = false;
        for (int it = 0; it < cfg.max_iter; ++it) {
            double n2 = norm2(w);
            if (n2 > r2) {
                esc = true;
                break;
            }
            if (n2 < trap2) {
                trapped = true;
                break;
            }
            double u = rng.next_double();
            int j = 1;
            while (j < f.count() && u > cum[static_cast<std::size_t>(j - 1)]) ++j;
            w = f.gen(j).eval(w);
        }
        if (esc)
            ++escaped;
        else if (!trapped && norm2(w) <= r2)
            ++undecided;  // counted as bounded, flagged
    }

    TInfinityEstimate est;
    est.trials = cfg.trials;
    est.undecided = undecided;
    est.value = static_cast<double>(escaped) / cfg.trials;
    est.std_error = std::sqrt(est.value * (1.0 - est.value) / cfg.trials);
    return est;
}

}  // namespace

TInfinityEstimate t_infinity(const MultiMap& f, const EscapeConfig& cfg, const cpx& z, std::uint64_t stream) {
    cfg.validate(f);
    return t_infinity_impl(f, cfg, z, stream, cumulative(cfg.probabilities),
                           certified_trap_radius(f, cfg.escape_radius));
}

ColiseumRaster coliseum_raster(const MultiMap& f, const EscapeConfig& cfg, const cpx& bbox_min,
                               const cpx& bbox_max, int nx, int ny) {
    cfg.validate(f);
    if (nx < 2 || ny < 2) fail(ErrorCode::Validation, "resolution must be at least 2x2");
    ColiseumRaster r;
    r.bbox_min = bbox_min;
    r.bbox_max = bbox_max;
    r.nx = nx;
    r.ny = ny;
    r.pixels.assign(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0);

    double wx = bbox_max.real() - bbox_min.real();
    double wy = bbox_max.imag() - bbox_min.imag();
    std::vector<double> cum = cumulative(cfg.probabilities);
    double trap = certified_trap_radius(f, cfg.escape_radius);

    parallel_for(static_cast<std::size_t>(ny), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t row = lo; row < hi; ++row) {
            for (int x = 0; x < nx; ++x) {
                // pixel center; row 0 = top = max imaginary part
                double px = bbox_min.real() + wx * (x + 0.5) / nx;
                double py = bbox_max.imag() - wy * (static_cast<double>(row) + 0.5) / ny;
                std::uint64_t stream = row * static_cast<std::uint64_t>(nx) + static_cast<std::uint64_t>(x);
                TInfinityEstimate est = t_infinity_impl(f, cfg, cpx(px, py), stream, cum, trap);
                r.pixels[row * static_cast<std::size_t>(nx) + static_cast<std::size_t>(x)] =
                    static_cast<std::uint8_t>(std::lround(255.0 * est.value));
            }
        }
    });
    return r;
}

void write_coliseum_pgm(const ColiseumRaster& r, const std::string& path) {
    write_pgm_gray(r.pixels, r.nx, r.ny, path);
}

}  // namespace psg
