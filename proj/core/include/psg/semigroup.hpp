#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "psg/cpx.hpp"
#include "psg/metrics.hpp"
#include "psg/polynomial.hpp"

namespace psg {

// Intermediate values past this modulus count as escaped.
constexpr double kEscapeSentinel = 1e150;

// Symbol sequence over {1..m}; first symbol acts first.
struct Word {
    std::vector<std::uint8_t> symbols;

    Word() = default;
    Word(std::initializer_list<int> s) {
        for (int v : s) symbols.push_back(static_cast<std::uint8_t>(v));
    }
    std::size_t size() const { return symbols.size(); }
    bool empty() const { return symbols.empty(); }
    int operator[](std::size_t i) const { return symbols[i]; }

    Word concat(const Word& tail) const {
        Word out = *this;
        out.symbols.insert(out.symbols.end(), tail.symbols.begin(), tail.symbols.end());
        return out;
    }
};

// Eventually periodic word: preperiod followed by infinitely repeated period.
struct EPWord {
    Word preperiod;
    Word period;  // nonempty

    // Symbol at position n (0-based) of the infinite word.
    int symbol_at(std::size_t n) const {
        if (n < preperiod.size()) return preperiod[n];
        return period[(n - preperiod.size()) % period.size()];
    }
    // Left shift: drops the first symbol (rotating the period if needed).
    EPWord shifted() const;
};

struct ExpandingEstimate {
    double C = 1.0;   // in (0, 1]
    double eta = 1.0; // > 1
    int level = 0;
    bool user_supplied = false;
};

// Ordered generator list f = (f_1, ..., f_m), 1-based symbols.
class MultiMap {
  public:
    explicit MultiMap(std::vector<Polynomial> generators);

    int count() const { return static_cast<int>(gens_.size()); }
    const Polynomial& gen(int j) const { return gens_[static_cast<std::size_t>(j - 1)]; }
    const std::vector<Polynomial>& generators() const { return gens_; }
    const Polynomial& gen_derivative(int j) const { return dgens_[static_cast<std::size_t>(j - 1)]; }
    int total_degree() const { return total_degree_; }
    bool all_affine() const;

    std::optional<ExpandingEstimate>& expanding_estimate() { return estimate_; }
    const std::optional<ExpandingEstimate>& expanding_estimate() const { return estimate_; }

  private:
    std::vector<Polynomial> gens_;
    std::vector<Polynomial> dgens_;
    int total_degree_ = 0;
    std::optional<ExpandingEstimate> estimate_;
};

// f_w := f_{w_n} o ... o f_{w_1} applied to z; empty word is the identity.
// Throws Overflow past the escape sentinel.
cpx compose_along(const MultiMap& f, const Word& w, cpx z);

struct ChainDeriv {
    double norm = 1.0;       // product of per-step deriv_norm values
    cpx complex_deriv{1, 0}; // Euclidean chain derivative f_w'(z)
    cpx endpoint{0, 0};      // f_w(z)
};

ChainDeriv chain_deriv(const MultiMap& f, const Word& w, cpx z, Metric metric = Metric::Euclidean);

// All solutions of f_j(z) = w, with multiplicity.
std::vector<cpx> inverse_branches(const MultiMap& f, int j, const cpx& w);

class PointCloud;  // julia.hpp

// Estimates (C, eta) of the fiberwise expanding bound min |f_w'(z)| >= C eta^k
// by walking preimage trees from sampled cloud points (preimages stay near the
// Julia set, which keeps the word/point pairs admissible). Heuristic, finite
// sample. Throws NotExpanding if the depth-n minimum chain derivative is <= 1.
ExpandingEstimate estimate_expanding(const MultiMap& f, const PointCloud& cloud, int level,
                                     Metric metric = Metric::Euclidean, int sample_points = 32);

struct PostcriticalSample {
    std::vector<cpx> points;
    bool bounded = true;
    double radius = 0.0;
};

// Forward images, under all words up to the given depth, of all finite
// critical values of all generators.
PostcriticalSample postcritical_sample(const MultiMap& f, int depth, double escape_radius);

}  // namespace psg
