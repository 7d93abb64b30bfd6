#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace knockoffs {

// Dense state indices in [0, K). Symbolic alphabets live in label tables at
// the harness layer.
using Sequence = std::vector<int>;

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Row-major so that a row (one conditional distribution) is contiguous.
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using VectorXd = Vec<double>;
using RowMatrixXd = Mat<double>;
using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionError : Error {
  using Error::Error;
};

// The observed data has zero probability under the model.
struct ImpossibleEvidence : Error {
  using Error::Error;
};

struct SizeError : Error {
  using Error::Error;
};

struct ModelError : Error {
  using Error::Error;
};

struct ParseError : Error {
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line(line) {}
  int line;
};

/// Seeded random source. Wraps mt19937_64, whose output sequence is fixed by
/// the standard, and derives doubles from raw bits so that draws are identical
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Standard normal by Box-Muller (one draw per call, two uniforms consumed).
  double normal() {
    const double u = 1.0 - uniform();  // (0, 1]
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * 3.14159265358979323846 * v);
  }

  // Uniform integer in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  double exponential() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return -std::log(u);
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Inverse-CDF draw from an unnormalized non-negative weight vector.
  template <typename Derived>
  int discrete(const Eigen::DenseBase<Derived>& weights) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Index n = weights.size();
    Scalar total = 0;
    for (Eigen::Index k = 0; k < n; ++k) total += weights(k);
    const Scalar u = static_cast<Scalar>(uniform()) * total;
    Scalar cum = 0;
    int last_positive = -1;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (weights(k) > 0) last_positive = static_cast<int>(k);
      cum += weights(k);
      if (u < cum) return static_cast<int>(k);
    }
    // Rounding left u at or past the final cumulative sum.
    return last_positive;
  }

  /// Dirichlet(1, ..., 1) draw of length n.
  VectorXd simplex(Eigen::Index n) {
    VectorXd v(n);
    for (Eigen::Index k = 0; k < n; ++k) v(k) = exponential();
    return v / v.sum();
  }

 private:
  std::mt19937_64 engine_;
};

/// Deterministic sub-seed for task `index` under `master` (splitmix64 mix).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace knockoffs
