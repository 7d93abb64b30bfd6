#pragma once

#include "knockoffs/common.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace knockoffs {

/// Discrete, possibly inhomogeneous Markov chain over states 0..K-1.
///
/// `transition(t)` for t in [0, p-1) is the K x K row-stochastic matrix that
/// moves position t to position t+1: entry (l, k) = P(X_{t+1} = k | X_t = l).
/// In one-based notation this is Q_{t+2}.
template <typename Scalar>
class MarkovChain {
 public:
  using Vector = Vec<Scalar>;
  using Matrix = Mat<Scalar>;

  MarkovChain() = default;

  MarkovChain(Vector initial, std::vector<Matrix> transitions, Scalar tol = Scalar(1e-9))
      : initial_(std::move(initial)), transitions_(std::move(transitions)) {
    validate(tol);
  }

  int states() const { return static_cast<int>(initial_.size()); }
  int length() const { return static_cast<int>(transitions_.size()) + 1; }

  const Vector& initial() const { return initial_; }
  const Matrix& transition(int t) const { return transitions_[static_cast<std::size_t>(t)]; }
  const std::vector<Matrix>& transitions() const { return transitions_; }

  void check_sequence(const Sequence& x) const {
    if (static_cast<int>(x.size()) != length())
      throw DimensionError("sequence length " + std::to_string(x.size()) +
                           " does not match chain length " + std::to_string(length()));
    for (int s : x)
      if (s < 0 || s >= states())
        throw DimensionError("state " + std::to_string(s) + " out of range [0, " +
                             std::to_string(states()) + ")");
  }

 private:
  void validate(Scalar tol) const {
    const Eigen::Index K = initial_.size();
    if (K < 1) throw ModelError("chain needs at least one state");
    if ((initial_.array() < 0).any() || std::abs(initial_.sum() - Scalar(1)) > tol)
      throw ModelError("initial distribution is not a probability vector");
    for (std::size_t t = 0; t < transitions_.size(); ++t) {
      const Matrix& Q = transitions_[t];
      if (Q.rows() != K || Q.cols() != K)
        throw ModelError("transition " + std::to_string(t) + " is not " + std::to_string(K) +
                         "x" + std::to_string(K));
      if ((Q.array() < 0).any() ||
          ((Q.rowwise().sum().array() - Scalar(1)).abs() > tol).any())
        throw ModelError("transition " + std::to_string(t) + " is not row-stochastic");
    }
  }

  Vector initial_;
  std::vector<Matrix> transitions_;
};

using MarkovChaind = MarkovChain<double>;

template <typename Scalar>
Scalar log_pmf(const MarkovChain<Scalar>& chain, const Sequence& x) {
  chain.check_sequence(x);
  Scalar lp = std::log(chain.initial()(x[0]));
  for (int t = 0; t + 1 < chain.length(); ++t) lp += std::log(chain.transition(t)(x[t], x[t + 1]));
  return lp;
}

/// Forward ancestral sampling.
template <typename Scalar>
Sequence sample(const MarkovChain<Scalar>& chain, Rng& rng) {
  Sequence x(static_cast<std::size_t>(chain.length()));
  x[0] = rng.discrete(chain.initial());
  for (int t = 0; t + 1 < chain.length(); ++t)
    x[t + 1] = rng.discrete(chain.transition(t).row(x[t]));
  return x;
}

/// What step j hands to step j+1: the sampled knockoff state and the
/// normalization function N_j over all K states.
template <typename Scalar>
struct KnockoffCarry {
  int state = 0;
  Vec<Scalar> norm;
};

template <typename Scalar>
struct KnockoffStep {
  Vec<Scalar> probs;  // P(X~_j = . | X_{-j}, X~_{1:j-1}), sums to 1
  Vec<Scalar> norm;   // N_j(.); constant at the last position
};

/// Conditional law of the j-th knockoff (0-based j) given the observed
/// sequence and the previous step's carry. `prev` must be null exactly when
/// j == 0.
template <typename Scalar>
KnockoffStep<Scalar> knockoff_step(const MarkovChain<Scalar>& chain, int j, const Sequence& x,
                                   const KnockoffCarry<Scalar>* prev) {
  using Vector = Vec<Scalar>;
  const int p = chain.length();
  const Eigen::Index K = chain.states();
  if (j < 0 || j >= p) throw DimensionError("knockoff step index out of range");
  if ((j == 0) != (prev == nullptr))
    throw DimensionError("previous knockoff state is required exactly when j > 0");

  // base(l): every factor of the step that involves the candidate state l but
  // not the next observed state.
  Vector base(K);
  if (j == 0) {
    base = chain.initial();
  } else {
    const auto& Q = chain.transition(j - 1);
    for (Eigen::Index l = 0; l < K; ++l) {
      const Scalar num = Q(x[j - 1], l) * Q(prev->state, l);
      // N_{j-1}(l) > 0 whenever the numerator is, so 0/0 only drops a zero term.
      base(l) = num > 0 ? num / prev->norm(l) : Scalar(0);
    }
  }

  KnockoffStep<Scalar> step;
  if (j + 1 < p) {
    const auto& Qnext = chain.transition(j);
    step.probs = base.cwiseProduct(Qnext.col(x[j + 1]));
    step.norm = (base.transpose() * Qnext).transpose();
  } else {
    step.probs = base;
    step.norm = Vector::Constant(K, base.sum());
  }

  const Scalar total = step.probs.sum();
  if (!(total > 0) || !std::isfinite(static_cast<double>(total)))
    throw ImpossibleEvidence("zero normalization at knockoff step " + std::to_string(j + 1));
  step.probs /= total;
  return step;
}

/// Exact knockoff copy of a Markov chain sequence, one position at a time.
/// Takes no response argument: knockoffs never look at Y.
template <typename Scalar>
Sequence sample_knockoff(const MarkovChain<Scalar>& chain, const Sequence& x, Rng& rng) {
  if (!std::isfinite(static_cast<double>(log_pmf(chain, x))))
    throw ImpossibleEvidence("observed sequence has zero probability under the chain");
  const int p = chain.length();
  Sequence xk(static_cast<std::size_t>(p));
  KnockoffCarry<Scalar> carry;
  for (int j = 0; j < p; ++j) {
    KnockoffStep<Scalar> step = knockoff_step(chain, j, x, j == 0 ? nullptr : &carry);
    xk[j] = rng.discrete(step.probs);
    carry.state = xk[j];
    carry.norm = std::move(step.norm);
  }
  return xk;
}

/// Joint table over pairs (a, a~) of length-p sequences on an alphabet of the
/// given size. Entry index: code(a) + size^p * code(a~), where code() reads
/// position 0 as the least significant base-`alphabet` digit.
template <typename Scalar>
struct PairTable {
  int alphabet = 0;
  int length = 0;
  std::vector<Scalar> values;

  std::size_t half() const {
    std::size_t h = 1;
    for (int i = 0; i < length; ++i) h *= static_cast<std::size_t>(alphabet);
    return h;
  }
};

namespace detail {

inline std::size_t checked_table_size(int alphabet, int length, std::size_t limit) {
  double size = std::pow(static_cast<double>(alphabet), 2.0 * length);
  if (size > static_cast<double>(limit))
    throw SizeError("enumeration table of size " + std::to_string(size) + " exceeds guard " +
                    std::to_string(limit));
  return static_cast<std::size_t>(size);
}

inline std::size_t encode(const Sequence& s, int alphabet) {
  std::size_t code = 0;
  for (std::size_t i = s.size(); i-- > 0;) code = code * static_cast<std::size_t>(alphabet) + s[i];
  return code;
}

inline Sequence decode(std::size_t code, int alphabet, int length) {
  Sequence s(static_cast<std::size_t>(length));
  for (int i = 0; i < length; ++i) {
    s[i] = static_cast<int>(code % static_cast<std::size_t>(alphabet));
    code /= static_cast<std::size_t>(alphabet);
  }
  return s;
}

// Visits every knockoff sequence with positive probability given x, with its
// probability under the sequential knockoff conditionals.
template <typename Scalar, typename Visit>
void enumerate_knockoffs(const MarkovChain<Scalar>& chain, const Sequence& x, int j,
                         const KnockoffCarry<Scalar>* prev, Scalar weight, Sequence& xk,
                         Visit&& visit) {
  if (j == chain.length()) {
    visit(static_cast<const Sequence&>(xk), weight);
    return;
  }
  KnockoffStep<Scalar> step = knockoff_step(chain, j, x, prev);
  KnockoffCarry<Scalar> carry;
  carry.norm = step.norm;
  for (int k = 0; k < chain.states(); ++k) {
    if (!(step.probs(k) > 0)) continue;
    carry.state = k;
    xk[j] = k;
    enumerate_knockoffs(chain, x, j + 1, &carry, weight * step.probs(k), xk, visit);
  }
}

}  // namespace detail

inline constexpr std::size_t kEnumerationLimit = 1000000;

/// Exact joint pmf of (X, X~) by integrating the knockoff conditionals over
/// every observed sequence. Guarded to K^(2p) <= 1e6 cells.
template <typename Scalar>
PairTable<Scalar> exact_joint_pmf(const MarkovChain<Scalar>& chain) {
  const int K = chain.states();
  const int p = chain.length();
  PairTable<Scalar> table;
  table.alphabet = K;
  table.length = p;
  table.values.assign(detail::checked_table_size(K, p, kEnumerationLimit), Scalar(0));
  const std::size_t half = table.half();

  Sequence xk(static_cast<std::size_t>(p));
  for (std::size_t cx = 0; cx < half; ++cx) {
    const Sequence x = detail::decode(cx, K, p);
    const Scalar px = std::exp(log_pmf(chain, x));
    if (!(px > 0)) continue;
    detail::enumerate_knockoffs(chain, x, 0, static_cast<const KnockoffCarry<Scalar>*>(nullptr),
                                px, xk, [&](const Sequence& s, Scalar w) {
                                  table.values[cx + half * detail::encode(s, K)] += w;
                                });
  }
  return table;
}

/// Largest |pmf(swap_S(a, a~)) - pmf(a, a~)| over all non-empty swap sets S.
template <typename Scalar>
Scalar max_swap_deviation(const PairTable<Scalar>& table) {
  const int A = table.alphabet;
  const int p = table.length;
  const std::size_t half = table.half();
  Scalar worst = 0;
  for (unsigned mask = 1; mask < (1u << p); ++mask) {
    for (std::size_t idx = 0; idx < table.values.size(); ++idx) {
      Sequence a = detail::decode(idx % half, A, p);
      Sequence b = detail::decode(idx / half, A, p);
      for (int j = 0; j < p; ++j)
        if (mask & (1u << j)) std::swap(a[j], b[j]);
      const std::size_t swapped = detail::encode(a, A) + half * detail::encode(b, A);
      worst = std::max(worst, std::abs(table.values[swapped] - table.values[idx]));
    }
  }
  return worst;
}

}  // namespace knockoffs
