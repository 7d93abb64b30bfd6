#pragma once

#include "knockoffs/common.hpp"
#include "knockoffs/markov_chain.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace knockoffs {

/// Hidden Markov model with a discrete latent chain (K states) and per-site
/// discrete emission tables: `emission(j)(k, x) = f_j(x | k)` over M symbols.
template <typename Scalar>
class HiddenMarkovModel {
 public:
  using Vector = Vec<Scalar>;
  using Matrix = Mat<Scalar>;

  HiddenMarkovModel() = default;

  HiddenMarkovModel(MarkovChain<Scalar> latent, std::vector<Matrix> emissions,
                    Scalar tol = Scalar(1e-9))
      : latent_(std::move(latent)), emissions_(std::move(emissions)) {
    if (static_cast<int>(emissions_.size()) != latent_.length())
      throw ModelError("expected " + std::to_string(latent_.length()) + " emission tables, got " +
                       std::to_string(emissions_.size()));
    symbols_ = static_cast<int>(emissions_.front().cols());
    for (std::size_t j = 0; j < emissions_.size(); ++j) {
      const Matrix& F = emissions_[j];
      if (F.rows() != latent_.states() || F.cols() != symbols_)
        throw ModelError("emission table " + std::to_string(j) + " has the wrong shape");
      if ((F.array() < 0).any() ||
          ((F.rowwise().sum().array() - Scalar(1)).abs() > tol).any())
        throw ModelError("emission table " + std::to_string(j) + " is not row-stochastic");
    }
  }

  const MarkovChain<Scalar>& latent() const { return latent_; }
  const Matrix& emission(int j) const { return emissions_[static_cast<std::size_t>(j)]; }
  const std::vector<Matrix>& emissions() const { return emissions_; }

  int states() const { return latent_.states(); }
  int symbols() const { return symbols_; }
  int length() const { return latent_.length(); }

  void check_observed(const Sequence& x) const {
    if (static_cast<int>(x.size()) != length())
      throw DimensionError("sequence length " + std::to_string(x.size()) +
                           " does not match model length " + std::to_string(length()));
    for (int s : x)
      if (s < 0 || s >= symbols_)
        throw DimensionError("symbol " + std::to_string(s) + " out of range [0, " +
                             std::to_string(symbols_) + ")");
  }

 private:
  MarkovChain<Scalar> latent_;
  std::vector<Matrix> emissions_;
  int symbols_ = 0;
};

using HiddenMarkovModeld = HiddenMarkovModel<double>;

/// Scaled forward probabilities: row j of `alphas` (p x K) is
/// P(x_{1:j}, Z_j = .) divided by its own sum, and the logs of those sums add
/// up to log P(x).
template <typename Scalar>
struct ForwardState {
  Mat<Scalar> alphas;
  std::vector<Scalar> log_scale;

  Scalar log_likelihood() const {
    Scalar total = 0;
    for (Scalar s : log_scale) total += s;
    return total;
  }
};

template <typename Scalar>
ForwardState<Scalar> forward_pass(const HiddenMarkovModel<Scalar>& hmm, const Sequence& x) {
  hmm.check_observed(x);
  const int p = hmm.length();
  ForwardState<Scalar> fs;
  fs.alphas.resize(p, hmm.states());
  fs.log_scale.resize(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    auto a = fs.alphas.row(j);
    if (j == 0)
      a = hmm.latent().initial().transpose().cwiseProduct(hmm.emission(0).col(x[0]).transpose());
    else {
      a.noalias() = fs.alphas.row(j - 1) * hmm.latent().transition(j - 1);
      a.array() *= hmm.emission(j).col(x[j]).transpose().array();
    }
    const Scalar c = a.sum();
    if (!(c > 0))
      throw ImpossibleEvidence("observed sequence is impossible at position " +
                               std::to_string(j + 1));
    a /= c;
    fs.log_scale[j] = std::log(c);
  }
  return fs;
}

template <typename Scalar>
Scalar log_likelihood(const HiddenMarkovModel<Scalar>& hmm, const Sequence& x) {
  return forward_pass(hmm, x).log_likelihood();
}

/// pi_j(.) = P(Z_j = . | Z_{j+1} = next, x_{1:j}); `next` is ignored at the
/// last position, where the transition is taken to be identically one.
template <typename Scalar>
Vec<Scalar> backward_conditional(const HiddenMarkovModel<Scalar>& hmm,
                                 const ForwardState<Scalar>& fs, int j, int next) {
  Vec<Scalar> pi = fs.alphas.row(j).transpose();
  if (j + 1 < hmm.length()) pi = pi.cwiseProduct(hmm.latent().transition(j).col(next));
  const Scalar total = pi.sum();
  if (!(total > 0)) throw ImpossibleEvidence("degenerate forward state");
  return pi / total;
}

/// Draws a latent path from P(Z | X = x) by sampling backwards from Z_p.
template <typename Scalar>
Sequence backward_sample(const HiddenMarkovModel<Scalar>& hmm, const ForwardState<Scalar>& fs,
                         Rng& rng) {
  const int p = hmm.length();
  Sequence z(static_cast<std::size_t>(p));
  for (int j = p - 1; j >= 0; --j)
    z[j] = rng.discrete(backward_conditional(hmm, fs, j, j + 1 < p ? z[j + 1] : 0));
  return z;
}

template <typename Scalar>
Sequence emit(const HiddenMarkovModel<Scalar>& hmm, const Sequence& z, Rng& rng) {
  hmm.latent().check_sequence(z);
  Sequence x(z.size());
  for (std::size_t j = 0; j < z.size(); ++j)
    x[j] = rng.discrete(hmm.emission(static_cast<int>(j)).row(z[j]));
  return x;
}

/// Joint draw of (Z, X) from the model.
template <typename Scalar>
std::pair<Sequence, Sequence> sample(const HiddenMarkovModel<Scalar>& hmm, Rng& rng) {
  Sequence z = sample(hmm.latent(), rng);
  Sequence x = emit(hmm, z, rng);
  return {std::move(z), std::move(x)};
}

struct HmmKnockoff {
  Sequence knockoff;        // X~
  Sequence latent;          // Z sampled from P(Z | X)
  Sequence latent_knockoff;  // Z~
};

/// Knockoff copy of an HMM sequence: impute the latent path from its
/// posterior, take a Markov chain knockoff of it, and re-emit.
template <typename Scalar>
HmmKnockoff sample_knockoff(const HiddenMarkovModel<Scalar>& hmm, const Sequence& x, Rng& rng) {
  HmmKnockoff out;
  const ForwardState<Scalar> fs = forward_pass(hmm, x);
  out.latent = backward_sample(hmm, fs, rng);
  out.latent_knockoff = sample_knockoff(hmm.latent(), out.latent, rng);
  out.knockoff = emit(hmm, out.latent_knockoff, rng);
  return out;
}

namespace detail {

template <typename Scalar>
Scalar joint_latent_observed(const HiddenMarkovModel<Scalar>& hmm, const Sequence& x,
                             const Sequence& z) {
  Scalar prob = hmm.latent().initial()(z[0]) * hmm.emission(0)(z[0], x[0]);
  for (int j = 1; j < hmm.length(); ++j)
    prob *= hmm.latent().transition(j - 1)(z[j - 1], z[j]) * hmm.emission(j)(z[j], x[j]);
  return prob;
}

template <typename Scalar, typename Visit>
void enumerate_posterior(const HiddenMarkovModel<Scalar>& hmm, const ForwardState<Scalar>& fs,
                         int j, Scalar weight, Sequence& z, Visit&& visit) {
  if (j < 0) {
    visit(static_cast<const Sequence&>(z), weight);
    return;
  }
  const Vec<Scalar> pi =
      backward_conditional(hmm, fs, j, j + 1 < hmm.length() ? z[j + 1] : 0);
  for (int k = 0; k < hmm.states(); ++k) {
    if (!(pi(k) > 0)) continue;
    z[j] = k;
    enumerate_posterior(hmm, fs, j - 1, weight * pi(k), z, visit);
  }
}

}  // namespace detail

/// P(x) as an explicit sum over all K^p latent paths.
template <typename Scalar>
Scalar brute_force_likelihood(const HiddenMarkovModel<Scalar>& hmm, const Sequence& x) {
  hmm.check_observed(x);
  const int K = hmm.states();
  const int p = hmm.length();
  std::size_t paths = 1;
  for (int j = 0; j < p; ++j) paths *= static_cast<std::size_t>(K);
  if (paths > kEnumerationLimit) throw SizeError("too many latent paths to enumerate");
  Scalar total = 0;
  for (std::size_t c = 0; c < paths; ++c)
    total += detail::joint_latent_observed(hmm, x, detail::decode(c, K, p));
  return total;
}

/// Exact joint law of ((X, Z), (X~, Z~)) under the knockoff procedure.
/// Combined per-site symbol: x * K + z. Guarded to (K*M)^(2p) <= 1e6 cells.
template <typename Scalar>
PairTable<Scalar> exact_hmm_joint(const HiddenMarkovModel<Scalar>& hmm) {
  const int K = hmm.states();
  const int M = hmm.symbols();
  const int p = hmm.length();
  const int A = K * M;
  PairTable<Scalar> table;
  table.alphabet = A;
  table.length = p;
  table.values.assign(detail::checked_table_size(A, p, kEnumerationLimit), Scalar(0));
  const std::size_t half = table.half();

  std::size_t observed = 1;
  for (int j = 0; j < p; ++j) observed *= static_cast<std::size_t>(M);

  Sequence z(static_cast<std::size_t>(p)), zk(static_cast<std::size_t>(p));
  Sequence combined(static_cast<std::size_t>(p)), combined_k(static_cast<std::size_t>(p));
  for (std::size_t cx = 0; cx < observed; ++cx) {
    const Sequence x = detail::decode(cx, M, p);
    const Scalar px = brute_force_likelihood(hmm, x);
    if (!(px > 0)) continue;
    const ForwardState<Scalar> fs = forward_pass(hmm, x);
    detail::enumerate_posterior(hmm, fs, p - 1, px, z, [&](const Sequence& zs, Scalar wz) {
      for (int j = 0; j < p; ++j) combined[j] = x[j] * K + zs[j];
      const std::size_t lo = detail::encode(combined, A);
      detail::enumerate_knockoffs(
          hmm.latent(), zs, 0, static_cast<const KnockoffCarry<Scalar>*>(nullptr), wz, zk,
          [&](const Sequence& zks, Scalar wzk) {
            // Re-emission: every X~ consistent with Z~.
            std::size_t emitted = 1;
            for (int j = 0; j < p; ++j) emitted *= static_cast<std::size_t>(M);
            for (std::size_t ck = 0; ck < emitted; ++ck) {
              const Sequence xk = detail::decode(ck, M, p);
              Scalar w = wzk;
              for (int j = 0; j < p && w > 0; ++j) w *= hmm.emission(j)(zks[j], xk[j]);
              if (!(w > 0)) continue;
              for (int j = 0; j < p; ++j) combined_k[j] = xk[j] * K + zks[j];
              table.values[lo + half * detail::encode(combined_k, A)] += w;
            }
          });
    });
  }
  return table;
}

/// Sums an exact HMM joint over the latent coordinates, leaving (X, X~).
template <typename Scalar>
PairTable<Scalar> marginalize_latent(const PairTable<Scalar>& joint, int states) {
  const int M = joint.alphabet / states;
  const int p = joint.length;
  PairTable<Scalar> out;
  out.alphabet = M;
  out.length = p;
  const std::size_t out_half = out.half();
  out.values.assign(out_half * out_half, Scalar(0));
  const std::size_t half = joint.half();
  for (std::size_t idx = 0; idx < joint.values.size(); ++idx) {
    if (joint.values[idx] == 0) continue;
    Sequence a = detail::decode(idx % half, joint.alphabet, p);
    Sequence b = detail::decode(idx / half, joint.alphabet, p);
    for (int j = 0; j < p; ++j) {
      a[j] /= states;
      b[j] /= states;
    }
    out.values[detail::encode(a, M) + out_half * detail::encode(b, M)] += joint.values[idx];
  }
  return out;
}

}  // namespace knockoffs
