#pragma once

#include "knockoffs/common.hpp"
#include "knockoffs/hmm.hpp"
#include "knockoffs/markov_chain.hpp"

#include <cstdint>
#include <vector>

namespace knockoffs {

struct EmConfig {
  int max_iters = 200;
  double tol = 1e-6;  // relative objective improvement
  int restarts = 3;
  std::uint64_t seed = 1;
  double pseudo_count = 1.0;
  int threads = 1;

  void validate() const;
};

/// Laplace-smoothed maximum likelihood for a Markov chain from n x p state
/// samples: every initial and transition count is incremented by
/// `pseudo_count` before normalizing.
MarkovChaind fit_mc_mle(const IntMatrix& samples, int states, double pseudo_count = 1.0);

struct EmFit {
  HiddenMarkovModeld model;
  double log_likelihood = 0;  // training log-likelihood of `model`
  // Per-iteration values of the maximized objective for the winning restart:
  // log-likelihood plus pseudo_count * sum(log parameters), tied tables counted
  // once. Equal to the plain log-likelihood when pseudo_count == 0.
  std::vector<double> objective_trace;
  std::vector<double> log_likelihood_trace;
  int restart = 0;
};

/// Baum-Welch EM over n x p symbol samples with random Dirichlet(1) starts;
/// returns the restart with the highest training log-likelihood.
/// `tie_across_sites` shares one transition matrix and one emission table
/// across all positions.
EmFit fit_hmm_em_detailed(const IntMatrix& samples, int states, int symbols, const EmConfig& cfg,
                          bool tie_across_sites);

HiddenMarkovModeld fit_hmm_em(const IntMatrix& samples, int states, int symbols,
                              const EmConfig& cfg, bool tie_across_sites);

/// Mean per-row log-likelihood of held-out rows; the criterion for choosing K
/// by cross-validation.
double heldout_log_likelihood(const HiddenMarkovModeld& hmm, const IntMatrix& samples);

Sequence row_sequence(const IntMatrix& m, Eigen::Index row);

}  // namespace knockoffs
