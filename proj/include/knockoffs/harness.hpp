#pragma once

#include "knockoffs/common.hpp"
#include "knockoffs/estimate.hpp"
#include "knockoffs/genotype.hpp"
#include "knockoffs/hmm.hpp"
#include "knockoffs/markov_chain.hpp"
#include "knockoffs/select.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace knockoffs {

// ---------------------------------------------------------------------------
// Toy covariate models
// ---------------------------------------------------------------------------

/// Markov chain with uniform start and per-site stickiness gamma_j: the
/// diagonal of each transition is 1/K + gamma_j (1 - 1/K) and the remaining
/// mass is spread evenly off the diagonal.
struct ToyMcSpec {
  int p = 200;
  int K = 5;
  VectorXd gamma;  // length p-1, each in [0, 0.5] for the standard design
  std::uint64_t seed = 1;

  /// Draws gamma_j ~ Uniform[0, 0.5] once from `seed`.
  static ToyMcSpec make(int p, std::uint64_t seed, int K = 5);
};

MarkovChaind build_toy_mc(const ToyMcSpec& spec);

/// Left-right ("clockwise") HMM: latent start in state 0, stay with
/// `self_prob`, advance to (l + 1) mod K with `step_prob`. Each latent state z
/// emits symbols z and z+1 (wrapping to 0 for z = K-1) with probability
/// gamma/2 each and every other symbol with (1 - gamma)/(K - 2).
struct ToyHmmSpec {
  int p = 200;
  int K = 9;
  int M = 9;
  double gamma = 0.35;
  double self_prob = 0.9;
  double step_prob = 0.1;
  std::uint64_t seed = 1;
};

HiddenMarkovModeld build_toy_hmm(const ToyHmmSpec& spec);

/// Synthetic haplotype-motif model for the genotype design: r_j drawn from
/// Uniform[0.05, 1], alpha rows Dirichlet(1), theta Uniform[0.05, 0.95].
struct ToyGenoSpec {
  int p = 200;
  int K = 4;
  std::uint64_t seed = 1;
};

HaplotypeModeld build_toy_geno(const ToyGenoSpec& spec);

/// Numeric value of each state index entering the linear predictor.
std::vector<double> state_labels(int states, double first);

// ---------------------------------------------------------------------------
// Response model
// ---------------------------------------------------------------------------

struct ResponseSpec {
  int s = 20;
  double amplitude = 10;
  std::vector<int> truth;  // 0-based, ascending
  VectorXd beta;           // a / sqrt(n) on truth, zero elsewhere

  /// Truth drawn uniformly without replacement from p indices.
  static ResponseSpec make(int p, int n, int s, double amplitude, Rng& rng);
};

double logistic_sigmoid(double t);

/// Y ~ Bernoulli(sigmoid(x^T beta)) for a row already mapped to labels.
int sample_response(const VectorXd& x, const VectorXd& beta, Rng& rng);

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

enum class Design { Mc, Hmm, Geno };

struct ModelSource {
  enum class Kind { True, Refit, Unsupervised } kind = Kind::True;
  int unsupervised_n = 0;

  static ModelSource parse(const std::string& text);
  std::string name() const;
};

std::string design_name(Design d);
Design parse_design(const std::string& text);

struct ExperimentConfig {
  Design design = Design::Mc;
  ModelSource source;
  int n = 300;
  int p = 200;
  int s = 20;
  std::vector<double> amplitudes{10};
  int replications = 50;
  double alpha = 0.1;
  int offset = 1;
  std::uint64_t seed = 1;
  int folds = 10;
  int lambda_grid = 100;
  Combiner combiner = Combiner::Difference;
  int threads = 1;
  int hmm_states = 9;   // latent states of the toy HMM (and of its refit)
  int geno_motifs = 4;  // haplotype motifs of the synthetic genotype model
  EmConfig em;
  double pseudo_count = 1.0;  // Laplace smoothing for Markov chain refits
  LassoOptions lasso;
};

struct ReplicateRecord {
  int replicate = 0;
  double amplitude = 0;
  double fdp = 0;
  double power = 0;
  int n_selected = 0;
  double wall_ms = 0;
  double max_kkt_violation = 0;
};

/// Runs every (amplitude, replicate) pair. Each pair draws its own data from
/// a seed derived from (seed, amplitude index, replicate); results come back
/// sorted by amplitude then replicate and do not depend on `threads`.
std::vector<ReplicateRecord> run_experiment(const ExperimentConfig& cfg);

struct SummaryRow {
  double amplitude = 0;
  int count = 0;
  double fdr = 0;
  double fdr_half_width = 0;
  double power = 0;
  double power_half_width = 0;
  double mean_selected = 0;
};

/// Mean FDP and power per amplitude with normal-approximation 95% half-widths
/// 1.96 * sd / sqrt(R), sd with the R-1 denominator.
std::vector<SummaryRow> summarize(const std::vector<ReplicateRecord>& records);

/// Boxplots of FDP and power per amplitude with a dashed line at alpha.
std::string render_svg(const std::vector<ReplicateRecord>& records, double alpha,
                       const std::string& title);

// ---------------------------------------------------------------------------
// Correlation-cluster pruning
// ---------------------------------------------------------------------------

/// Single-linkage clusters where columns i, j join when |corr(i, j)| exceeds
/// `cutoff`. Entries of `excluded` are left as singletons labelled -1.
std::vector<int> single_linkage_clusters(const Eigen::MatrixXd& abs_corr, double cutoff,
                                         const std::vector<bool>& excluded = {});

struct PruneResult {
  std::vector<int> representatives;  // one column per cluster, ascending
  std::vector<int> cluster;          // per column; -1 for excluded columns
  std::vector<int> excluded;         // constant columns
  std::vector<int> holdout_rows;     // rows used to rank representatives
  std::vector<double> pvalues;       // marginal p-values on the holdout rows
};

/// Clusters columns by single linkage on absolute correlation, then keeps in
/// each cluster the column with the smallest marginal association p-value
/// computed on a random `holdout_frac` of the rows only.
PruneResult cluster_prune(const Eigen::MatrixXd& data, const VectorXd& y, double cutoff,
                          double holdout_frac, Rng& rng);

/// Rows that were already used to rank representatives get knockoffs identical
/// to the originals, so reusing them in the selection step stays valid.
IntMatrix recycle_holdout(const IntMatrix& knockoffs, const IntMatrix& originals,
                          const std::vector<int>& holdout_rows);

}  // namespace knockoffs
