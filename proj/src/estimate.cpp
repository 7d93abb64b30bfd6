#include "knockoffs/estimate.hpp"

#include "knockoffs/parallel.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace knockoffs {

namespace {

constexpr Eigen::Index kEStepChunk = 64;

struct Counts {
  VectorXd initial;
  std::vector<RowMatrixXd> transitions;
  std::vector<RowMatrixXd> emissions;
  double log_likelihood = 0;

  Counts(int K, int M, int n_trans, int n_emit)
      : initial(VectorXd::Zero(K)),
        transitions(static_cast<std::size_t>(n_trans), RowMatrixXd::Zero(K, K)),
        emissions(static_cast<std::size_t>(n_emit), RowMatrixXd::Zero(K, M)) {}

  void merge(const Counts& other) {
    initial += other.initial;
    for (std::size_t t = 0; t < transitions.size(); ++t) transitions[t] += other.transitions[t];
    for (std::size_t t = 0; t < emissions.size(); ++t) emissions[t] += other.emissions[t];
    log_likelihood += other.log_likelihood;
  }
};

void check_symbols(const IntMatrix& samples, int alphabet, const char* what) {
  if (samples.rows() < 1 || samples.cols() < 1) throw DimensionError("empty sample matrix");
  if ((samples.array() < 0).any() || (samples.array() >= alphabet).any())
    throw DimensionError(std::string(what) + " outside [0, " + std::to_string(alphabet) + ")");
}

RowMatrixXd normalize_rows(const RowMatrixXd& counts, double pc) {
  RowMatrixXd out = counts.array() + pc;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double s = out.row(i).sum();
    if (!(s > 0)) throw ModelError("row " + std::to_string(i) + " has no counts to normalize");
    out.row(i) /= s;
  }
  return out;
}

// Log of the Dirichlet(pc + 1) prior density (up to a constant) that the
// smoothed M-step maximizes against; tied tables count once.
double log_prior(const HiddenMarkovModeld& hmm, double pc, bool tied) {
  if (pc == 0) return 0;
  double s = hmm.latent().initial().array().log().sum();
  const auto& trans = hmm.latent().transitions();
  const std::size_t n_trans = tied ? std::min<std::size_t>(1, trans.size()) : trans.size();
  const std::size_t n_emit = tied ? 1 : hmm.emissions().size();
  for (std::size_t t = 0; t < n_trans; ++t) s += trans[t].array().log().sum();
  for (std::size_t j = 0; j < n_emit; ++j) s += hmm.emissions()[j].array().log().sum();
  return pc * s;
}

// Expand tied parameters to one table per site.
HiddenMarkovModeld assemble(const VectorXd& q1, const std::vector<RowMatrixXd>& Q,
                            const std::vector<RowMatrixXd>& F, int p) {
  std::vector<RowMatrixXd> trans, emit;
  for (int t = 0; t + 1 < p; ++t) trans.push_back(Q.size() == 1 ? Q[0] : Q[t]);
  for (int j = 0; j < p; ++j) emit.push_back(F.size() == 1 ? F[0] : F[j]);
  return {MarkovChaind(q1, std::move(trans), 1e-8), std::move(emit), 1e-8};
}

// Per-thread scratch vectors for the backward recursion.
struct Workspace {
  VectorXd beta, gamma, weighted;
  explicit Workspace(Eigen::Index K) : beta(K), gamma(K), weighted(K) {}
};

// Scaled forward-backward for one row; adds expected counts into `acc`.
void accumulate_row(const HiddenMarkovModeld& hmm, const Sequence& x, bool tied, Counts& acc,
                    Workspace& ws) {
  const int p = hmm.length();
  const Eigen::Index K = hmm.states();
  const ForwardState<double> fs = forward_pass(hmm, x);
  acc.log_likelihood += fs.log_likelihood();

  VectorXd& beta = ws.beta;
  VectorXd& gamma = ws.gamma;
  VectorXd& weighted = ws.weighted;
  beta.setOnes();
  for (int j = p - 1; j >= 0; --j) {
    gamma = fs.alphas.row(j).transpose().cwiseProduct(beta);
    gamma /= gamma.sum();
    acc.emissions[tied ? 0 : static_cast<std::size_t>(j)].col(x[j]) += gamma;
    if (j == 0) {
      acc.initial += gamma;
      break;
    }
    // beta_j scaled by 1/c_j carries the emission of site j into the step.
    weighted = hmm.emission(j).col(x[j]).cwiseProduct(beta) / std::exp(fs.log_scale[j]);
    const RowMatrixXd& T = hmm.latent().transition(j - 1);
    RowMatrixXd& xi = acc.transitions[tied ? 0 : static_cast<std::size_t>(j - 1)];
    for (Eigen::Index a = 0; a < K; ++a) {
      const double alpha = fs.alphas(j - 1, a);
      if (alpha == 0) continue;
      xi.row(a).array() += alpha * weighted.transpose().array() * T.row(a).array();
    }
    beta.noalias() = T * weighted;
  }
}

}  // namespace

void EmConfig::validate() const {
  if (max_iters < 1) throw ModelError("max_iters must be >= 1");
  if (!(tol > 0)) throw ModelError("tol must be > 0");
  if (restarts < 1) throw ModelError("restarts must be >= 1");
  if (pseudo_count < 0) throw ModelError("pseudo_count must be >= 0");
}

Sequence row_sequence(const IntMatrix& m, Eigen::Index row) {
  Sequence s(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index j = 0; j < m.cols(); ++j) s[j] = m(row, j);
  return s;
}

MarkovChaind fit_mc_mle(const IntMatrix& samples, int states, double pseudo_count) {
  if (pseudo_count < 0) throw ModelError("pseudo_count must be >= 0");
  check_symbols(samples, states, "states");
  const Eigen::Index n = samples.rows();
  const Eigen::Index p = samples.cols();

  VectorXd q1 = VectorXd::Constant(states, pseudo_count);
  for (Eigen::Index i = 0; i < n; ++i) q1(samples(i, 0)) += 1;
  q1 /= static_cast<double>(n) + states * pseudo_count;

  std::vector<RowMatrixXd> Q;
  Q.reserve(static_cast<std::size_t>(p - 1));
  for (Eigen::Index t = 0; t + 1 < p; ++t) {
    RowMatrixXd counts = RowMatrixXd::Zero(states, states);
    for (Eigen::Index i = 0; i < n; ++i) counts(samples(i, t), samples(i, t + 1)) += 1;
    for (int l = 0; l < states; ++l)
      if (pseudo_count == 0 && counts.row(l).sum() == 0)
        throw ModelError("state " + std::to_string(l) + " never observed at position " +
                         std::to_string(t + 1) + "; transition row is undefined");
    Q.push_back(normalize_rows(counts, pseudo_count));
  }
  return MarkovChaind(std::move(q1), std::move(Q));
}

EmFit fit_hmm_em_detailed(const IntMatrix& samples, int states, int symbols, const EmConfig& cfg,
                          bool tie_across_sites) {
  cfg.validate();
  if (states < 1 || symbols < 1) throw ModelError("states and symbols must be positive");
  if (states > 2000 || static_cast<long long>(states) * symbols > 100000)
    throw SizeError("K*M = " + std::to_string(static_cast<long long>(states) * symbols) +
                    " exceeds the EM sanity bound");
  check_symbols(samples, symbols, "symbols");

  const Eigen::Index n = samples.rows();
  const int p = static_cast<int>(samples.cols());
  const int n_trans = tie_across_sites ? 1 : std::max(p - 1, 0);
  const int n_emit = tie_across_sites ? 1 : p;
  const double pc = cfg.pseudo_count;
  const int threads = resolve_threads(cfg.threads);

  std::vector<Sequence> rows;
  rows.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) rows.push_back(row_sequence(samples, i));
  const std::size_t chunks = static_cast<std::size_t>((n + kEStepChunk - 1) / kEStepChunk);

  EmFit best;
  double best_ll = -std::numeric_limits<double>::infinity();

  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Rng rng(derive_seed(cfg.seed, static_cast<std::uint64_t>(restart)));
    VectorXd q1 = rng.simplex(states);
    std::vector<RowMatrixXd> Q(static_cast<std::size_t>(n_trans), RowMatrixXd(states, states));
    std::vector<RowMatrixXd> F(static_cast<std::size_t>(n_emit), RowMatrixXd(states, symbols));
    for (auto& m : Q)
      for (int i = 0; i < states; ++i) m.row(i) = rng.simplex(states).transpose();
    for (auto& m : F)
      for (int i = 0; i < states; ++i) m.row(i) = rng.simplex(symbols).transpose();

    HiddenMarkovModeld model = assemble(q1, Q, F, p);
    std::vector<double> objective_trace, ll_trace;
    double prev_objective = -std::numeric_limits<double>::infinity();
    double final_ll = 0;

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
      // E-step in fixed chunks merged in order: identical for any thread count.
      std::vector<Counts> partial(chunks, Counts(states, symbols, n_trans, n_emit));
      parallel_for(chunks, threads, [&](std::size_t c) {
        const Eigen::Index lo = static_cast<Eigen::Index>(c) * kEStepChunk;
        const Eigen::Index hi = std::min(n, lo + kEStepChunk);
        Workspace ws(states);
        for (Eigen::Index i = lo; i < hi; ++i)
          accumulate_row(model, rows[static_cast<std::size_t>(i)], tie_across_sites, partial[c],
                         ws);
      });
      Counts total(states, symbols, n_trans, n_emit);
      for (const auto& part : partial) total.merge(part);

      const double objective = total.log_likelihood + log_prior(model, pc, tie_across_sites);
      objective_trace.push_back(objective);
      ll_trace.push_back(total.log_likelihood);
      final_ll = total.log_likelihood;
      const bool converged = iter > 0 && (objective - prev_objective) <=
                                             cfg.tol * std::abs(prev_objective);
      if (converged) break;
      prev_objective = objective;

      // M-step.
      q1 = (total.initial.array() + pc) / (total.initial.sum() + states * pc);
      for (int t = 0; t < n_trans; ++t) Q[t] = normalize_rows(total.transitions[t], pc);
      for (int t = 0; t < n_emit; ++t) F[t] = normalize_rows(total.emissions[t], pc);
      HiddenMarkovModeld next = assemble(q1, Q, F, p);
      if (iter + 1 == cfg.max_iters) {
        // Score the final update so the reported likelihood matches the model.
        double ll = 0;
        for (const auto& r : rows) ll += log_likelihood(next, r);
        objective_trace.push_back(ll + log_prior(next, pc, tie_across_sites));
        ll_trace.push_back(ll);
        final_ll = ll;
      }
      model = std::move(next);
    }

    if (final_ll > best_ll) {
      best_ll = final_ll;
      best.model = model;
      best.log_likelihood = final_ll;
      best.objective_trace = std::move(objective_trace);
      best.log_likelihood_trace = std::move(ll_trace);
      best.restart = restart;
    }
  }
  return best;
}

HiddenMarkovModeld fit_hmm_em(const IntMatrix& samples, int states, int symbols,
                              const EmConfig& cfg, bool tie_across_sites) {
  return fit_hmm_em_detailed(samples, states, symbols, cfg, tie_across_sites).model;
}

double heldout_log_likelihood(const HiddenMarkovModeld& hmm, const IntMatrix& samples) {
  double total = 0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i)
    total += log_likelihood(hmm, row_sequence(samples, i));
  return total / static_cast<double>(samples.rows());
}

}  // namespace knockoffs
