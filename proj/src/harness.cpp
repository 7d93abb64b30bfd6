#include "knockoffs/harness.hpp"

#include "knockoffs/parallel.hpp"

#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <numeric>
#include <sstream>

namespace knockoffs {

// ---------------------------------------------------------------------------
// Toy covariate models
// ---------------------------------------------------------------------------

ToyMcSpec ToyMcSpec::make(int p, std::uint64_t seed, int K) {
  if (p < 1 || K < 2) throw ModelError("toy chain needs p >= 1 and K >= 2");
  ToyMcSpec spec;
  spec.p = p;
  spec.K = K;
  spec.seed = seed;
  Rng rng(seed);
  spec.gamma.resize(p - 1);
  for (int j = 0; j + 1 < p; ++j) spec.gamma(j) = 0.5 * rng.uniform();
  return spec;
}

MarkovChaind build_toy_mc(const ToyMcSpec& spec) {
  if (spec.p < 1 || spec.K < 2) throw ModelError("toy chain needs p >= 1 and K >= 2");
  if (spec.gamma.size() != spec.p - 1) throw DimensionError("gamma must have length p - 1");
  const int K = spec.K;
  std::vector<RowMatrixXd> Q;
  Q.reserve(static_cast<std::size_t>(spec.p - 1));
  for (int j = 0; j + 1 < spec.p; ++j) {
    const double g = spec.gamma(j);
    if (!(g >= 0 && g <= 1)) throw ModelError("gamma outside [0, 1]");
    const double diag = 1.0 / K + g * (1.0 - 1.0 / K);
    RowMatrixXd m = RowMatrixXd::Constant(K, K, (1.0 - diag) / (K - 1));
    m.diagonal().setConstant(diag);
    Q.push_back(std::move(m));
  }
  return MarkovChaind(VectorXd::Constant(K, 1.0 / K), std::move(Q));
}

HiddenMarkovModeld build_toy_hmm(const ToyHmmSpec& spec) {
  const int K = spec.K;
  if (K != spec.M) throw ModelError("toy HMM needs matching latent and emission alphabets");
  if (K < 3) throw ModelError("toy HMM needs K >= 3");
  if (spec.p < 1) throw ModelError("toy HMM needs p >= 1");
  if (!(spec.gamma > 0 && spec.gamma < 1)) throw ModelError("gamma must lie in (0, 1)");
  if (std::abs(spec.self_prob + spec.step_prob - 1) > 1e-12 || spec.self_prob < 0 ||
      spec.step_prob < 0)
    throw ModelError("self and step probabilities must be non-negative and sum to 1");

  RowMatrixXd Q = RowMatrixXd::Zero(K, K);
  RowMatrixXd F = RowMatrixXd::Constant(K, K, (1 - spec.gamma) / (K - 2));
  for (int z = 0; z < K; ++z) {
    Q(z, z) += spec.self_prob;
    Q(z, (z + 1) % K) += spec.step_prob;
    F(z, z) = spec.gamma / 2;
    F(z, (z + 1) % K) = spec.gamma / 2;
  }
  VectorXd q1 = VectorXd::Zero(K);
  q1(0) = 1;
  std::vector<RowMatrixXd> trans(static_cast<std::size_t>(spec.p - 1), Q);
  std::vector<RowMatrixXd> emit(static_cast<std::size_t>(spec.p), F);
  return {MarkovChaind(std::move(q1), std::move(trans)), std::move(emit)};
}

HaplotypeModeld build_toy_geno(const ToyGenoSpec& spec) {
  if (spec.p < 1 || spec.K < 1) throw ModelError("toy genotype model needs p, K >= 1");
  Rng rng(spec.seed);
  VectorXd r(spec.p);
  RowMatrixXd alpha(spec.p, spec.K), theta(spec.p, spec.K);
  for (int j = 0; j < spec.p; ++j) {
    r(j) = 0.05 + 0.95 * rng.uniform();
    alpha.row(j) = rng.simplex(spec.K).transpose();
    for (int k = 0; k < spec.K; ++k) theta(j, k) = 0.05 + 0.9 * rng.uniform();
  }
  return {std::move(r), std::move(alpha), std::move(theta)};
}

std::vector<double> state_labels(int states, double first) {
  std::vector<double> labels(static_cast<std::size_t>(states));
  for (int k = 0; k < states; ++k) labels[k] = first + k;
  return labels;
}

// ---------------------------------------------------------------------------
// Response model
// ---------------------------------------------------------------------------

ResponseSpec ResponseSpec::make(int p, int n, int s, double amplitude, Rng& rng) {
  if (s < 0 || s > p) throw ModelError("need 0 <= s <= p");
  if (n < 1) throw ModelError("need n >= 1");
  ResponseSpec spec;
  spec.s = s;
  spec.amplitude = amplitude;
  std::vector<int> pool(static_cast<std::size_t>(p));
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < s; ++i)
    std::swap(pool[i], pool[i + rng.below(static_cast<std::uint64_t>(p - i))]);
  spec.truth.assign(pool.begin(), pool.begin() + s);
  std::sort(spec.truth.begin(), spec.truth.end());
  spec.beta = VectorXd::Zero(p);
  for (int j : spec.truth) spec.beta(j) = amplitude / std::sqrt(static_cast<double>(n));
  return spec;
}

double logistic_sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

int sample_response(const VectorXd& x, const VectorXd& beta, Rng& rng) {
  if (x.size() != beta.size()) throw DimensionError("beta length does not match x");
  return rng.bernoulli(logistic_sigmoid(x.dot(beta))) ? 1 : 0;
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

ModelSource ModelSource::parse(const std::string& text) {
  ModelSource src;
  if (text == "true") {
    src.kind = Kind::True;
  } else if (text == "refit") {
    src.kind = Kind::Refit;
  } else if (text.rfind("unsup:", 0) == 0) {
    src.kind = Kind::Unsupervised;
    std::size_t used = 0;
    int n = 0;
    try {
      n = std::stoi(text.substr(6), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != text.size() - 6 || n < 1)
      throw ModelError("unsup:N needs a positive integer N");
    src.unsupervised_n = n;
  } else {
    throw ModelError("unknown model source '" + text + "' (expected true, refit or unsup:N)");
  }
  return src;
}

std::string ModelSource::name() const {
  switch (kind) {
    case Kind::True:
      return "true";
    case Kind::Refit:
      return "refit";
    case Kind::Unsupervised:
      return "unsup:" + std::to_string(unsupervised_n);
  }
  return "";
}

std::string design_name(Design d) {
  switch (d) {
    case Design::Mc:
      return "mc";
    case Design::Hmm:
      return "hmm";
    case Design::Geno:
      return "geno";
  }
  return "";
}

Design parse_design(const std::string& text) {
  if (text == "mc") return Design::Mc;
  if (text == "hmm") return Design::Hmm;
  if (text == "geno") return Design::Geno;
  throw ModelError("unknown design '" + text + "' (expected mc, hmm or geno)");
}

namespace {

// Covariate model of a design: either a plain chain or an HMM, plus the
// numeric value of every observed symbol.
struct CovariateModel {
  bool is_chain = true;
  MarkovChaind chain;
  HiddenMarkovModeld hmm;
  std::vector<double> labels;
  int symbols = 0;

  IntMatrix draw(int n, Rng& rng) const {
    const int p = is_chain ? chain.length() : hmm.length();
    IntMatrix x(n, p);
    for (int i = 0; i < n; ++i) {
      const Sequence row = is_chain ? sample(chain, rng) : sample(hmm, rng).second;
      for (int j = 0; j < p; ++j) x(i, j) = row[j];
    }
    return x;
  }
};

double centered_first_label(int states) { return -0.5 * (states - 1); }

CovariateModel make_model(const ExperimentConfig& cfg) {
  CovariateModel m;
  switch (cfg.design) {
    case Design::Mc: {
      m.chain = build_toy_mc(ToyMcSpec::make(cfg.p, derive_seed(cfg.seed, 0xC0FFEE)));
      m.symbols = m.chain.states();
      m.labels = state_labels(m.symbols, centered_first_label(m.symbols));
      break;
    }
    case Design::Hmm: {
      ToyHmmSpec spec;
      spec.p = cfg.p;
      spec.K = spec.M = cfg.hmm_states;
      m.is_chain = false;
      m.hmm = build_toy_hmm(spec);
      m.symbols = m.hmm.symbols();
      m.labels = state_labels(m.symbols, centered_first_label(m.symbols));
      break;
    }
    case Design::Geno: {
      ToyGenoSpec spec;
      spec.p = cfg.p;
      spec.K = cfg.geno_motifs;
      spec.seed = derive_seed(cfg.seed, 0xC0FFEE);
      m.is_chain = false;
      m.hmm = compile_genotype_hmm(build_toy_geno(spec));
      m.symbols = 3;
      m.labels = state_labels(3, 0);
      break;
    }
  }
  return m;
}

// Fits the knockoff-generation model for one replicate.
CovariateModel fit_model(const ExperimentConfig& cfg, const CovariateModel& truth,
                         const IntMatrix& x, std::uint64_t seed) {
  if (cfg.design == Design::Geno)
    throw ModelError("the genotype design supports only the true model source");
  CovariateModel fitted = truth;
  if (truth.is_chain) {
    fitted.chain = fit_mc_mle(x, truth.symbols, cfg.pseudo_count);
  } else {
    EmConfig em = cfg.em;
    em.seed = seed;
    em.threads = 1;
    fitted.hmm = fit_hmm_em(x, cfg.hmm_states, truth.symbols, em, true);
  }
  return fitted;
}

Eigen::MatrixXd to_labels(const IntMatrix& x, const std::vector<double>& labels) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) out(i, j) = labels[static_cast<std::size_t>(x(i, j))];
  return out;
}

ReplicateRecord run_replicate(const ExperimentConfig& cfg, const CovariateModel& truth,
                              double amplitude, int replicate, std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  Rng data_rng(derive_seed(seed, 0));
  Rng knock_rng(derive_seed(seed, 1));
  Rng cv_rng(derive_seed(seed, 2));

  const ResponseSpec response = ResponseSpec::make(cfg.p, cfg.n, cfg.s, amplitude, data_rng);
  const IntMatrix x = truth.draw(cfg.n, data_rng);
  const Eigen::MatrixXd xl = to_labels(x, truth.labels);
  VectorXd y(cfg.n);
  for (int i = 0; i < cfg.n; ++i)
    y(i) = sample_response(xl.row(i).transpose(), response.beta, data_rng);

  CovariateModel model = truth;
  switch (cfg.source.kind) {
    case ModelSource::Kind::True:
      break;
    case ModelSource::Kind::Refit:
      model = fit_model(cfg, truth, x, derive_seed(seed, 3));
      break;
    case ModelSource::Kind::Unsupervised: {
      const IntMatrix extra = truth.draw(cfg.source.unsupervised_n, data_rng);
      model = fit_model(cfg, truth, extra, derive_seed(seed, 3));
      break;
    }
  }

  IntMatrix xk(cfg.n, cfg.p);
  for (int i = 0; i < cfg.n; ++i) {
    const Sequence row = row_sequence(x, i);
    const Sequence k =
        model.is_chain ? sample_knockoff(model.chain, row, knock_rng)
                       : sample_knockoff(model.hmm, row, knock_rng).knockoff;
    for (int j = 0; j < cfg.p; ++j) xk(i, j) = k[j];
  }

  const AugmentedDesign design =
      AugmentedDesign::build(xl, to_labels(xk, truth.labels), y, Family::Logistic);
  const CvResult cv = l1_fit_cv(design, cfg.folds, cfg.lambda_grid, cv_rng, cfg.lasso);
  const WStatistics w = compute_w(cv.fit.beta, cfg.combiner);
  const FilterResult filter = knockoff_threshold(w.w, cfg.alpha, cfg.offset);
  const FdpPower fp = fdp_power(filter.selected, response.truth);

  ReplicateRecord rec;
  rec.replicate = replicate;
  rec.amplitude = amplitude;
  rec.fdp = fp.fdp;
  rec.power = fp.power;
  rec.n_selected = static_cast<int>(filter.selected.size());
  rec.max_kkt_violation = kkt_violation(design.matrix, design.response, design.family, cv.fit);
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count();
  return rec;
}

}  // namespace

std::vector<ReplicateRecord> run_experiment(const ExperimentConfig& cfg) {
  if (cfg.n < cfg.folds || cfg.folds < 2) throw ModelError("need n >= folds >= 2");
  if (cfg.p < 1 || cfg.s < 0 || cfg.s > cfg.p) throw ModelError("need p >= 1 and 0 <= s <= p");
  if (cfg.replications < 1) throw ModelError("need at least one replication");
  if (!(cfg.alpha > 0 && cfg.alpha < 1)) throw ModelError("alpha must lie in (0, 1)");
  if (cfg.offset != 0 && cfg.offset != 1) throw ModelError("offset must be 0 or 1");
  if (cfg.design == Design::Geno && cfg.source.kind != ModelSource::Kind::True)
    throw ModelError("the genotype design supports only the true model source");

  const CovariateModel truth = make_model(cfg);
  const std::size_t reps = static_cast<std::size_t>(cfg.replications);
  const std::size_t total = cfg.amplitudes.size() * reps;
  std::vector<ReplicateRecord> records(total);
  parallel_for(total, resolve_threads(cfg.threads), [&](std::size_t task) {
    const std::size_t a = task / reps;
    const int r = static_cast<int>(task % reps);
    const std::uint64_t seed = derive_seed(derive_seed(cfg.seed, a + 1), static_cast<std::uint64_t>(r));
    records[task] = run_replicate(cfg, truth, cfg.amplitudes[a], r, seed);
  });
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<ReplicateRecord>& records) {
  std::vector<double> order;
  std::map<double, std::vector<const ReplicateRecord*>> groups;
  for (const auto& r : records) {
    if (!groups.count(r.amplitude)) order.push_back(r.amplitude);
    groups[r.amplitude].push_back(&r);
  }
  std::vector<SummaryRow> rows;
  for (double a : order) {
    const auto& g = groups[a];
    const double R = static_cast<double>(g.size());
    SummaryRow row;
    row.amplitude = a;
    row.count = static_cast<int>(g.size());
    double sel = 0;
    for (const auto* r : g) {
      row.fdr += r->fdp;
      row.power += r->power;
      sel += r->n_selected;
    }
    row.fdr /= R;
    row.power /= R;
    row.mean_selected = sel / R;
    if (g.size() >= 2) {
      double vf = 0, vp = 0;
      for (const auto* r : g) {
        vf += (r->fdp - row.fdr) * (r->fdp - row.fdr);
        vp += (r->power - row.power) * (r->power - row.power);
      }
      row.fdr_half_width = 1.96 * std::sqrt(vf / (R - 1)) / std::sqrt(R);
      row.power_half_width = 1.96 * std::sqrt(vp / (R - 1)) / std::sqrt(R);
    }
    rows.push_back(row);
  }
  return rows;
}

namespace {

struct BoxStats {
  double lo, q1, median, q3, hi;
};

double quantile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t i = static_cast<std::size_t>(std::floor(pos));
  const std::size_t k = std::min(i + 1, v.size() - 1);
  return v[i] + (pos - static_cast<double>(i)) * (v[k] - v[i]);
}

BoxStats box_stats(const std::vector<double>& v) {
  BoxStats b{};
  b.q1 = quantile(v, 0.25);
  b.median = quantile(v, 0.5);
  b.q3 = quantile(v, 0.75);
  const double iqr = b.q3 - b.q1;
  b.lo = b.q1;
  b.hi = b.q3;
  for (double x : v) {
    if (x >= b.q1 - 1.5 * iqr) b.lo = std::min(b.lo, x);
    if (x <= b.q3 + 1.5 * iqr) b.hi = std::max(b.hi, x);
  }
  return b;
}

}  // namespace

std::string render_svg(const std::vector<ReplicateRecord>& records, double alpha,
                       const std::string& title) {
  std::vector<double> amps;
  std::map<double, std::vector<double>> fdp, power;
  for (const auto& r : records) {
    if (!fdp.count(r.amplitude)) amps.push_back(r.amplitude);
    fdp[r.amplitude].push_back(r.fdp);
    power[r.amplitude].push_back(r.power);
  }

  const double panel_w = 360, panel_h = 260, left = 50, top = 40, gap = 60;
  const double width = left + 2 * panel_w + gap + 20, height = top + panel_h + 50;
  std::ostringstream svg;
  svg << std::fixed << std::setprecision(2);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">"
      << title << "</text>\n";

  auto panel = [&](double x0, const char* name, const std::map<double, std::vector<double>>& data,
                   bool alpha_line) {
    auto ypos = [&](double v) { return top + panel_h * (1 - v); };
    svg << "<rect x=\"" << x0 << "\" y=\"" << top << "\" width=\"" << panel_w << "\" height=\""
        << panel_h << "\" fill=\"none\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << x0 + panel_w / 2 << "\" y=\"" << top - 6
        << "\" text-anchor=\"middle\">" << name << "</text>\n";
    for (double tick : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      svg << "<line x1=\"" << x0 - 4 << "\" y1=\"" << ypos(tick) << "\" x2=\"" << x0 << "\" y2=\""
          << ypos(tick) << "\" stroke=\"black\"/>\n";
      svg << "<text x=\"" << x0 - 6 << "\" y=\"" << ypos(tick) + 4 << "\" text-anchor=\"end\">"
          << tick << "</text>\n";
    }
    const double slot = panel_w / static_cast<double>(std::max<std::size_t>(1, amps.size()));
    for (std::size_t i = 0; i < amps.size(); ++i) {
      const BoxStats b = box_stats(data.at(amps[i]));
      const double cx = x0 + slot * (static_cast<double>(i) + 0.5);
      const double bw = std::min(40.0, slot * 0.5);
      svg << "<line x1=\"" << cx << "\" y1=\"" << ypos(b.lo) << "\" x2=\"" << cx << "\" y2=\""
          << ypos(b.hi) << "\" stroke=\"black\"/>\n";
      svg << "<rect x=\"" << cx - bw / 2 << "\" y=\"" << ypos(b.q3) << "\" width=\"" << bw
          << "\" height=\"" << ypos(b.q1) - ypos(b.q3)
          << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
      svg << "<line x1=\"" << cx - bw / 2 << "\" y1=\"" << ypos(b.median) << "\" x2=\""
          << cx + bw / 2 << "\" y2=\"" << ypos(b.median) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
      svg << "<text x=\"" << cx << "\" y=\"" << top + panel_h + 16 << "\" text-anchor=\"middle\">"
          << amps[i] << "</text>\n";
    }
    svg << "<text x=\"" << x0 + panel_w / 2 << "\" y=\"" << top + panel_h + 34
        << "\" text-anchor=\"middle\">amplitude</text>\n";
    if (alpha_line)
      svg << "<line x1=\"" << x0 << "\" y1=\"" << ypos(alpha) << "\" x2=\"" << x0 + panel_w
          << "\" y2=\"" << ypos(alpha)
          << "\" stroke=\"red\" stroke-dasharray=\"6,4\" stroke-width=\"1.5\"/>\n";
  };
  panel(left, "FDP", fdp, true);
  panel(left + panel_w + gap, "Power", power, false);
  svg << "</svg>\n";
  return svg.str();
}

// ---------------------------------------------------------------------------
// Correlation-cluster pruning
// ---------------------------------------------------------------------------

std::vector<int> single_linkage_clusters(const Eigen::MatrixXd& abs_corr, double cutoff,
                                         const std::vector<bool>& excluded) {
  const Eigen::Index p = abs_corr.rows();
  if (abs_corr.cols() != p) throw DimensionError("correlation matrix must be square");
  auto is_excluded = [&](Eigen::Index j) {
    return !excluded.empty() && excluded[static_cast<std::size_t>(j)];
  };
  std::vector<int> parent(static_cast<std::size_t>(p));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (Eigen::Index i = 0; i < p; ++i) {
    if (is_excluded(i)) continue;
    for (Eigen::Index j = i + 1; j < p; ++j) {
      if (is_excluded(j) || !(std::abs(abs_corr(i, j)) > cutoff)) continue;
      const int a = find(static_cast<int>(i)), b = find(static_cast<int>(j));
      if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
  }
  // Relabel clusters 0, 1, ... in order of their smallest member.
  std::vector<int> label(static_cast<std::size_t>(p), -1), out(static_cast<std::size_t>(p), -1);
  int next = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (is_excluded(j)) continue;
    const int root = find(static_cast<int>(j));
    if (label[root] < 0) label[root] = next++;
    out[j] = label[root];
  }
  return out;
}

namespace {

// Two-sided p-value of the Pearson correlation t-test.
double correlation_pvalue(const VectorXd& a, const VectorXd& b) {
  const double m = static_cast<double>(a.size());
  const VectorXd ac = a.array() - a.mean();
  const VectorXd bc = b.array() - b.mean();
  const double denom = std::sqrt(ac.squaredNorm() * bc.squaredNorm());
  if (!(denom > 0)) return 1.0;
  const double r = std::clamp(ac.dot(bc) / denom, -1.0, 1.0);
  if (std::abs(r) >= 1.0) return 0.0;
  const double t = r * std::sqrt((m - 2) / (1 - r * r));
  const boost::math::students_t dist(m - 2);
  return 2 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace

PruneResult cluster_prune(const Eigen::MatrixXd& data, const VectorXd& y, double cutoff,
                          double holdout_frac, Rng& rng) {
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  if (n < 10) throw DimensionError("cluster pruning needs n >= 10");
  if (y.size() != n) throw DimensionError("response length does not match data rows");
  if (!(holdout_frac > 0 && holdout_frac < 1)) throw ModelError("holdout_frac must lie in (0, 1)");

  PruneResult out;
  std::vector<bool> excluded(static_cast<std::size_t>(p), false);
  Eigen::MatrixXd z = data.rowwise() - data.colwise().mean();
  for (Eigen::Index j = 0; j < p; ++j) {
    const double norm = z.col(j).norm();
    if (norm < 1e-12 * std::sqrt(static_cast<double>(n))) {
      excluded[j] = true;
      out.excluded.push_back(static_cast<int>(j));
      z.col(j).setZero();
    } else {
      z.col(j) /= norm;
    }
  }
  const Eigen::MatrixXd corr = (z.transpose() * z).cwiseAbs();
  out.cluster = single_linkage_clusters(corr, cutoff, excluded);

  const Eigen::Index m = std::max<Eigen::Index>(
      3, static_cast<Eigen::Index>(std::llround(holdout_frac * static_cast<double>(n))));
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (Eigen::Index i = 0; i < m; ++i)
    std::swap(order[i], order[i + rng.below(static_cast<std::uint64_t>(n - i))]);
  out.holdout_rows.assign(order.begin(), order.begin() + m);
  std::sort(out.holdout_rows.begin(), out.holdout_rows.end());

  const VectorXd yh = y(out.holdout_rows);
  out.pvalues.assign(static_cast<std::size_t>(p), 1.0);
  for (Eigen::Index j = 0; j < p; ++j)
    if (!excluded[j]) out.pvalues[j] = correlation_pvalue(data(out.holdout_rows, j), yh);

  const int clusters =
      out.cluster.empty() ? 0 : *std::max_element(out.cluster.begin(), out.cluster.end()) + 1;
  std::vector<int> best(static_cast<std::size_t>(clusters), -1);
  for (Eigen::Index j = 0; j < p; ++j) {
    const int c = out.cluster[j];
    if (c < 0) continue;
    if (best[c] < 0 || out.pvalues[j] < out.pvalues[best[c]]) best[c] = static_cast<int>(j);
  }
  out.representatives = best;
  std::sort(out.representatives.begin(), out.representatives.end());
  return out;
}

IntMatrix recycle_holdout(const IntMatrix& knockoffs, const IntMatrix& originals,
                          const std::vector<int>& holdout_rows) {
  if (knockoffs.rows() != originals.rows() || knockoffs.cols() != originals.cols())
    throw DimensionError("original and knockoff matrices differ in shape");
  IntMatrix out = knockoffs;
  for (int i : holdout_rows) out.row(i) = originals.row(i);
  return out;
}

}  // namespace knockoffs
