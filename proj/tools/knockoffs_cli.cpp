// Command-line front end: fit models, compile genotype parameters, sample
// knockoffs, run the knockoff filter, simulate, and audit small models.

#include "knockoffs/estimate.hpp"
#include "knockoffs/genotype.hpp"
#include "knockoffs/harness.hpp"
#include "knockoffs/hmm.hpp"
#include "knockoffs/io.hpp"
#include "knockoffs/markov_chain.hpp"
#include "knockoffs/parallel.hpp"
#include "knockoffs/select.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>

#ifndef KNOCKOFFS_VERSION
#define KNOCKOFFS_VERSION "0.0.0"
#endif

namespace {

using namespace knockoffs;
namespace fs = std::filesystem;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

// Raised when the command line is well-formed but the inputs cannot be used.
struct DataError : Error {
  using Error::Error;
};

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

io::OutputHeader make_header(const CLI::App& sub, std::uint64_t seed) {
  io::OutputHeader h;
  h.version = KNOCKOFFS_VERSION;
  h.subcommand = sub.get_name();
  h.seed = seed;
  h.timestamp = io::utc_timestamp();
  for (const CLI::Option* opt : sub.get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
    std::string value;
    if (opt->get_expected_max() == 0)
      value = opt->count() > 0 ? "true" : "false";
    else
      value = opt->count() > 0 ? join(opt->results(), ",") : opt->get_default_str();
    h.flags.emplace_back(opt->get_lnames().front(), value);
  }
  return h;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  return out;
}

// Output files must land in an existing directory; checked before any work.
std::string writable_parent(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    return "directory " + parent.string() + " does not exist";
  return {};
}

IntMatrix read_ints(const std::string& path) {
  auto in = open_input(path);
  return io::read_int_tsv(in);
}

Eigen::MatrixXd read_reals(const std::string& path) {
  auto in = open_input(path);
  return io::read_real_tsv(in);
}

int infer_alphabet(const IntMatrix& m) {
  if ((m.array() < 0).any()) throw DataError("data contains negative states");
  return m.maxCoeff() + 1;
}

// Params file of any kind, compiled down to the object knockoffs are drawn from.
struct LoadedModel {
  io::ParamsKind kind;
  MarkovChaind chain;
  HiddenMarkovModeld hmm;
};

LoadedModel load_model(const std::string& path, AlphaConstraint constraint) {
  auto in = open_input(path);
  LoadedModel m;
  m.kind = io::detect_params(in);
  switch (m.kind) {
    case io::ParamsKind::Mc:
      m.chain = io::read_mc_params(in);
      break;
    case io::ParamsKind::Hmm:
      m.hmm = io::read_hmm_params(in);
      break;
    case io::ParamsKind::Geno:
      m.hmm = compile_genotype_hmm(io::read_geno_params(in), constraint);
      break;
  }
  return m;
}

const std::map<std::string, AlphaConstraint> kAlphaConstraints{
    {"none", AlphaConstraint::None},
    {"uniform-over-motifs", AlphaConstraint::UniformOverMotifs},
    {"constant-across-sites", AlphaConstraint::ConstantAcrossSites}};

std::vector<double> parse_amplitudes(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v < 0)
      throw CLI::ValidationError("--amps", "expected non-negative comma-separated numbers");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("--amps", "no amplitudes given");
  return out;
}

struct Options {
  std::string data, params, out, knockoffs, response, plot, latent_out, constraint = "none";
  std::uint64_t seed = 1;
  int threads = 1;
  int states = 0, symbols = 0;
  double pseudo_count = 1.0;
  bool tied = false;
  EmConfig em;
  // filter
  double alpha = 0.1;
  int offset = 1;
  std::string family = "logistic", combiner = "diff";
  int folds = 10;
  int grid = 100;
  // simulate
  std::string design = "mc", source = "true", amps = "10";
  int n = 300, p = 200, s = 20, reps = 50;
  bool full_scale = false;
  int hmm_states = 9, geno_motifs = 4;
  // audit
  double tol = 1e-10;
};

void check_output(CLI::Option* opt) {
  opt->check(CLI::Validator(
      [](std::string& path) { return writable_parent(path); }, "PATH", "writable path"));
}

void add_seed(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "Random seed (recorded in output headers)");
}

void add_threads(CLI::App* sub, Options& o) {
  sub->add_option("--threads", o.threads,
                  "Worker threads; 0 = all cores (KNOCKOFF_THREADS overrides)")
      ->check(CLI::NonNegativeNumber);
}

void run_fit_mc(const CLI::App& sub, const Options& o) {
  const IntMatrix x = read_ints(o.data);
  const int K = o.states > 0 ? o.states : infer_alphabet(x);
  const MarkovChaind chain = fit_mc_mle(x, K, o.pseudo_count);
  auto out = open_output(o.out);
  out << make_header(sub, o.seed).render();
  io::write_mc_params(out, chain);
}

void run_fit_hmm(const CLI::App& sub, const Options& o) {
  const IntMatrix x = read_ints(o.data);
  const int M = o.symbols > 0 ? o.symbols : infer_alphabet(x);
  EmConfig em = o.em;
  em.seed = o.seed;
  em.threads = o.threads;
  em.pseudo_count = o.pseudo_count;
  const EmFit fit = fit_hmm_em_detailed(x, o.states, M, em, o.tied);
  auto out = open_output(o.out);
  out << make_header(sub, o.seed).render();
  out << "# training log-likelihood: " << io::format_real(fit.log_likelihood) << '\n';
  out << "# iterations: " << fit.log_likelihood_trace.size() << " (restart " << fit.restart
      << ")\n";
  io::write_hmm_params(out, fit.model);
}

void run_compile_geno(const CLI::App& sub, const Options& o) {
  auto in = open_input(o.params);
  const HaplotypeModeld model = io::read_geno_params(in);
  const HiddenMarkovModeld hmm = compile_genotype_hmm(model, kAlphaConstraints.at(o.constraint));
  auto out = open_output(o.out);
  out << make_header(sub, o.seed).render();
  io::write_hmm_params(out, hmm);
}

void run_knockoff(const CLI::App& sub, const Options& o) {
  const LoadedModel model = load_model(o.params, kAlphaConstraints.at(o.constraint));
  const IntMatrix x = read_ints(o.data);
  const bool chain = model.kind == io::ParamsKind::Mc;
  const int p = chain ? model.chain.length() : model.hmm.length();
  if (x.cols() != p)
    throw DataError("data has " + std::to_string(x.cols()) + " columns but the model has " +
                    std::to_string(p) + " sites");
  if (chain && !o.latent_out.empty())
    throw DataError("--latent-out applies only to hidden Markov models");

  const Eigen::Index n = x.rows();
  IntMatrix xk(n, p), z, zk;
  if (!chain) {
    z.resize(n, p);
    zk.resize(n, p);
  }
  parallel_for(static_cast<std::size_t>(n), resolve_threads(o.threads), [&](std::size_t i) {
    Rng rng(derive_seed(o.seed, i));
    const Sequence row = row_sequence(x, static_cast<Eigen::Index>(i));
    if (chain) {
      const Sequence k = sample_knockoff(model.chain, row, rng);
      for (int j = 0; j < p; ++j) xk(i, j) = k[j];
    } else {
      const HmmKnockoff k = sample_knockoff(model.hmm, row, rng);
      for (int j = 0; j < p; ++j) {
        xk(i, j) = k.knockoff[j];
        z(i, j) = k.latent[j];
        zk(i, j) = k.latent_knockoff[j];
      }
    }
  });

  const std::string header = make_header(sub, o.seed).render();
  auto out = open_output(o.out);
  out << header;
  io::write_int_tsv(out, xk);
  if (!o.latent_out.empty()) {
    auto lat = open_output(o.latent_out);
    lat << header << "# columns 1..p: latent path; p+1..2p: latent knockoff path\n";
    IntMatrix both(n, 2 * p);
    both << z, zk;
    io::write_int_tsv(lat, both);
  }
}

void run_filter(const CLI::App& sub, const Options& o) {
  const Eigen::MatrixXd x = read_reals(o.data);
  const Eigen::MatrixXd xk = read_reals(o.knockoffs);
  const Eigen::MatrixXd y = read_reals(o.response);
  if (y.cols() != 1) throw DataError("response file must have exactly one column");
  if (y.rows() != x.rows()) throw DataError("response and design have different row counts");
  if (x.rows() < o.folds) throw DataError("need at least as many rows as folds");
  const Family family = o.family == "linear" ? Family::Linear : Family::Logistic;
  const Combiner combiner = o.combiner == "diff" ? Combiner::Difference : Combiner::SignedMax;

  const AugmentedDesign design = AugmentedDesign::build(x, xk, y.col(0), family);
  Rng rng(o.seed);
  const CvResult cv = l1_fit_cv(design, o.folds, o.grid, rng);
  const WStatistics w = compute_w(cv.fit.beta, combiner);
  const FilterResult result = knockoff_threshold(w.w, o.alpha, o.offset);

  std::vector<bool> selected(static_cast<std::size_t>(w.w.size()), false);
  for (int j : result.selected) selected[j] = true;
  auto out = open_output(o.out);
  out << make_header(sub, o.seed).render();
  out << "# lambda: " << io::format_real(cv.fit.lambda)
      << " threshold: " << io::format_real(result.threshold) << '\n';
  out << "j,w,selected\n";
  for (Eigen::Index j = 0; j < w.w.size(); ++j)
    out << j + 1 << ',' << io::format_real(w.w(j)) << ',' << (selected[j] ? 1 : 0) << '\n';
}

void run_simulate(const CLI::App& sub, const Options& o) {
  ExperimentConfig cfg;
  cfg.design = parse_design(o.design);
  cfg.source = ModelSource::parse(o.source);
  cfg.n = o.n;
  cfg.p = o.p;
  cfg.s = o.s;
  cfg.replications = o.reps;
  if (o.full_scale) {
    cfg.n = cfg.p = 1000;
    cfg.s = 60;
    cfg.replications = 100;
  }
  cfg.amplitudes = parse_amplitudes(o.amps);
  cfg.alpha = o.alpha;
  cfg.offset = o.offset;
  cfg.seed = o.seed;
  cfg.folds = o.folds;
  cfg.lambda_grid = o.grid;
  cfg.combiner = o.combiner == "diff" ? Combiner::Difference : Combiner::SignedMax;
  cfg.threads = o.threads;
  cfg.hmm_states = o.hmm_states;
  cfg.geno_motifs = o.geno_motifs;
  cfg.pseudo_count = o.pseudo_count;
  cfg.em = o.em;
  cfg.em.pseudo_count = o.pseudo_count;

  const std::vector<ReplicateRecord> records = run_experiment(cfg);
  const std::vector<SummaryRow> summary = summarize(records);
  const io::OutputHeader header = make_header(sub, o.seed);
  const std::string prefix = design_name(cfg.design) + "," + cfg.source.name() + ",";

  auto out = open_output(o.out);
  out << header.render();
  out << "design,model_source,amplitude,replicate,fdp,power,n_selected,wall_ms\n";
  for (const auto& r : records)
    out << prefix << io::format_real(r.amplitude) << ',' << r.replicate + 1 << ','
        << io::format_real(r.fdp) << ',' << io::format_real(r.power) << ',' << r.n_selected << ','
        << std::fixed << std::setprecision(3) << r.wall_ms << std::defaultfloat << '\n';
  std::map<double, double> mean_ms;
  for (const auto& r : records) mean_ms[r.amplitude] += r.wall_ms;
  for (const auto& row : summary)
    out << prefix << io::format_real(row.amplitude) << ",mean," << io::format_real(row.fdr) << ','
        << io::format_real(row.power) << ',' << io::format_real(row.mean_selected) << ','
        << std::fixed << std::setprecision(3) << mean_ms[row.amplitude] / row.count
        << std::defaultfloat << '\n';

  if (!o.plot.empty()) {
    auto svg = open_output(o.plot);
    const std::string body = render_svg(
        records, cfg.alpha,
        design_name(cfg.design) + " design, model source " + cfg.source.name());
    // The XML declaration-free SVG may start with a comment.
    svg << header.render("<!-- ", " -->") << body;
  }

  std::cout << "amplitude  FDR (95% c.i.)          power (95% c.i.)        mean |S|\n";
  for (const auto& row : summary)
    std::cout << std::fixed << std::setprecision(3) << std::setw(9) << row.amplitude << "  "
              << row.fdr << " (" << std::max(0.0, row.fdr - row.fdr_half_width) << ", "
              << row.fdr + row.fdr_half_width << ")   " << row.power << " ("
              << std::max(0.0, row.power - row.power_half_width) << ", "
              << row.power + row.power_half_width << ")   " << std::setprecision(1)
              << row.mean_selected << '\n';
  double worst_kkt = 0;
  for (const auto& r : records) worst_kkt = std::max(worst_kkt, r.max_kkt_violation);
  std::cout << std::scientific << std::setprecision(2) << "max KKT violation: " << worst_kkt
            << '\n';
}

void run_audit(const CLI::App& sub, const Options& o) {
  const LoadedModel model = load_model(o.params, kAlphaConstraints.at(o.constraint));
  std::ostringstream report;
  report << std::scientific << std::setprecision(3);
  double worst = 0;
  if (model.kind == io::ParamsKind::Mc) {
    const PairTable<double> table = exact_joint_pmf(model.chain);
    worst = max_swap_deviation(table);
    report << "model: Markov chain K=" << model.chain.states() << " p=" << model.chain.length()
           << '\n';
    report << "table mass: " << io::format_real(std::accumulate(table.values.begin(), table.values.end(), 0.0)) << '\n';
    report << "max swap deviation (x, x~): " << worst << '\n';
  } else {
    const PairTable<double> joint = exact_hmm_joint(model.hmm);
    const PairTable<double> observed = marginalize_latent(joint, model.hmm.states());
    const double full = max_swap_deviation(joint);
    const double marginal = max_swap_deviation(observed);
    worst = std::max(full, marginal);
    report << "model: HMM K=" << model.hmm.states() << " M=" << model.hmm.symbols()
           << " p=" << model.hmm.length() << '\n';
    report << "table mass: " << io::format_real(std::accumulate(joint.values.begin(), joint.values.end(), 0.0)) << '\n';
    report << "max swap deviation ((x, z), (x~, z~)): " << full << '\n';
    report << "max swap deviation (x, x~): " << marginal << '\n';
  }
  const bool pass = worst <= o.tol;
  report << "tolerance: " << o.tol << '\n' << "result: " << (pass ? "PASS" : "FAIL") << '\n';

  std::cout << report.str();
  if (!o.out.empty()) {
    auto out = open_output(o.out);
    out << make_header(sub, o.seed).render() << report.str();
  }
  if (!pass) throw DataError("swap deviation exceeds tolerance");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact knockoffs for Markov chains and hidden Markov models", "knockoffs"};
  app.set_version_flag("--version", std::string(KNOCKOFFS_VERSION));
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();
  Options o;

  const auto family_check = CLI::IsMember({"linear", "logistic"});
  const auto combiner_check = CLI::IsMember({"diff", "signed-max"});
  const auto constraint_check =
      CLI::IsMember({"none", "uniform-over-motifs", "constant-across-sites"});

  auto* fit_mc = app.add_subcommand("fit-mc", "Smoothed maximum-likelihood Markov chain fit");
  fit_mc->add_option("--data", o.data, "TSV of states, one sequence per row")
      ->required()
      ->check(CLI::ExistingFile);
  check_output(fit_mc->add_option("--out", o.out, "Output MCPARAMS file")->required());
  fit_mc->add_option("--states", o.states, "State count K (default: max state + 1)")
      ->check(CLI::NonNegativeNumber);
  fit_mc->add_option("--pseudo-count", o.pseudo_count, "Laplace smoothing added to every count")
      ->check(CLI::NonNegativeNumber);
  add_seed(fit_mc, o);

  auto* fit_hmm = app.add_subcommand("fit-hmm", "Baum-Welch fit of a discrete HMM");
  fit_hmm->add_option("--data", o.data, "TSV of symbols, one sequence per row")
      ->required()
      ->check(CLI::ExistingFile);
  check_output(fit_hmm->add_option("--out", o.out, "Output HMMPARAMS file")->required());
  fit_hmm->add_option("--states", o.states, "Latent state count K")
      ->required()
      ->check(CLI::PositiveNumber);
  fit_hmm->add_option("--symbols", o.symbols, "Emission alphabet size M (default: max + 1)")
      ->check(CLI::NonNegativeNumber);
  fit_hmm->add_flag("--tied", o.tied, "Share transitions and emissions across sites");
  fit_hmm->add_option("--max-iters", o.em.max_iters, "EM iteration cap")->check(CLI::PositiveNumber);
  fit_hmm->add_option("--tol", o.em.tol, "Relative improvement stopping threshold")
      ->check(CLI::PositiveNumber);
  fit_hmm->add_option("--restarts", o.em.restarts, "Random restarts")->check(CLI::PositiveNumber);
  fit_hmm->add_option("--pseudo-count", o.pseudo_count, "Smoothing added in every M-step")
      ->check(CLI::NonNegativeNumber);
  add_seed(fit_hmm, o);
  add_threads(fit_hmm, o);

  auto* compile = app.add_subcommand("compile-geno", "Compile GENOPARAMS into HMMPARAMS");
  compile->add_option("--params", o.params, "GENOPARAMS file")->required()->check(CLI::ExistingFile);
  check_output(compile->add_option("--out", o.out, "Output HMMPARAMS file")->required());
  compile->add_option("--alpha-constraint", o.constraint, "Motif-weight constraint")
      ->check(constraint_check);
  add_seed(compile, o);

  auto* knockoff = app.add_subcommand("knockoff", "Sample knockoffs for every row of a data file");
  knockoff->add_option("--params", o.params, "MCPARAMS, HMMPARAMS or GENOPARAMS file")
      ->required()
      ->check(CLI::ExistingFile);
  knockoff->add_option("--data", o.data, "TSV of observed sequences")
      ->required()
      ->check(CLI::ExistingFile);
  check_output(knockoff->add_option("--out", o.out, "Output TSV of knockoffs")->required());
  check_output(knockoff->add_option("--latent-out", o.latent_out,
                                    "Optional TSV of latent paths and their knockoffs (HMM only)"));
  knockoff->add_option("--alpha-constraint", o.constraint, "Constraint for GENOPARAMS input")
      ->check(constraint_check);
  add_seed(knockoff, o);
  add_threads(knockoff, o);

  auto* filter = app.add_subcommand("filter", "Lasso statistics and the knockoff filter");
  filter->add_option("--data", o.data, "TSV design matrix X")->required()->check(CLI::ExistingFile);
  filter->add_option("--knockoffs", o.knockoffs, "TSV knockoff matrix")
      ->required()
      ->check(CLI::ExistingFile);
  filter->add_option("--response", o.response, "TSV response, one column")
      ->required()
      ->check(CLI::ExistingFile);
  check_output(filter->add_option("--out", o.out, "Output CSV j,w,selected")->required());
  filter->add_option("--alpha", o.alpha, "Target FDR")->check(CLI::Range(0.0, 1.0));
  filter->add_option("--offset", o.offset, "1 = knockoff+, 0 = knockoff")->check(CLI::Range(0, 1));
  filter->add_option("--family", o.family, "Regression family")->check(family_check);
  filter->add_option("--combiner", o.combiner, "W statistic")->check(combiner_check);
  filter->add_option("--folds", o.folds, "Cross-validation folds")->check(CLI::Range(2, 1000000));
  filter->add_option("--lambda-grid", o.grid, "Size of the lambda grid")->check(CLI::PositiveNumber);
  add_seed(filter, o);

  auto* simulate = app.add_subcommand("simulate", "Simulation study of FDR and power");
  simulate->add_option("--design", o.design, "Covariate model")
      ->check(CLI::IsMember({"mc", "hmm", "geno"}));
  simulate->add_option("--model-source", o.source, "true, refit or unsup:N");
  simulate->add_option("--n", o.n, "Observations")->check(CLI::PositiveNumber);
  simulate->add_option("--p", o.p, "Variables")->check(CLI::PositiveNumber);
  simulate->add_option("--s", o.s, "Relevant variables")->check(CLI::NonNegativeNumber);
  simulate->add_option("--amps", o.amps, "Comma-separated signal amplitudes");
  simulate->add_option("--reps", o.reps, "Replications per amplitude")->check(CLI::PositiveNumber);
  simulate->add_option("--alpha", o.alpha, "Target FDR")->check(CLI::Range(0.0, 1.0));
  simulate->add_option("--offset", o.offset, "1 = knockoff+, 0 = knockoff")->check(CLI::Range(0, 1));
  simulate->add_option("--combiner", o.combiner, "W statistic")->check(combiner_check);
  simulate->add_option("--folds", o.folds, "Cross-validation folds")->check(CLI::Range(2, 1000000));
  simulate->add_option("--lambda-grid", o.grid, "Size of the lambda grid")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--hmm-states", o.hmm_states, "Latent states of the toy HMM")
      ->check(CLI::Range(3, 1000));
  simulate->add_option("--geno-motifs", o.geno_motifs, "Haplotype motifs of the genotype design")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--pseudo-count", o.pseudo_count, "Smoothing for refitted models")
      ->check(CLI::NonNegativeNumber);
  simulate->add_option("--em-max-iters", o.em.max_iters, "EM iteration cap for refits")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--em-restarts", o.em.restarts, "EM restarts for refits")
      ->check(CLI::PositiveNumber);
  simulate->add_flag("--full-scale", o.full_scale, "n = p = 1000, s = 60, 100 replications");
  check_output(simulate->add_option("--out", o.out, "Output CSV")->required());
  check_output(simulate->add_option("--plot", o.plot, "Optional SVG boxplots"));
  add_seed(simulate, o);
  add_threads(simulate, o);

  auto* audit = app.add_subcommand("audit", "Exact exchangeability check of a small model");
  audit->add_option("--params", o.params, "MCPARAMS, HMMPARAMS or GENOPARAMS file")
      ->required()
      ->check(CLI::ExistingFile);
  audit->add_option("--tol", o.tol, "Largest acceptable swap deviation")
      ->check(CLI::PositiveNumber);
  audit->add_option("--alpha-constraint", o.constraint, "Constraint for GENOPARAMS input")
      ->check(constraint_check);
  check_output(audit->add_option("--out", o.out, "Optional report file"));
  add_seed(audit, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const CLI::App* sub = app.get_subcommands().front();
    const std::string& name = sub->get_name();
    if (name == "fit-mc") run_fit_mc(*sub, o);
    if (name == "fit-hmm") run_fit_hmm(*sub, o);
    if (name == "compile-geno") run_compile_geno(*sub, o);
    if (name == "knockoff") run_knockoff(*sub, o);
    if (name == "filter") run_filter(*sub, o);
    if (name == "simulate") run_simulate(*sub, o);
    if (name == "audit") run_audit(*sub, o);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
