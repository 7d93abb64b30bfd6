#include "knockoffs/select.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace knockoffs {

namespace {

constexpr double kMinWeight = 1e-5;
constexpr double kProbClamp = 1e-10;

double soft_threshold(double z, double g) {
  if (z > g) return z - g;
  if (z < -g) return z + g;
  return 0.0;
}

double sigmoid(double t) {
  if (t >= 0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

VectorXd linear_predictor(const Eigen::MatrixXd& X, const LassoFit& fit) {
  VectorXd eta = X * fit.beta;
  eta.array() += fit.intercept;
  return eta;
}

VectorXd mean_response(const Eigen::MatrixXd& X, Family family, const LassoFit& fit) {
  VectorXd eta = linear_predictor(X, fit);
  if (family == Family::Logistic) eta = eta.unaryExpr([](double t) { return sigmoid(t); });
  return eta;
}

double null_deviance(const VectorXd& y, Family family) {
  const double ybar = y.mean();
  if (family == Family::Linear) return (y.array() - ybar).square().sum();
  const double m = std::clamp(ybar, kProbClamp, 1 - kProbClamp);
  return -2.0 * (y.array() * std::log(m) + (1 - y.array()) * std::log(1 - m)).sum();
}

// Coordinate descent on (1/2n) sum_i w_i (r_i)^2 + lambda |beta|_1, where the
// working residual r = z - b0 - X beta is kept up to date in place. Returns
// the number of passes used.
int weighted_cd(const Eigen::MatrixXd& X, const VectorXd& w, const VectorXd& xv, double lambda,
                double thresh, int max_passes, VectorXd& r, double& b0, VectorXd& beta) {
  const double n = static_cast<double>(X.rows());
  const double wsum = w.sum();
  const Eigen::Index P = X.cols();
  int passes = 0;

  auto update = [&](Eigen::Index j) -> double {
    if (xv(j) <= 0) return 0.0;
    const double old = beta(j);
    const double grad = (X.col(j).array() * w.array() * r.array()).sum() / n;
    const double next = soft_threshold(grad + xv(j) * old, lambda) / xv(j);
    if (next == old) return 0.0;
    r.noalias() -= (next - old) * X.col(j);
    beta(j) = next;
    return xv(j) * (next - old) * (next - old);
  };
  auto update_intercept = [&]() -> double {
    const double delta = w.dot(r) / wsum;
    b0 += delta;
    r.array() -= delta;
    return (wsum / n) * delta * delta;
  };

  std::vector<Eigen::Index> active;
  while (passes < max_passes) {
    double change = update_intercept();
    for (Eigen::Index j = 0; j < P; ++j) change = std::max(change, update(j));
    ++passes;
    if (change < thresh) break;

    active.clear();
    for (Eigen::Index j = 0; j < P; ++j)
      if (beta(j) != 0) active.push_back(j);
    while (passes < max_passes) {
      double inner = update_intercept();
      for (Eigen::Index j : active) inner = std::max(inner, update(j));
      ++passes;
      if (inner < thresh) break;
    }
  }
  return passes;
}

}  // namespace

AugmentedDesign AugmentedDesign::build(const Eigen::MatrixXd& originals,
                                       const Eigen::MatrixXd& knockoffs, VectorXd response,
                                       Family family) {
  if (originals.rows() != knockoffs.rows() || originals.cols() != knockoffs.cols())
    throw DimensionError("original and knockoff matrices differ in shape");
  if (response.size() != originals.rows())
    throw DimensionError("response length does not match the number of rows");
  if (family == Family::Logistic)
    for (Eigen::Index i = 0; i < response.size(); ++i)
      if (response(i) != 0.0 && response(i) != 1.0)
        throw FamilyError("logistic family needs a 0/1 response");

  AugmentedDesign d;
  d.family = family;
  d.response = std::move(response);
  d.matrix.resize(originals.rows(), 2 * originals.cols());
  d.matrix << originals, knockoffs;
  d.constant.assign(static_cast<std::size_t>(d.matrix.cols()), false);
  const double n = static_cast<double>(d.matrix.rows());
  for (Eigen::Index j = 0; j < d.matrix.cols(); ++j) {
    auto col = d.matrix.col(j);
    const double mean = col.mean();
    col.array() -= mean;
    const double sd = std::sqrt(col.squaredNorm() / n);
    if (sd < 1e-12) {
      col.setZero();
      d.constant[static_cast<std::size_t>(j)] = true;
    } else {
      col /= sd;
    }
  }
  return d;
}

double lambda_max(const Eigen::MatrixXd& X, const VectorXd& y) {
  const VectorXd centered = y.array() - y.mean();
  return (X.transpose() * centered).cwiseAbs().maxCoeff() / static_cast<double>(X.rows());
}

VectorXd lambda_grid(double lmax, int size, double ratio) {
  if (size < 1) throw DimensionError("lambda grid needs at least one value");
  VectorXd grid(size);
  for (int i = 0; i < size; ++i) {
    const double t = size == 1 ? 0.0 : static_cast<double>(i) / (size - 1);
    grid(i) = lmax * std::pow(ratio, t);
  }
  return grid;
}

double kkt_violation(const Eigen::MatrixXd& X, const VectorXd& y, Family family,
                     const LassoFit& fit) {
  const double n = static_cast<double>(X.rows());
  const VectorXd resid = y - mean_response(X, family, fit);
  const VectorXd grad = -(X.transpose() * resid) / n;
  double worst = std::abs(resid.sum()) / n;  // intercept
  for (Eigen::Index j = 0; j < grad.size(); ++j) {
    const double v = fit.beta(j) == 0
                         ? std::max(0.0, std::abs(grad(j)) - fit.lambda)
                         : std::abs(grad(j) + fit.lambda * (fit.beta(j) > 0 ? 1.0 : -1.0));
    worst = std::max(worst, v);
  }
  return worst;
}

double deviance(const Eigen::MatrixXd& X, const VectorXd& y, Family family, const LassoFit& fit) {
  const VectorXd mu = mean_response(X, family, fit);
  if (family == Family::Linear) return (y - mu).squaredNorm();
  double dev = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double m = std::clamp(mu(i), kProbClamp, 1 - kProbClamp);
    dev -= 2.0 * (y(i) * std::log(m) + (1 - y(i)) * std::log(1 - m));
  }
  return dev;
}

LassoFit lasso_fit(const Eigen::MatrixXd& X, const VectorXd& y, Family family, double lambda,
                   const LassoFit* warm, const LassoOptions& opts) {
  const Eigen::Index n = X.rows();
  const Eigen::Index P = X.cols();
  if (y.size() != n) throw DimensionError("response length does not match design rows");
  if (lambda < 0) throw DimensionError("lambda must be non-negative");

  LassoFit fit;
  fit.lambda = lambda;
  if (warm) {
    fit.intercept = warm->intercept;
    fit.beta = warm->beta;
  } else {
    fit.beta = VectorXd::Zero(P);
    const double ybar = y.mean();
    fit.intercept = family == Family::Linear
                        ? ybar
                        : std::log(std::clamp(ybar, kProbClamp, 1 - kProbClamp) /
                                   (1 - std::clamp(ybar, kProbClamp, 1 - kProbClamp)));
  }

  const double nd = static_cast<double>(n);
  double thresh = 1e-12;
  int budget = opts.max_passes;

  if (family == Family::Linear) {
    const VectorXd w = VectorXd::Ones(n);
    const VectorXd xv = X.colwise().squaredNorm().transpose() / nd;
    VectorXd r = y - linear_predictor(X, fit);
    while (budget > 0) {
      budget -= weighted_cd(X, w, xv, lambda, thresh, budget, r, fit.intercept, fit.beta);
      if (kkt_violation(X, y, family, fit) <= opts.kkt_tol || thresh < 1e-30) break;
      thresh *= 1e-2;
    }
    return fit;
  }

  for (int newton = 0; newton < opts.max_newton && budget > 0; ++newton) {
    const VectorXd eta = linear_predictor(X, fit);
    VectorXd w(n), r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double mu = sigmoid(eta(i));
      w(i) = std::max(mu * (1 - mu), kMinWeight);
      r(i) = (y(i) - mu) / w(i);
    }
    const VectorXd xv = (X.array().square().colwise() * w.array()).colwise().sum().transpose() / nd;
    budget -= weighted_cd(X, w, xv, lambda, thresh, budget, r, fit.intercept, fit.beta);
    const double violation = kkt_violation(X, y, family, fit);
    if (violation <= opts.kkt_tol) break;
    // Tighten the inner solve as the outer iteration homes in.
    thresh = std::max(1e-30, std::min(thresh, 1e-2 * violation * violation));
  }
  return fit;
}

std::vector<LassoFit> lasso_path(const Eigen::MatrixXd& X, const VectorXd& y, Family family,
                                 const VectorXd& lambdas, const LassoOptions& opts,
                                 int* computed) {
  std::vector<LassoFit> path;
  path.reserve(static_cast<std::size_t>(lambdas.size()));
  const double null_dev = null_deviance(y, family);
  double prev_ratio = 0;
  for (Eigen::Index i = 0; i < lambdas.size(); ++i) {
    path.push_back(lasso_fit(X, y, family, lambdas(i), path.empty() ? nullptr : &path.back(), opts));
    if (!(null_dev > 0)) continue;
    const double ratio = 1.0 - deviance(X, y, family, path.back()) / null_dev;
    const bool saturated = ratio > 0.999;
    const bool stalled = i >= 5 && ratio - prev_ratio < 1e-5 * ratio;
    prev_ratio = ratio;
    if (saturated || stalled) break;
  }
  if (computed) *computed = static_cast<int>(path.size());
  while (path.size() < static_cast<std::size_t>(lambdas.size())) {
    LassoFit pad = path.back();
    pad.lambda = lambdas(static_cast<Eigen::Index>(path.size()));
    path.push_back(std::move(pad));
  }
  return path;
}

std::vector<int> assign_folds(int n, int folds, Rng& rng) {
  if (folds < 2 || n < folds) throw DimensionError("need n >= folds >= 2");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n - 1; i > 0; --i)
    std::swap(order[i], order[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[order[i]] = i % folds;
  return labels;
}

CvResult l1_fit_cv(const AugmentedDesign& design, int folds, int grid_size, Rng& rng,
                   const LassoOptions& opts) {
  const int n = static_cast<int>(design.matrix.rows());
  std::vector<int> labels = assign_folds(n, folds, rng);
  const VectorXd grid = lambda_grid(lambda_max(design.matrix, design.response), grid_size);
  return l1_fit_cv(design, labels, grid, opts);
}

CvResult l1_fit_cv(const AugmentedDesign& design, const std::vector<int>& folds,
                   const VectorXd& lambdas, const LassoOptions& opts) {
  const Eigen::MatrixXd& X = design.matrix;
  const VectorXd& y = design.response;
  const Eigen::Index n = X.rows();
  if (static_cast<Eigen::Index>(folds.size()) != n)
    throw DimensionError("fold labels do not match the number of rows");
  const int n_folds = *std::max_element(folds.begin(), folds.end()) + 1;

  CvResult out;
  out.lambdas = lambdas;
  out.folds = folds;
  // Entries past the full-data early stop are padding; do not pick them.
  int usable = 0;
  const std::vector<LassoFit> full = lasso_path(X, y, design.family, lambdas, opts, &usable);

  out.cv_deviance = VectorXd::Zero(lambdas.size());
  for (int f = 0; f < n_folds; ++f) {
    std::vector<Eigen::Index> train, test;
    for (Eigen::Index i = 0; i < n; ++i) (folds[i] == f ? test : train).push_back(i);
    if (test.empty() || train.empty()) continue;
    const Eigen::MatrixXd Xtr = X(train, Eigen::all);
    const VectorXd ytr = y(train);
    const Eigen::MatrixXd Xte = X(test, Eigen::all);
    const VectorXd yte = y(test);
    const std::vector<LassoFit> path = lasso_path(Xtr, ytr, design.family, lambdas, opts);
    for (Eigen::Index i = 0; i < lambdas.size(); ++i)
      out.cv_deviance(i) += deviance(Xte, yte, design.family, path[i]);
  }
  out.cv_deviance /= static_cast<double>(n);

  out.best = 0;
  for (int i = 1; i < usable; ++i)
    if (out.cv_deviance(i) < out.cv_deviance(out.best)) out.best = i;
  out.fit = full[out.best];
  return out;
}

}  // namespace knockoffs
