#pragma once

#include "knockoffs/common.hpp"

#include <limits>
#include <vector>

namespace knockoffs {

enum class Family { Linear, Logistic };

struct FamilyError : Error {
  using Error::Error;
};

/// [X, X~] with originals in columns 0..p-1 and knockoffs in p..2p-1, each
/// column centered and scaled to unit population variance. Constant columns
/// are zeroed and flagged.
struct AugmentedDesign {
  Eigen::MatrixXd matrix;
  VectorXd response;
  Family family = Family::Logistic;
  std::vector<bool> constant;

  static AugmentedDesign build(const Eigen::MatrixXd& originals, const Eigen::MatrixXd& knockoffs,
                               VectorXd response, Family family);

  int features() const { return static_cast<int>(matrix.cols() / 2); }
};

struct LassoOptions {
  double kkt_tol = 1e-7;  // target max KKT violation for every solution
  int max_passes = 100000;
  int max_newton = 200;
};

struct LassoFit {
  double lambda = 0;
  double intercept = 0;
  VectorXd beta;
};

/// Minimizes loss(b0, beta) + lambda * |beta|_1 with an unpenalized intercept,
/// where loss is (1/2n)|y - b0 - X beta|^2 (linear) or the mean negative
/// log-likelihood (logistic). Cyclic coordinate descent over columns in index
/// order; logistic uses proximal Newton (iteratively reweighted) outer steps.
LassoFit lasso_fit(const Eigen::MatrixXd& X, const VectorXd& y, Family family, double lambda,
                   const LassoFit* warm = nullptr, const LassoOptions& opts = {});

/// Smallest lambda at which every coefficient is zero.
double lambda_max(const Eigen::MatrixXd& X, const VectorXd& y);

/// `size` log-spaced values from lmax down to lmax * ratio.
VectorXd lambda_grid(double lmax, int size, double ratio = 1e-3);

/// Warm-started path over a decreasing grid. Stops early once the fraction of
/// null deviance explained exceeds 0.999 or stalls; later entries repeat the
/// last solution; `computed` receives the number of solved entries.
std::vector<LassoFit> lasso_path(const Eigen::MatrixXd& X, const VectorXd& y, Family family,
                                 const VectorXd& lambdas, const LassoOptions& opts = {},
                                 int* computed = nullptr);

/// Max over coordinates of the subgradient-optimality violation.
double kkt_violation(const Eigen::MatrixXd& X, const VectorXd& y, Family family,
                     const LassoFit& fit);

double deviance(const Eigen::MatrixXd& X, const VectorXd& y, Family family, const LassoFit& fit);

struct CvResult {
  VectorXd lambdas;
  VectorXd cv_deviance;  // mean held-out deviance per lambda
  int best = 0;
  LassoFit fit;  // full-data solution at lambdas[best]
  std::vector<int> folds;
};

/// Random fold labels 0..folds-1 (balanced) from the given stream.
std::vector<int> assign_folds(int n, int folds, Rng& rng);

/// L1 fit with lambda chosen by K-fold CV on mean deviance over a
/// `grid_size` log-spaced grid from lambda_max down to lambda_max * 1e-3.
CvResult l1_fit_cv(const AugmentedDesign& design, int folds, int grid_size, Rng& rng,
                   const LassoOptions& opts = {});

/// Same, with explicit fold labels and lambda grid.
CvResult l1_fit_cv(const AugmentedDesign& design, const std::vector<int>& folds,
                   const VectorXd& lambdas, const LassoOptions& opts = {});

enum class Combiner { Difference, SignedMax };

struct WStatistics {
  VectorXd w;
  Combiner combiner = Combiner::Difference;
};

/// beta has length 2p: originals then knockoffs.
WStatistics compute_w(const VectorXd& beta, Combiner combiner);

struct FilterResult {
  double threshold = std::numeric_limits<double>::infinity();
  std::vector<int> selected;  // 0-based, ascending
  double alpha = 0;
  int offset = 1;
};

/// Data-dependent knockoff threshold; offset 1 is knockoff+, offset 0 the
/// plain knockoff filter.
FilterResult knockoff_threshold(const VectorXd& w, double alpha, int offset);

struct FdpPower {
  double fdp = 0;
  double power = 0;
};

FdpPower fdp_power(const std::vector<int>& selected, const std::vector<int>& truth);

}  // namespace knockoffs
