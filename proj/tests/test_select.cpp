#include "knockoffs/select.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace knockoffs;

namespace {

// Sylvester Hadamard matrix of order n (a power of two).
Eigen::MatrixXd hadamard(int n) {
  Eigen::MatrixXd h(1, 1);
  h(0, 0) = 1;
  while (h.rows() < n) {
    const Eigen::Index m = h.rows();
    Eigen::MatrixXd next(2 * m, 2 * m);
    next << h, h, h, -h;
    h = next;
  }
  return h;
}

double soft(double z, double g) { return z > g ? z - g : (z < -g ? z + g : 0.0); }

Eigen::MatrixXd gaussian_matrix(int n, int p, Rng& rng) {
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
  return x;
}

VectorXd logistic_response(const Eigen::MatrixXd& x, const VectorXd& beta, Rng& rng) {
  VectorXd y(x.rows());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double eta = x.row(i).dot(beta);
    y(i) = rng.uniform() < 1.0 / (1.0 + std::exp(-eta)) ? 1.0 : 0.0;
  }
  return y;
}

std::vector<int> iota_vec(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

// =============================================================================
// AugmentedDesign
// =============================================================================

TEST(AugmentedDesign, StandardizesWithPopulationVariance) {
  Rng rng(1);
  const Eigen::MatrixXd x = gaussian_matrix(50, 3, rng).array() * 4 + 2;
  const Eigen::MatrixXd xk = gaussian_matrix(50, 3, rng);
  VectorXd y = VectorXd::Zero(50);
  y.head(20).setOnes();
  const AugmentedDesign d = AugmentedDesign::build(x, xk, y, Family::Logistic);
  ASSERT_EQ(d.matrix.cols(), 6);
  EXPECT_EQ(d.features(), 3);
  for (Eigen::Index j = 0; j < 6; ++j) {
    EXPECT_NEAR(d.matrix.col(j).mean(), 0.0, 1e-12);
    EXPECT_NEAR(d.matrix.col(j).squaredNorm() / 50, 1.0, 1e-12);
  }
}

TEST(AugmentedDesign, ConstantColumnsAreZeroedAndFlagged) {
  Eigen::MatrixXd x(4, 2);
  x << 1, 3, 2, 3, 3, 3, 4, 3;
  const AugmentedDesign d = AugmentedDesign::build(x, x, VectorXd::Zero(4), Family::Linear);
  EXPECT_EQ(d.constant, (std::vector<bool>{false, true, false, true}));
  EXPECT_EQ(d.matrix.col(1).norm(), 0.0);
  const LassoFit fit = lasso_fit(d.matrix, VectorXd::LinSpaced(4, 0, 3), Family::Linear, 0.01);
  EXPECT_EQ(fit.beta(1), 0.0);
  EXPECT_EQ(fit.beta(3), 0.0);
}

TEST(AugmentedDesign, RejectsMismatchedShapesAndNonBinaryLogistic) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(4, 2);
  EXPECT_THROW(AugmentedDesign::build(x, Eigen::MatrixXd::Zero(4, 3), VectorXd::Zero(4),
                                      Family::Linear),
               DimensionError);
  EXPECT_THROW(AugmentedDesign::build(x, x, VectorXd::Zero(3), Family::Linear), DimensionError);
  VectorXd y = VectorXd::Zero(4);
  y(2) = 2;
  EXPECT_THROW(AugmentedDesign::build(x, x, y, Family::Logistic), FamilyError);
  EXPECT_NO_THROW(AugmentedDesign::build(x, x, y, Family::Linear));
}

// =============================================================================
// lasso_fit
// =============================================================================

TEST(LassoFit, OrthonormalDesignIsSoftThresholding) {
  const int n = 16;
  const Eigen::MatrixXd h = hadamard(n);
  // Columns 1..7 are centered and satisfy x_j' x_k = n * delta_jk.
  const Eigen::MatrixXd x = h.middleCols(1, 7);
  Rng rng(2);
  VectorXd y(n);
  for (int i = 0; i < n; ++i) y(i) = rng.normal() * 2 + 1;
  for (double lambda : {0.0, 0.05, 0.3, 0.8, 2.0}) {
    const LassoFit fit = lasso_fit(x, y, Family::Linear, lambda);
    for (int j = 0; j < 7; ++j)
      EXPECT_NEAR(fit.beta(j), soft(x.col(j).dot(y) / n, lambda), 1e-8) << "lambda=" << lambda;
    EXPECT_NEAR(fit.intercept, y.mean(), 1e-8);
  }
}

TEST(LassoFit, LambdaMaxGivesNullModel) {
  Rng rng(3);
  const Eigen::MatrixXd x = gaussian_matrix(60, 8, rng);
  VectorXd y = x.col(0) + VectorXd::Constant(60, 0.5);
  const double lmax = lambda_max(x, y);
  EXPECT_NEAR(lmax, (x.transpose() * (y.array() - y.mean()).matrix()).cwiseAbs().maxCoeff() / 60,
              1e-15);
  for (Family f : {Family::Linear, Family::Logistic}) {
    const VectorXd yy = f == Family::Linear ? y : logistic_response(x, VectorXd::Ones(8), rng);
    const double lm = lambda_max(x, yy);
    EXPECT_EQ(lasso_fit(x, yy, f, lm).beta.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(lasso_fit(x, yy, f, 2 * lm).beta.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_GT(lasso_fit(x, yy, f, 0.9 * lm).beta.cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(LassoFit, SatisfiesKktConditions) {
  Rng rng(4);
  const Eigen::MatrixXd x = gaussian_matrix(120, 30, rng);
  VectorXd beta = VectorXd::Zero(30);
  beta.head(5).setConstant(1.0);
  const VectorXd y_lin = x * beta + VectorXd::NullaryExpr(120, [&] { return rng.normal(); });
  const VectorXd y_log = logistic_response(x, beta, rng);
  for (Family f : {Family::Linear, Family::Logistic}) {
    const VectorXd& y = f == Family::Linear ? y_lin : y_log;
    const double lmax = lambda_max(x, y);
    for (double frac : {0.5, 0.1, 0.02, 0.005}) {
      const LassoFit fit = lasso_fit(x, y, f, frac * lmax);
      EXPECT_LE(kkt_violation(x, y, f, fit), 1e-6) << "frac=" << frac;
    }
  }
}

TEST(LassoFit, WarmStartReachesSameSolution) {
  Rng rng(5);
  const Eigen::MatrixXd x = gaussian_matrix(80, 12, rng);
  const VectorXd y = logistic_response(x, VectorXd::Constant(12, 0.4), rng);
  const double lambda = 0.05 * lambda_max(x, y);
  const LassoFit cold = lasso_fit(x, y, Family::Logistic, lambda);
  const LassoFit start = lasso_fit(x, y, Family::Logistic, 0.5 * lambda_max(x, y));
  const LassoFit warm = lasso_fit(x, y, Family::Logistic, lambda, &start);
  EXPECT_LT((cold.beta - warm.beta).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(LassoFit, RejectsBadArguments) {
  const Eigen::MatrixXd x = Eigen::MatrixXd::Identity(3, 3);
  EXPECT_THROW(lasso_fit(x, VectorXd::Zero(2), Family::Linear, 0.1), DimensionError);
  EXPECT_THROW(lasso_fit(x, VectorXd::Zero(3), Family::Linear, -0.1), DimensionError);
}

// =============================================================================
// Path and cross-validation
// =============================================================================

TEST(LassoGrid, LogSpacedFromMax) {
  const VectorXd g = lambda_grid(2.0, 100);
  ASSERT_EQ(g.size(), 100);
  EXPECT_DOUBLE_EQ(g(0), 2.0);
  EXPECT_NEAR(g(99), 2e-3, 1e-15);
  for (int i = 1; i < 100; ++i) EXPECT_NEAR(g(i) / g(i - 1), std::pow(1e-3, 1.0 / 99), 1e-12);
  EXPECT_THROW(lambda_grid(1.0, 0), DimensionError);
}

TEST(LassoPath, EveryComputedEntrySatisfiesKkt) {
  Rng rng(6);
  const Eigen::MatrixXd x = gaussian_matrix(100, 20, rng);
  const VectorXd y = logistic_response(x, VectorXd::Constant(20, 0.3), rng);
  const VectorXd grid = lambda_grid(lambda_max(x, y), 40);
  int computed = 0;
  const auto path = lasso_path(x, y, Family::Logistic, grid, {}, &computed);
  ASSERT_EQ(path.size(), 40u);
  EXPECT_GE(computed, 1);
  for (int i = 0; i < computed; ++i) EXPECT_LE(kkt_violation(x, y, Family::Logistic, path[i]), 1e-6);
  EXPECT_EQ(path[0].beta.cwiseAbs().maxCoeff(), 0.0);
}

TEST(AssignFolds, BalancedLabels) {
  Rng rng(7);
  const auto folds = assign_folds(103, 10, rng);
  ASSERT_EQ(folds.size(), 103u);
  std::vector<int> count(10, 0);
  for (int f : folds) ++count[f];
  for (int c : count) {
    EXPECT_GE(c, 10);
    EXPECT_LE(c, 11);
  }
}

TEST(L1FitCv, NullResponseSelectsAlmostNothing) {
  int good = 0;
  const int runs = 50;
  for (int r = 0; r < runs; ++r) {
    Rng rng(1000 + r);
    const Eigen::MatrixXd x = gaussian_matrix(200, 10, rng);
    const Eigen::MatrixXd xk = gaussian_matrix(200, 10, rng);
    VectorXd y(200);
    for (int i = 0; i < 200; ++i) y(i) = rng.uniform() < 0.5 ? 1 : 0;
    const AugmentedDesign d = AugmentedDesign::build(x, xk, y, Family::Logistic);
    const CvResult cv = l1_fit_cv(d, 10, 100, rng);
    if ((cv.fit.beta.array() != 0).count() <= 2) ++good;
  }
  EXPECT_GE(good, 0.9 * runs);
}

TEST(L1FitCv, CertifiesReturnedSolutionAndPicksMinimum) {
  Rng rng(8);
  const Eigen::MatrixXd x = gaussian_matrix(150, 15, rng);
  const Eigen::MatrixXd xk = gaussian_matrix(150, 15, rng);
  VectorXd beta = VectorXd::Zero(15);
  beta.head(3).setConstant(1.5);
  const AugmentedDesign d =
      AugmentedDesign::build(x, xk, logistic_response(x, beta, rng), Family::Logistic);
  const CvResult cv = l1_fit_cv(d, 5, 50, rng);
  EXPECT_LE(kkt_violation(d.matrix, d.response, d.family, cv.fit), 1e-6);
  EXPECT_DOUBLE_EQ(cv.fit.lambda, cv.lambdas(cv.best));
  for (Eigen::Index i = 0; i < cv.cv_deviance.size(); ++i)
    if (std::isfinite(cv.cv_deviance(i))) EXPECT_GE(cv.cv_deviance(i), cv.cv_deviance(cv.best));
  for (int j = 0; j < 3; ++j) EXPECT_GT(cv.fit.beta(j), 0.0);
}

TEST(L1FitCv, TreatsOriginalsAndKnockoffsFairly) {
  Rng rng(9);
  const int n = 200, p = 12;
  const Eigen::MatrixXd x = gaussian_matrix(n, p, rng);
  const Eigen::MatrixXd xk = gaussian_matrix(n, p, rng);
  VectorXd beta = VectorXd::Zero(p);
  beta.head(4).setConstant(1.2);
  const VectorXd y = logistic_response(x, beta, rng);
  const std::vector<bool> swap{true, false, true, true, false, false,
                               true, false, false, true, false, true};
  Eigen::MatrixXd xs = x, xks = xk;
  for (int j = 0; j < p; ++j)
    if (swap[j]) {
      xs.col(j) = xk.col(j);
      xks.col(j) = x.col(j);
    }
  const AugmentedDesign d = AugmentedDesign::build(x, xk, y, Family::Logistic);
  const AugmentedDesign ds = AugmentedDesign::build(xs, xks, y, Family::Logistic);
  const std::vector<int> folds = assign_folds(n, 10, rng);
  const VectorXd grid = lambda_grid(lambda_max(d.matrix, y), 100);
  const CvResult a = l1_fit_cv(d, folds, grid);
  const CvResult b = l1_fit_cv(ds, folds, grid);
  EXPECT_EQ(a.best, b.best);
  for (Combiner c : {Combiner::Difference, Combiner::SignedMax}) {
    const VectorXd wa = compute_w(a.fit.beta, c).w;
    const VectorXd wb = compute_w(b.fit.beta, c).w;
    for (int j = 0; j < p; ++j) EXPECT_NEAR(wb(j), swap[j] ? -wa(j) : wa(j), 1e-6) << "j=" << j;
  }
}

// =============================================================================
// compute_w
// =============================================================================

TEST(ComputeW, DifferenceExample) {
  VectorXd beta(4);
  beta << 3, 0, 1, 2;
  const VectorXd w = compute_w(beta, Combiner::Difference).w;
  ASSERT_EQ(w.size(), 2);
  EXPECT_EQ(w(0), 2);
  EXPECT_EQ(w(1), -2);
}

TEST(ComputeW, SignedMaxExample) {
  VectorXd beta(4);
  beta << 3, 0, -1, 2;
  const VectorXd w = compute_w(beta, Combiner::SignedMax).w;
  EXPECT_EQ(w(0), 3);
  EXPECT_EQ(w(1), -2);
}

TEST(ComputeW, TiesGiveZero) {
  VectorXd beta(6);
  beta << 1, -2, 0, -1, 2, 0;
  for (Combiner c : {Combiner::Difference, Combiner::SignedMax})
    EXPECT_EQ(compute_w(beta, c).w, VectorXd::Zero(3));
}

TEST(ComputeW, SwapIsAntisymmetric) {
  Rng rng(10);
  VectorXd beta(10);
  for (int i = 0; i < 10; ++i) beta(i) = rng.normal();
  VectorXd swapped(10);
  swapped << beta.tail(5), beta.head(5);
  for (Combiner c : {Combiner::Difference, Combiner::SignedMax})
    EXPECT_EQ(compute_w(swapped, c).w, -compute_w(beta, c).w);
}

TEST(ComputeW, OddLengthThrows) {
  EXPECT_THROW(compute_w(VectorXd::Zero(3), Combiner::Difference), DimensionError);
}

// =============================================================================
// knockoff_threshold
// =============================================================================

TEST(KnockoffThreshold, KnockoffPlusExample) {
  VectorXd w(4);
  w << 3, 2, 1, -1;
  const FilterResult r = knockoff_threshold(w, 0.5, 1);
  EXPECT_EQ(r.threshold, 2);
  EXPECT_EQ(r.selected, (std::vector<int>{0, 1}));
}

TEST(KnockoffThreshold, PlainKnockoffExample) {
  VectorXd w(4);
  w << 3, 2, 1, -1;
  const FilterResult r = knockoff_threshold(w, 0.5, 0);
  EXPECT_EQ(r.threshold, 1);
  EXPECT_EQ(r.selected, (std::vector<int>{0, 1, 2}));
}

TEST(KnockoffThreshold, NonPositiveStatisticsSelectNothing) {
  VectorXd w(4);
  w << 0, -1, -3, 0;
  const FilterResult r = knockoff_threshold(w, 0.5, 0);
  EXPECT_TRUE(std::isinf(r.threshold));
  EXPECT_TRUE(r.selected.empty());
  EXPECT_TRUE(knockoff_threshold(VectorXd::Zero(5), 0.9, 0).selected.empty());
}

TEST(KnockoffThreshold, TiesAtThresholdAreSelected) {
  VectorXd w(5);
  w << 2, 2, 2, 1, -0.5;
  const FilterResult r = knockoff_threshold(w, 0.4, 1);
  EXPECT_EQ(r.threshold, 1);
  EXPECT_EQ(r.selected, (std::vector<int>{0, 1, 2, 3}));
}

TEST(KnockoffThreshold, MonotoneInAlphaAndOffset) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    VectorXd w(30);
    for (int j = 0; j < 30; ++j) w(j) = rng.normal() + (j < 10 ? 1.5 : 0.0);
    std::vector<int> previous = iota_vec(30);
    for (double alpha : {0.9, 0.5, 0.3, 0.2, 0.1, 0.05, 0.01}) {
      const auto plus = knockoff_threshold(w, alpha, 1).selected;
      const auto plain = knockoff_threshold(w, alpha, 0).selected;
      EXPECT_TRUE(std::includes(previous.begin(), previous.end(), plus.begin(), plus.end()));
      EXPECT_TRUE(std::includes(plain.begin(), plain.end(), plus.begin(), plus.end()));
      previous = plus;
    }
  }
}

// =============================================================================
// fdp_power
// =============================================================================

TEST(FdpPower, Examples) {
  const FdpPower empty = fdp_power({}, {1, 2});
  EXPECT_EQ(empty.fdp, 0);
  EXPECT_EQ(empty.power, 0);
  const FdpPower exact = fdp_power({1, 2}, {1, 2});
  EXPECT_EQ(exact.fdp, 0);
  EXPECT_EQ(exact.power, 1);
  const FdpPower half = fdp_power({1, 2, 3, 4}, {1, 2});
  EXPECT_EQ(half.fdp, 0.5);
  EXPECT_EQ(half.power, 1.0);
  const FdpPower no_truth = fdp_power({3}, {});
  EXPECT_EQ(no_truth.fdp, 1.0);
  EXPECT_EQ(no_truth.power, 0.0);
}
