#pragma once

#include "knockoffs/common.hpp"
#include "knockoffs/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace knockoffs {

inline constexpr double kThetaClamp = 1e-6;

/// How motif weights are tied before compilation.
enum class AlphaConstraint {
  None,
  UniformOverMotifs,   // alpha_{j,k} = 1/K
  ConstantAcrossSites  // alpha_{j,k} = mean over sites of alpha_{.,k}
};

/// Haplotype-motif model for one chromosome: p sites, K motifs, jump rates r,
/// motif weights alpha (p x K, rows on the simplex) and per-motif allele-1
/// frequencies theta (p x K). r(0) is unused.
template <typename Scalar>
class HaplotypeModel {
 public:
  using Vector = Vec<Scalar>;
  using Matrix = Mat<Scalar>;

  HaplotypeModel() = default;

  HaplotypeModel(Vector r, Matrix alpha, Matrix theta, Scalar tol = Scalar(1e-9))
      : r_(std::move(r)), alpha_(std::move(alpha)), theta_(std::move(theta)) {
    const Eigen::Index p = r_.size();
    if (p < 1 || alpha_.rows() != p || theta_.rows() != p || alpha_.cols() != theta_.cols() ||
        alpha_.cols() < 1)
      throw ModelError("haplotype model dimensions disagree");
    if ((r_.array() < 0).any()) throw ModelError("recombination parameters must be >= 0");
    if ((alpha_.array() < 0).any() ||
        ((alpha_.rowwise().sum().array() - Scalar(1)).abs() > tol).any())
      throw ModelError("motif weights must lie on the simplex at every site");
    if ((theta_.array() < 0).any() || (theta_.array() > 1).any())
      throw ModelError("allele frequencies must lie in [0, 1]");
    theta_ = theta_.cwiseMax(Scalar(kThetaClamp)).cwiseMin(Scalar(1 - kThetaClamp));
  }

  int motifs() const { return static_cast<int>(alpha_.cols()); }
  int sites() const { return static_cast<int>(r_.size()); }
  const Vector& r() const { return r_; }
  const Matrix& alpha() const { return alpha_; }
  const Matrix& theta() const { return theta_; }

  HaplotypeModel constrained(AlphaConstraint c) const {
    HaplotypeModel out = *this;
    const Eigen::Index K = alpha_.cols();
    switch (c) {
      case AlphaConstraint::None:
        break;
      case AlphaConstraint::UniformOverMotifs:
        out.alpha_.setConstant(Scalar(1) / static_cast<Scalar>(K));
        break;
      case AlphaConstraint::ConstantAcrossSites: {
        const Vector mean = alpha_.colwise().mean().transpose();
        out.alpha_ = mean.transpose().replicate(alpha_.rows(), 1);
        break;
      }
    }
    return out;
  }

 private:
  Vector r_;
  Matrix alpha_;
  Matrix theta_;
};

using HaplotypeModeld = HaplotypeModel<double>;

inline int pair_count(int K) { return K * (K + 1) / 2; }

/// Canonical index of the unordered motif pair {ka, kb}, ka <= kb.
inline int pair_index(int ka, int kb, int K) {
  if (ka < 0 || kb < ka || kb >= K)
    throw std::out_of_range("pair (" + std::to_string(ka) + "," + std::to_string(kb) +
                            ") invalid for K=" + std::to_string(K));
  return ka * K - ka * (ka - 1) / 2 + (kb - ka);
}

inline std::pair<int, int> index_pair(int index, int K) {
  if (index < 0 || index >= pair_count(K))
    throw std::out_of_range("pair index " + std::to_string(index) + " invalid for K=" +
                            std::to_string(K));
  int ka = 0;
  while (index >= K - ka) {
    index -= K - ka;
    ++ka;
  }
  return {ka, ka + index};
}

/// Haplotype motif transition into site j (0-based, 1 <= j < p):
/// (k, k') -> e^{-r_j} [k' = k] + (1 - e^{-r_j}) alpha_{j,k'}.
template <typename Scalar>
Mat<Scalar> haplotype_transition(const HaplotypeModel<Scalar>& model, int j) {
  if (j < 1 || j >= model.sites()) throw DimensionError("haplotype transition needs 1 <= j < p");
  const Eigen::Index K = model.motifs();
  const Scalar stay = std::exp(-model.r()(j));
  Mat<Scalar> Q = ((Scalar(1) - stay) * model.alpha().row(j)).replicate(K, 1);
  Q.diagonal().array() += stay;
  return Q;
}

/// The haplotype-level HMM (K motifs, binary alleles).
template <typename Scalar>
HiddenMarkovModel<Scalar> haplotype_hmm(const HaplotypeModel<Scalar>& model) {
  const int p = model.sites();
  std::vector<Mat<Scalar>> Q;
  for (int j = 1; j < p; ++j) Q.push_back(haplotype_transition(model, j));
  std::vector<Mat<Scalar>> F;
  for (int j = 0; j < p; ++j) {
    Mat<Scalar> f(model.motifs(), 2);
    f.col(1) = model.theta().row(j).transpose();
    f.col(0) = Vec<Scalar>::Ones(model.motifs()) - f.col(1);
    F.push_back(std::move(f));
  }
  return {MarkovChain<Scalar>(model.alpha().row(0).transpose(), std::move(Q)), std::move(F)};
}

/// Genotype HMM over unordered motif pairs with emissions in {0, 1, 2}.
template <typename Scalar>
HiddenMarkovModel<Scalar> compile_genotype_hmm(const HaplotypeModel<Scalar>& source,
                                               AlphaConstraint constraint = AlphaConstraint::None) {
  const HaplotypeModel<Scalar> model = source.constrained(constraint);
  const int K = model.motifs();
  const int p = model.sites();
  const int Keff = pair_count(K);

  Vec<Scalar> q1(Keff);
  for (int ka = 0; ka < K; ++ka)
    for (int kb = ka; kb < K; ++kb) {
      const Scalar a = model.alpha()(0, ka);
      const Scalar b = model.alpha()(0, kb);
      q1(pair_index(ka, kb, K)) = ka == kb ? a * a : 2 * a * b;
    }

  std::vector<Mat<Scalar>> Q;
  Q.reserve(static_cast<std::size_t>(std::max(p - 1, 0)));
  for (int j = 1; j < p; ++j) {
    const Mat<Scalar> H = haplotype_transition(model, j);
    Mat<Scalar> G(Keff, Keff);
    for (int ka = 0; ka < K; ++ka)
      for (int kb = ka; kb < K; ++kb) {
        const int from = pair_index(ka, kb, K);
        for (int ta = 0; ta < K; ++ta)
          for (int tb = ta; tb < K; ++tb) {
            Scalar v = H(ka, ta) * H(kb, tb);
            if (ta != tb) v += H(ka, tb) * H(kb, ta);
            G(from, pair_index(ta, tb, K)) = v;
          }
      }
    Q.push_back(std::move(G));
  }

  std::vector<Mat<Scalar>> F;
  F.reserve(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) {
    Mat<Scalar> f(Keff, 3);
    for (int ka = 0; ka < K; ++ka)
      for (int kb = ka; kb < K; ++kb) {
        const Scalar a = model.theta()(j, ka);
        const Scalar b = model.theta()(j, kb);
        const int s = pair_index(ka, kb, K);
        f(s, 0) = (1 - a) * (1 - b);
        f(s, 1) = a * (1 - b) + (1 - a) * b;
        f(s, 2) = a * b;
      }
    F.push_back(std::move(f));
  }
  return {MarkovChain<Scalar>(std::move(q1), std::move(Q)), std::move(F)};
}

}  // namespace knockoffs
