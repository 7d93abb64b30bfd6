#include "knockoffs/select.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace knockoffs {

WStatistics compute_w(const VectorXd& beta, Combiner combiner) {
  if (beta.size() % 2 != 0) throw DimensionError("coefficient vector must have even length");
  const Eigen::Index p = beta.size() / 2;
  WStatistics out;
  out.combiner = combiner;
  out.w.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    const double t = std::abs(beta(j));
    const double tk = std::abs(beta(j + p));
    if (combiner == Combiner::Difference) {
      out.w(j) = t - tk;
    } else {
      const double sign = t > tk ? 1.0 : (t < tk ? -1.0 : 0.0);
      out.w(j) = std::max(t, tk) * sign;
    }
  }
  return out;
}

FilterResult knockoff_threshold(const VectorXd& w, double alpha, int offset) {
  FilterResult out;
  out.alpha = alpha;
  out.offset = offset;

  std::vector<double> candidates;
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (w(j) != 0) candidates.push_back(std::abs(w(j)));
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  for (double t : candidates) {
    const auto negatives = (w.array() <= -t).count();
    const auto positives = (w.array() >= t).count();
    const double ratio = static_cast<double>(offset + negatives) /
                         static_cast<double>(std::max<Eigen::Index>(1, positives));
    if (ratio <= alpha) {
      out.threshold = t;
      break;
    }
  }
  for (Eigen::Index j = 0; j < w.size(); ++j)
    if (w(j) >= out.threshold) out.selected.push_back(static_cast<int>(j));
  return out;
}

FdpPower fdp_power(const std::vector<int>& selected, const std::vector<int>& truth) {
  const std::set<int> relevant(truth.begin(), truth.end());
  std::size_t true_pos = 0;
  for (int j : selected) true_pos += relevant.count(j);
  const std::size_t false_pos = selected.size() - true_pos;
  FdpPower out;
  out.fdp = static_cast<double>(false_pos) / static_cast<double>(std::max<std::size_t>(1, selected.size()));
  out.power = static_cast<double>(true_pos) / static_cast<double>(std::max<std::size_t>(1, relevant.size()));
  return out;
}

}  // namespace knockoffs
