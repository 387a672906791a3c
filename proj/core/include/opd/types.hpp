#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>

namespace opd {

/// Row-major so that each prompt's row is contiguous and can be viewed as a span.
using Table = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

inline std::span<const double> row_span(const Table& t, Eigen::Index row) {
  return {t.data() + row * t.cols(), static_cast<std::size_t>(t.cols())};
}

/// One probability row per prompt.
struct TabularPolicy {
  Table probs;

  Eigen::Index num_prompts() const { return probs.rows(); }
  Eigen::Index num_responses() const { return probs.cols(); }
  std::span<const double> row(Eigen::Index x) const { return row_span(probs, x); }
};

struct RewardTable {
  Table values;
};

/// Nonnegative multiplier per hard constraint.
struct DualVector {
  Vector lambdas;

  DualVector() = default;
  explicit DualVector(Vector v) : lambdas(std::move(v)) {}
  static DualVector zeros(Eigen::Index n) { return DualVector(Vector::Zero(n)); }
  static DualVector constant(Eigen::Index n, double value) {
    return DualVector(Vector::Constant(n, value));
  }

  Eigen::Index size() const { return lambdas.size(); }
  double operator[](Eigen::Index j) const { return lambdas[j]; }
  double& operator[](Eigen::Index j) { return lambdas[j]; }
};

/// Largest per-row total variation distance, 0.5 * sum |p - q|.
inline double max_row_tv(const TabularPolicy& a, const TabularPolicy& b) {
  return 0.5 * (a.probs - b.probs).cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace opd
