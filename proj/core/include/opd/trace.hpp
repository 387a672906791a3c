#pragma once

#include "opd/types.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace opd {

/// Live iterates of the optimistic method plus the lagged predictions
/// (pi_{t-1}, lambda_{t-1}) that the next optimistic step consumes.
struct OPDState {
  TabularPolicy hat_policy;
  DualVector hat_lambda;
  TabularPolicy pred_policy_prev;
  DualVector pred_lambda_prev;
  std::size_t iter = 0;
};

struct TraceRecord {
  std::size_t iter = 0;
  /// E_x KL(pi* || pi_t) + ||lambda* - lambda_t||^2; only with an oracle.
  std::optional<double> distance;
  double lagrangian = 0.0;
  Vector constraint_values;
  std::optional<double> phi;
  /// Upper bound on `distance` implied by the convergence theory, when known.
  std::optional<double> bound;
  DualVector lambda;
  TabularPolicy policy;
  std::size_t inner_steps = 0;
};

/// One record per iteration run; `initial` holds the state before iteration 1.
struct ConvergenceTrace {
  std::string method;
  TraceRecord initial;
  std::vector<TraceRecord> records;

  std::size_t size() const { return records.size(); }
  const TraceRecord& final_record() const { return records.back(); }
  std::optional<double> final_distance() const {
    return records.empty() ? initial.distance : records.back().distance;
  }
  /// Phi_1, Phi_2, ... over the records, when each carries a potential value.
  /// Phi_0 is left out because its lag terms use the artificial pi_{-1} = pi_0.
  std::optional<std::vector<double>> phi_sequence() const;
  /// Minimum distance over records with index in [first, last).
  std::optional<double> min_distance(std::size_t first, std::size_t last) const;
  std::size_t total_inner_steps() const;
};

}  // namespace opd
