#pragma once

#include "opd/types.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace opd {

struct SoftObjective {
  RewardTable reward;
  double weight = 0.0;
};

/// Hard constraint E[R_j] >= b_j, kept both raw and shifted (R_j - b_j).
struct HardConstraint {
  RewardTable raw;
  double threshold = 0.0;
  RewardTable shifted;
};

/// A tabular constrained alignment instance.
///
/// `r_max` is the declared bound on every reward entry, raw and shifted;
/// step sizes and convergence constants are derived from it.
struct ProblemSpec {
  Eigen::Index num_prompts = 0;
  Eigen::Index num_responses = 0;
  Vector prompt_dist;
  TabularPolicy ref_policy;
  std::vector<SoftObjective> soft_rewards;
  std::vector<HardConstraint> hard_rewards;
  double beta = 0.0;
  double r_max = 0.0;

  Eigen::Index num_constraints() const {
    return static_cast<Eigen::Index>(hard_rewards.size());
  }
  /// Smallest entry of the reference policy.
  double p_min() const { return ref_policy.probs.minCoeff(); }

  /// Appends a hard constraint and fills in its shifted table.
  void add_constraint(Table raw, double threshold);

  bool operator==(const ProblemSpec& other) const;
};

struct Violation {
  std::string invariant;
  std::string message;
  /// Offending index (prompt, objective or constraint), or -1 when global.
  long index = -1;
};

std::vector<Violation> validate(const ProblemSpec& spec);

/// The single-prompt, two-response instance used to show PD oscillation.
ProblemSpec toy_instance();

struct InstanceSizes {
  Eigen::Index num_prompts = 1;
  Eigen::Index num_responses = 2;
  Eigen::Index num_soft = 1;
  Eigen::Index num_hard = 1;
};

/// Seeded random instance with a guaranteed Slater margin of at least
/// 0.05 * r_max. Throws InstanceRejection after 1000 threshold resamples.
ProblemSpec random_instance(std::uint64_t seed, InstanceSizes sizes, double r_max,
                            double p_floor);

/// Margin every random instance is built to clear, as a fraction of r_max.
inline constexpr double kSlaterMarginFraction = 0.05;

std::string to_json(const ProblemSpec& spec);
/// Parses and validates; throws SchemaError or ValidationError.
ProblemSpec problem_from_json(const std::string& text);

void save(const ProblemSpec& spec, const std::filesystem::path& path);
ProblemSpec load(const std::filesystem::path& path);

}  // namespace opd
