#pragma once

#include "opd/error.hpp"
#include "opd/problem.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace opd::cli {

/// Bad flags or arguments; the driver maps it to exit status 2.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct GlobalOptions {
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
};

/// $OPD_OUT_DIR when set and non-empty, else "opd_out".
std::filesystem::path default_out_dir();

struct CommandResult {
  int exit_code = 0;
  nlohmann::json summary;
};

struct ToyOptions {
  std::size_t iters = 300;
  /// Any of opd, pd, npg.
  std::vector<std::string> methods{"opd"};
};

/// Toy instance at primal step (eta_theta + beta)^-1 = 0.6 and dual step 0.6.
CommandResult cmd_toy(const GlobalOptions& global, const ToyOptions& options);

struct BilinearOptions {
  double alpha = 0.5;
  /// Singular values; A = diag(sigmas).
  std::vector<double> sigmas{1.0};
  /// pd or optimistic.
  std::string method = "pd";
  std::size_t steps = 20;
};

CommandResult cmd_bilinear(const GlobalOptions& global, const BilinearOptions& options);

struct CertifyOptions {
  std::size_t seeds = 50;
  InstanceSizes sizes{5, 6, 1, 2};
  std::size_t iters = 200;
  double r_max = 1.0;
  double p_floor = 0.01;
  unsigned threads = 1;
};

/// Exit 0 only when every seed ran and none violated the contraction.
CommandResult cmd_certify(const GlobalOptions& global, const CertifyOptions& options);

struct CompareOptions {
  std::optional<std::filesystem::path> problem;
  bool toy = false;
  /// Random instance shape when neither `problem` nor `toy` is given.
  InstanceSizes sizes{3, 4, 1, 1};
  /// opd, npg, pd, pd:K, one_shot, multi_shot.
  std::vector<std::string> methods{"opd", "pd"};
  std::size_t iters = 300;
  /// "recommended" (3 sqrt(|H|) R_max) or "paper" (the toy step sizes).
  std::string steps = "recommended";
  std::optional<double> eta_theta;
  std::optional<double> eta_lambda;
  std::optional<double> dual_scale;
};

CommandResult cmd_compare(const GlobalOptions& global, const CompareOptions& options);

/// Valid names for `CompareOptions::methods`, for usage messages.
std::string compare_method_names();

}  // namespace opd::cli
