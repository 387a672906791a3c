#include "opd_cli/artifacts.hpp"
#include "opd_cli/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

opd::InstanceSizes parse_sizes(const std::vector<long>& v) {
  if (v.size() != 4) throw opd::cli::UsageError("--sizes takes four integers: X Y SOFT HARD");
  return {v[0], v[1], v[2], v[3]};
}

void print_result(const opd::cli::CommandResult& r, const opd::cli::GlobalOptions& g) {
  std::cout << "wrote " << (g.out_dir / opd::cli::kSummaryFile).string() << '\n';
  const auto& fd = r.summary["final_distance"];
  if (!fd.is_null()) std::cout << "final distance: " << fd.dump() << '\n';
  if (r.summary.contains("runs")) {
    for (const auto& run : r.summary["runs"])
      std::cout << run["method"].get<std::string>() << ": final distance "
                << run["final_distance"].dump() << ", tail min "
                << run["tail_min_distance"].dump()
                << (run["oscillating"].get<bool>() ? " (not converging)" : "") << '\n';
  }
  if (r.summary["subcommand"] == "certify") {
    const auto& c = r.summary["certificate"];
    std::cout << "violations: " << c["violations"] << ", errors: " << c["errors"]
              << ", max violation: " << c["max_violation"] << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimistic primal-dual alignment experiments"};
  app.require_subcommand(1);

  opd::cli::GlobalOptions global;
  std::string out_dir = opd::cli::default_out_dir().string();
  app.add_option("--seed", global.seed, "Root seed for every random draw")->capture_default_str();
  app.add_option("--out-dir", out_dir, "Output directory (default: $OPD_OUT_DIR or opd_out)")
      ->capture_default_str();

  opd::cli::ToyOptions toy;
  auto* toy_cmd = app.add_subcommand("toy", "Single-prompt toy instance at the reference step sizes");
  toy_cmd->add_option("--iters", toy.iters, "Iterations")->capture_default_str();
  toy_cmd->add_option("--method", toy.methods, "opd, pd or npg; repeat for several")
      ->delimiter(',')
      ->capture_default_str();

  opd::cli::BilinearOptions bil;
  auto* bil_cmd = app.add_subcommand("bilinear", "Iterate norms on min_y max_x x^T A y");
  bil_cmd->add_option("--alpha", bil.alpha, "Step size")->capture_default_str();
  bil_cmd->add_option("--sigma", bil.sigmas, "Singular values of A")->delimiter(',')->capture_default_str();
  bil_cmd->add_option("--method", bil.method, "pd or optimistic")->capture_default_str();
  bil_cmd->add_option("-T,--steps", bil.steps, "Number of steps")->capture_default_str();

  opd::cli::CertifyOptions cert;
  std::vector<long> cert_sizes{5, 6, 1, 2};
  auto* cert_cmd = app.add_subcommand("certify", "Batch contraction certificate on random instances");
  cert_cmd->add_option("--seeds", cert.seeds, "Number of instances")->capture_default_str();
  cert_cmd->add_option("--sizes", cert_sizes, "X Y SOFT HARD")->expected(4)->capture_default_str();
  cert_cmd->add_option("--iters", cert.iters, "OPD iterations per instance")->capture_default_str();
  cert_cmd->add_option("--threads", cert.threads, "Worker threads")->capture_default_str();
  cert_cmd->add_option("--p-floor", cert.p_floor, "Reference policy floor")->capture_default_str();

  opd::cli::CompareOptions cmp;
  std::string problem_path;
  std::vector<long> cmp_sizes{3, 4, 1, 1};
  double eta_theta = 0.0;
  double eta_lambda = 0.0;
  double dual_scale = 0.0;
  auto* cmp_cmd = app.add_subcommand("compare", "Run several methods on one instance");
  cmp_cmd->add_option("--problem", problem_path, "Problem JSON file");
  cmp_cmd->add_flag("--toy", cmp.toy, "Use the toy instance");
  cmp_cmd->add_option("--sizes", cmp_sizes, "Random instance X Y SOFT HARD")->expected(4);
  cmp_cmd->add_option("--methods", cmp.methods, opd::cli::compare_method_names())
      ->delimiter(',')
      ->capture_default_str();
  cmp_cmd->add_option("--iters", cmp.iters, "Iterations")->capture_default_str();
  cmp_cmd->add_option("--steps", cmp.steps, "recommended or paper")->capture_default_str();
  auto* eta_theta_opt = cmp_cmd->add_option("--eta-theta", eta_theta, "Override eta_theta");
  auto* eta_lambda_opt = cmp_cmd->add_option("--eta-lambda", eta_lambda, "Override eta_lambda");
  auto* dual_scale_opt =
      cmp_cmd->add_option("--dual-scale", dual_scale, "Override the optimistic dual step scale");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  global.out_dir = out_dir;

  try {
    opd::cli::CommandResult result;
    if (toy_cmd->parsed()) {
      result = opd::cli::cmd_toy(global, toy);
    } else if (bil_cmd->parsed()) {
      result = opd::cli::cmd_bilinear(global, bil);
    } else if (cert_cmd->parsed()) {
      cert.sizes = parse_sizes(cert_sizes);
      result = opd::cli::cmd_certify(global, cert);
    } else {
      if (!problem_path.empty()) cmp.problem = problem_path;
      cmp.sizes = parse_sizes(cmp_sizes);
      if (eta_theta_opt->count()) cmp.eta_theta = eta_theta;
      if (eta_lambda_opt->count()) cmp.eta_lambda = eta_lambda;
      if (dual_scale_opt->count()) cmp.dual_scale = dual_scale;
      result = opd::cli::cmd_compare(global, cmp);
    }
    print_result(result, global);
    return result.exit_code;
  } catch (const opd::cli::UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
