#include "opd_cli/commands.hpp"

#include "opd/baselines.hpp"
#include "opd/lagrangian.hpp"
#include "opd/opd_dist.hpp"
#include "opd/opd_npg.hpp"
#include "opd/oracle.hpp"
#include "opd/rng.hpp"
#include "opd/theory.hpp"
#include "opd_cli/artifacts.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace opd::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPaperStep = 0.6;
constexpr double kConvergedDistance = 1e-8;
constexpr double kOscillationFloor = 1e-3;

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw Error("cannot create output directory " + dir.string() + ": " + ec.message());
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? sep : "") + parts[i];
  return out;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json certificate_json(const CertificateReport& rep, double rho_value) {
  return {{"rho", rho_value},
          {"max_violation", rep.max_violation},
          {"first_violation", rep.first_violation ? json(*rep.first_violation) : json(nullptr)},
          // Sequence index i holds Phi_{i+1}, the potential after iteration i + 1.
          {"first_violation_iter",
           rep.first_violation ? json(*rep.first_violation + 1) : json(nullptr)},
          {"max_ratio", rep.max_ratio},
          {"violated", rep.violated},
          {"tolerance", kCertificateTolerance}};
}

/// Per-run digest used by toy and compare summaries.
json run_digest(const ProblemSpec& spec, const ConvergenceTrace& trace) {
  json j;
  j["method"] = trace.method;
  j["iterations"] = trace.size();
  j["final_distance"] = optional_json(trace.final_distance());
  const std::size_t tail = trace.size() > 100 ? 99 : 0;
  const auto tail_min = trace.min_distance(tail, trace.size());
  j["tail_min_distance"] = optional_json(tail_min);
  j["tail_start_iter"] = trace.size() ? trace.records[tail].iter : 0;
  const auto fd = trace.final_distance();
  j["converged"] = fd.has_value() && *fd <= kConvergedDistance;
  j["oscillating"] = tail_min.has_value() && *tail_min > kOscillationFloor;
  const TraceRecord& last = trace.records.empty() ? trace.initial : trace.final_record();
  j["final_lagrangian"] = last.lagrangian;
  j["final_constraint_values"] =
      std::vector<double>(last.constraint_values.data(),
                          last.constraint_values.data() + last.constraint_values.size());
  j["final_lambda"] =
      std::vector<double>(last.lambda.lambdas.data(), last.lambda.lambdas.data() + last.lambda.size());
  j["total_inner_steps"] = trace.total_inner_steps();
  if (auto phis = trace.phi_sequence()) {
    const double r = rho(spec);
    j["certificate"] = certificate_json(certify(*phis, r), r);
  } else {
    j["certificate"] = nullptr;
  }
  return j;
}

Series distance_series(const ConvergenceTrace& t, const std::string& label) {
  Series s{label, {}, {}};
  auto add = [&](const TraceRecord& r) {
    if (!r.distance) return;
    s.x.push_back(static_cast<double>(r.iter));
    s.y.push_back(*r.distance);
  };
  add(t.initial);
  for (const auto& r : t.records) add(r);
  return s;
}

json base_summary(const std::string& id, const std::string& sub, const GlobalOptions& g) {
  json j;
  j["run_id"] = id;
  j["subcommand"] = sub;
  j["seed"] = g.seed;
  j["trace_file"] = kTraceFile;
  return j;
}

void finish(json& summary, const fs::path& dir, const Stopwatch& clock) {
  summary["duration_seconds"] = clock.seconds();
  write_text(dir / kSummaryFile, summary.dump(2) + "\n");
}

struct StepSizes {
  double eta_theta = 0.0;
  double eta_lambda = 0.0;
  /// Multiplier on 1/eta_lambda for the optimistic methods.
  double dual_scale = 1.0;
};

StepSizes paper_steps(const ProblemSpec& spec) {
  return {1.0 / kPaperStep - spec.beta, 1.0 / kPaperStep, 1.0};
}

struct MethodSpec {
  std::string name;
  enum Kind { opd, npg, pd, one_shot, multi_shot } kind = opd;
  int k = 1;
};

MethodSpec parse_method(const std::string& name) {
  if (name == "opd") return {name, MethodSpec::opd};
  if (name == "npg") return {name, MethodSpec::npg};
  if (name == "pd") return {name, MethodSpec::pd};
  if (name == "one_shot") return {name, MethodSpec::one_shot};
  if (name == "multi_shot") return {name, MethodSpec::multi_shot};
  if (name.rfind("pd:", 0) == 0) {
    const std::string digits = name.substr(3);
    int k = 0;
    const bool numeric = !digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit);
    if (numeric) k = std::atoi(digits.c_str());
    if (k >= 1) return {name, MethodSpec::pd, k};
  }
  throw UsageError("unknown method \"" + name + "\"; valid methods: " + compare_method_names());
}

ConvergenceTrace run_method(const ProblemSpec& spec, const MethodSpec& m, const StepSizes& st,
                            std::size_t iters, const SaddleSolution& oracle) {
  ConvergenceTrace trace;
  switch (m.kind) {
    case MethodSpec::opd: {
      OPDConfig c{st.eta_theta, st.eta_lambda, st.dual_scale, iters, std::nullopt};
      trace = opd_run(spec, c, &oracle);
      break;
    }
    case MethodSpec::npg: {
      NpgConfig c;
      c.opd = OPDConfig{st.eta_theta, st.eta_lambda, st.dual_scale, iters, std::nullopt};
      trace = npg_run(spec, c, &oracle).trace;
      break;
    }
    case MethodSpec::pd: {
      BaselineConfig c;
      c.oracle_kind = FiniteStep{m.k};
      c.eta_theta = st.eta_theta;
      c.eta_lambda = st.eta_lambda;
      c.max_iters = iters;
      trace = pd_run(spec, c, &oracle);
      break;
    }
    case MethodSpec::one_shot:
      trace = one_shot_run(spec, iters, 1.0 / st.eta_lambda, &oracle).trace;
      break;
    case MethodSpec::multi_shot: {
      BaselineConfig c;
      c.oracle_kind = MultiShot{};
      c.eta_theta = st.eta_theta;
      c.eta_lambda = st.eta_lambda;
      c.max_iters = iters;
      trace = multi_shot_run(spec, c, &oracle);
      break;
    }
  }
  trace.method = m.name;
  return trace;
}

std::vector<const ConvergenceTrace*> pointers(const std::vector<ConvergenceTrace>& traces) {
  std::vector<const ConvergenceTrace*> out;
  for (const auto& t : traces) out.push_back(&t);
  return out;
}

}  // namespace

fs::path default_out_dir() {
  const char* env = std::getenv("OPD_OUT_DIR");
  if (env && *env) return env;
  return "opd_out";
}

std::string compare_method_names() { return "opd, npg, pd, pd:K (K >= 1), one_shot, multi_shot"; }

CommandResult cmd_toy(const GlobalOptions& global, const ToyOptions& options) {
  if (options.iters < 1) throw UsageError("iters must be >= 1");
  if (options.methods.empty()) throw UsageError("at least one method is required");
  std::vector<MethodSpec> methods;
  for (const auto& name : options.methods) {
    if (name != "opd" && name != "pd" && name != "npg")
      throw UsageError("unknown toy method \"" + name + "\"; valid methods: opd, pd, npg");
    methods.push_back(parse_method(name));
  }

  Stopwatch clock;
  prepare_dir(global.out_dir);
  const ProblemSpec spec = toy_instance();
  const SaddleSolution oracle = solve_saddle(spec);
  const StepSizes steps = paper_steps(spec);

  std::vector<ConvergenceTrace> traces;
  for (const auto& m : methods) traces.push_back(run_method(spec, m, steps, options.iters, oracle));

  write_trace_jsonl(global.out_dir / kTraceFile, pointers(traces));
  write_text(global.out_dir / kMetricsFile, metrics_csv(pointers(traces)));
  Panel panel{"distance to the saddle point", "iteration", "distance", true, {}};
  for (const auto& t : traces) panel.series.push_back(distance_series(t, t.method));
  write_text(global.out_dir / kPlotFile, render_svg("toy instance", {panel}));

  json summary = base_summary("toy-" + join(options.methods, "+") + "-" + std::to_string(global.seed),
                              "toy", global);
  summary["config"] = {{"iters", options.iters},
                       {"methods", options.methods},
                       {"eta_theta", steps.eta_theta},
                       {"eta_lambda", steps.eta_lambda},
                       {"primal_step", 1.0 / (steps.eta_theta + spec.beta)},
                       {"dual_step", steps.dual_scale / steps.eta_lambda}};
  summary["oracle"] = {{"lambda_star", oracle.lambda_star[0]}, {"kkt_max", oracle.kkt.max()}};
  json runs = json::array();
  for (const auto& t : traces) runs.push_back(run_digest(spec, t));
  summary["final_distance"] = runs.front()["final_distance"];
  summary["certificate"] = runs.front()["certificate"];
  summary["runs"] = std::move(runs);
  finish(summary, global.out_dir, clock);
  return {0, summary};
}

CommandResult cmd_bilinear(const GlobalOptions& global, const BilinearOptions& options) {
  if (options.steps < 1) throw UsageError("T must be ≥ 1");
  if (!(options.alpha > 0.0)) throw UsageError("alpha must be positive");
  if (options.sigmas.empty()) throw UsageError("at least one singular value is required");
  for (double s : options.sigmas)
    if (!(s > 0.0) || !std::isfinite(s)) throw UsageError("singular values must be positive");
  BilinearMethod method;
  if (options.method == "pd")
    method = BilinearMethod::pd;
  else if (options.method == "optimistic")
    method = BilinearMethod::optimistic;
  else
    throw UsageError("unknown bilinear method \"" + options.method + "\"; valid: pd, optimistic");

  Stopwatch clock;
  prepare_dir(global.out_dir);
  const auto n = static_cast<Eigen::Index>(options.sigmas.size());
  BilinearProblem prob;
  prob.a = Eigen::Map<const Eigen::VectorXd>(options.sigmas.data(), n).asDiagonal();
  prob.alpha = options.alpha;
  prob.x0 = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(2.0 * static_cast<double>(n)));
  prob.y0 = prob.x0;
  const std::vector<double> norms = bilinear_run(prob, method, options.steps);

  std::ostringstream csv;
  csv << "t,norm\n";
  std::ostringstream jsonl;
  Series s{options.method, {}, {}};
  for (std::size_t t = 0; t < norms.size(); ++t) {
    csv << t << ',' << format_number(norms[t]) << '\n';
    jsonl << json{{"t", t}, {"norm", norms[t]}}.dump() << '\n';
    s.x.push_back(static_cast<double>(t));
    s.y.push_back(norms[t]);
  }
  write_text(global.out_dir / kTraceFile, jsonl.str());
  write_text(global.out_dir / kMetricsFile, csv.str());
  write_text(global.out_dir / kPlotFile,
             render_svg("bilinear saddle point", {Panel{"iterate norm", "t", "||z_t||", true, {s}}}));

  const double sigma_max = *std::max_element(options.sigmas.begin(), options.sigmas.end());
  json summary = base_summary("bilinear-" + options.method + "-" + std::to_string(global.seed),
                              "bilinear", global);
  summary["config"] = {{"alpha", options.alpha},
                       {"sigmas", options.sigmas},
                       {"method", options.method},
                       {"steps", options.steps}};
  summary["initial_norm"] = norms.front();
  summary["final_norm"] = norms.back();
  summary["pd_growth_factor"] = std::sqrt(1.0 + options.alpha * options.alpha * sigma_max * sigma_max);
  summary["final_distance"] = norms.back();
  summary["certificate"] = nullptr;
  finish(summary, global.out_dir, clock);
  return {0, summary};
}

CommandResult cmd_certify(const GlobalOptions& global, const CertifyOptions& options) {
  const auto& sz = options.sizes;
  if (sz.num_prompts < 1 || sz.num_prompts > 10 || sz.num_responses < 2 || sz.num_responses > 10 ||
      sz.num_soft < 1 || sz.num_hard < 1 || sz.num_hard > 3)
    throw UsageError("sizes must satisfy 1 <= |X| <= 10, 2 <= |Y| <= 10, |soft| >= 1, 1 <= |H| <= 3");
  if (options.iters < 1) throw UsageError("iters must be >= 1");

  Stopwatch clock;
  prepare_dir(global.out_dir);

  struct SeedOutcome {
    std::uint64_t seed = 0;
    std::optional<std::string> error;
    double rho = 0.0;
    CertificateReport cert;
    double lambda_l1 = 0.0;
    double lambda_bound = 0.0;
    double kkt = 0.0;
    std::optional<double> final_distance;
    std::string trace_lines;
  };

  const Rng root(global.seed);
  std::vector<SeedOutcome> outcomes(options.seeds);
  for (std::size_t i = 0; i < options.seeds; ++i) outcomes[i].seed = root.split(i).next_u64();

  auto work = [&](std::size_t i) {
    SeedOutcome& o = outcomes[i];
    try {
      const ProblemSpec spec = random_instance(o.seed, sz, options.r_max, options.p_floor);
      const SaddleSolution sol = solve_saddle(spec);
      std::ostringstream name;
      name << "seed_" << i;
      const fs::path dir = global.out_dir / "seeds" / name.str();
      prepare_dir(dir);
      save(spec, dir / "problem.json");
      save_solution(sol, dir / "solution.json");

      o.lambda_l1 = sol.lambda_star.lambdas.lpNorm<1>();
      o.lambda_bound = lambda_max(spec);
      o.kkt = sol.kkt.max();
      OPDConfig config = recommended_stepsizes(spec);
      config.max_iters = options.iters;
      const ConvergenceTrace trace = opd_run(spec, config, &sol);
      o.rho = rho(spec);
      o.cert = certify(*trace.phi_sequence(), o.rho);
      o.final_distance = trace.final_distance();

      std::ostringstream lines;
      auto line = [&](const TraceRecord& r) {
        lines << json{{"seed_index", i},
                      {"iter", r.iter},
                      {"distance", optional_json(r.distance)},
                      {"phi", optional_json(r.phi)},
                      {"lambda", std::vector<double>(r.lambda.lambdas.data(),
                                                     r.lambda.lambdas.data() + r.lambda.size())}}
                     .dump()
              << '\n';
      };
      line(trace.initial);
      for (const auto& r : trace.records) line(r);
      o.trace_lines = lines.str();
    } catch (const std::exception& e) {
      o.error = e.what();
    }
  };

  const unsigned threads = std::max(1u, options.threads);
  if (threads == 1 || options.seeds < 2) {
    for (std::size_t i = 0; i < options.seeds; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < options.seeds; i = next++) work(i);
      });
    for (auto& t : pool) t.join();
  }

  std::string trace_text;
  std::ostringstream csv;
  csv << "seed_index,seed,status,rho,max_ratio,max_violation,first_violation_iter,final_distance,"
         "lambda_l1,lambda_max,kkt_max\n";
  json seeds = json::array();
  std::size_t violations = 0;
  std::size_t errors = 0;
  std::size_t bound_failures = 0;
  double worst_ratio = 0.0;
  double worst_violation = 0.0;
  Series ratio_series{"empirical max ratio", {}, {}};
  Series rho_series{"rho", {}, {}};
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    const auto& o = outcomes[i];
    json entry{{"seed_index", i}, {"seed", o.seed}};
    if (o.error) {
      ++errors;
      entry["status"] = "error";
      entry["error"] = *o.error;
      csv << i << ',' << o.seed << ",error,,,,,,,,\n";
      seeds.push_back(std::move(entry));
      continue;
    }
    trace_text += o.trace_lines;
    const bool bound_ok = o.lambda_l1 <= o.lambda_bound;
    if (!bound_ok) ++bound_failures;
    if (o.cert.violated) ++violations;
    worst_ratio = std::max(worst_ratio, o.cert.max_ratio);
    worst_violation = std::max(worst_violation, o.cert.max_violation);
    entry["status"] = o.cert.violated ? "violated" : "ok";
    entry["certificate"] = certificate_json(o.cert, o.rho);
    entry["final_distance"] = optional_json(o.final_distance);
    entry["lambda_l1"] = o.lambda_l1;
    entry["lambda_max"] = o.lambda_bound;
    entry["lambda_bound_holds"] = bound_ok;
    entry["kkt_max"] = o.kkt;
    seeds.push_back(std::move(entry));
    csv << i << ',' << o.seed << ',' << (o.cert.violated ? "violated" : "ok") << ','
        << format_number(o.rho) << ',' << format_number(o.cert.max_ratio) << ','
        << format_number(o.cert.max_violation) << ','
        << (o.cert.first_violation ? std::to_string(*o.cert.first_violation + 1) : "") << ','
        << (o.final_distance ? format_number(*o.final_distance) : "") << ','
        << format_number(o.lambda_l1) << ',' << format_number(o.lambda_bound) << ','
        << format_number(o.kkt) << '\n';
    ratio_series.x.push_back(static_cast<double>(i));
    ratio_series.y.push_back(o.cert.max_ratio);
    rho_series.x.push_back(static_cast<double>(i));
    rho_series.y.push_back(o.rho);
  }

  write_text(global.out_dir / kTraceFile, trace_text);
  write_text(global.out_dir / kMetricsFile, csv.str());
  write_text(global.out_dir / kPlotFile,
             render_svg("contraction certificate",
                        {Panel{"per-step potential ratio versus rho", "seed index", "ratio", false,
                               {ratio_series, rho_series}}}));

  json report{{"seeds", seeds},
              {"count", options.seeds},
              {"violations", violations},
              {"errors", errors},
              {"lambda_bound_failures", bound_failures},
              {"max_ratio", worst_ratio},
              {"max_violation", worst_violation}};
  write_text(global.out_dir / "certify_report.json", report.dump(2) + "\n");

  json summary = base_summary("certify-" + std::to_string(options.seeds) + "-" +
                                  std::to_string(global.seed),
                              "certify", global);
  summary["config"] = {{"seeds", options.seeds},
                       {"sizes",
                        {sz.num_prompts, sz.num_responses, sz.num_soft, sz.num_hard}},
                       {"iters", options.iters},
                       {"r_max", options.r_max},
                       {"p_floor", options.p_floor},
                       {"threads", threads}};
  summary["final_distance"] = nullptr;
  summary["certificate"] = {{"violations", violations},
                            {"errors", errors},
                            {"max_violation", worst_violation},
                            {"max_ratio", worst_ratio},
                            {"tolerance", kCertificateTolerance}};
  summary["report_file"] = "certify_report.json";
  finish(summary, global.out_dir, clock);
  return {violations == 0 && errors == 0 ? 0 : 1, summary};
}

CommandResult cmd_compare(const GlobalOptions& global, const CompareOptions& options) {
  if (options.methods.empty()) throw UsageError("at least one method is required");
  if (options.iters < 1) throw UsageError("iters must be >= 1");
  if (options.problem && options.toy) throw UsageError("--problem and --toy are exclusive");
  if (options.steps != "recommended" && options.steps != "paper")
    throw UsageError("steps must be \"recommended\" or \"paper\"");
  std::vector<MethodSpec> methods;
  for (const auto& name : options.methods) methods.push_back(parse_method(name));

  Stopwatch clock;
  prepare_dir(global.out_dir);
  ProblemSpec spec;
  std::string source;
  if (options.problem) {
    spec = load(*options.problem);
    source = options.problem->string();
  } else if (options.toy) {
    spec = toy_instance();
    source = "toy";
  } else {
    spec = random_instance(Rng(global.seed).split(0).next_u64(), options.sizes, 1.0, 0.01);
    source = "random";
    save(spec, global.out_dir / "problem.json");
  }
  const SaddleSolution oracle = solve_saddle(spec);

  StepSizes steps;
  if (options.steps == "paper") {
    steps = paper_steps(spec);
  } else {
    const OPDConfig rec = recommended_stepsizes(spec);
    steps = {rec.eta_theta, rec.eta_lambda, 1.0};
  }
  if (options.eta_theta) steps.eta_theta = *options.eta_theta;
  if (options.eta_lambda) steps.eta_lambda = *options.eta_lambda;
  if (options.dual_scale) steps.dual_scale = *options.dual_scale;
  if (!(steps.eta_theta > 0.0) || !(steps.eta_lambda > 0.0) || !(steps.dual_scale > 0.0))
    throw UsageError("step parameters must be positive");

  std::vector<ConvergenceTrace> traces;
  for (const auto& m : methods) traces.push_back(run_method(spec, m, steps, options.iters, oracle));

  write_trace_jsonl(global.out_dir / kTraceFile, pointers(traces));
  write_text(global.out_dir / kMetricsFile, metrics_csv(pointers(traces)));

  std::ostringstream final_csv;
  final_csv << "method,final_distance,final_lagrangian,total_inner_steps";
  for (Eigen::Index j = 0; j < spec.num_constraints(); ++j) final_csv << ",constraint_" << j;
  for (Eigen::Index j = 0; j < spec.num_constraints(); ++j) final_csv << ",lambda_" << j;
  final_csv << '\n';
  Panel dist{"distance to the saddle point", "iteration", "distance", true, {}};
  Panel lag{"Lagrangian value", "iteration", "L", false, {}};
  Panel cons{"constraint values E[R_j - b_j]", "iteration", "value", false, {}};
  for (const auto& t : traces) {
    const TraceRecord& last = t.records.empty() ? t.initial : t.final_record();
    final_csv << t.method << ',' << (last.distance ? format_number(*last.distance) : "") << ','
              << format_number(last.lagrangian) << ',' << t.total_inner_steps();
    for (Eigen::Index j = 0; j < last.constraint_values.size(); ++j)
      final_csv << ',' << format_number(last.constraint_values[j]);
    for (Eigen::Index j = 0; j < last.lambda.size(); ++j)
      final_csv << ',' << format_number(last.lambda[j]);
    final_csv << '\n';

    dist.series.push_back(distance_series(t, t.method));
    Series l{t.method, {}, {}};
    std::vector<Series> c;
    for (Eigen::Index j = 0; j < spec.num_constraints(); ++j)
      c.push_back({t.method + " c" + std::to_string(j), {}, {}});
    auto add = [&](const TraceRecord& r) {
      l.x.push_back(static_cast<double>(r.iter));
      l.y.push_back(r.lagrangian);
      for (Eigen::Index j = 0; j < spec.num_constraints(); ++j) {
        c[static_cast<std::size_t>(j)].x.push_back(static_cast<double>(r.iter));
        c[static_cast<std::size_t>(j)].y.push_back(r.constraint_values[j]);
      }
    };
    add(t.initial);
    for (const auto& r : t.records) add(r);
    lag.series.push_back(std::move(l));
    for (auto& s : c) cons.series.push_back(std::move(s));
  }
  write_text(global.out_dir / "final.csv", final_csv.str());
  write_text(global.out_dir / kPlotFile, render_svg("method comparison", {dist, lag, cons}));

  json summary = base_summary("compare-" + join(options.methods, "+") + "-" +
                                  std::to_string(global.seed),
                              "compare", global);
  summary["config"] = {{"problem", source},
                       {"methods", options.methods},
                       {"iters", options.iters},
                       {"steps", options.steps},
                       {"eta_theta", steps.eta_theta},
                       {"eta_lambda", steps.eta_lambda},
                       {"dual_scale", steps.dual_scale}};
  json runs = json::array();
  for (const auto& t : traces) runs.push_back(run_digest(spec, t));
  summary["final_distance"] = runs.front()["final_distance"];
  summary["certificate"] = runs.front()["certificate"];
  summary["runs"] = std::move(runs);
  summary["final_metrics_file"] = "final.csv";
  finish(summary, global.out_dir, clock);
  return {0, summary};
}

}  // namespace opd::cli
