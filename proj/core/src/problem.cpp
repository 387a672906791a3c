#include "opd/problem.hpp"

#include "opd/error.hpp"
#include "opd/lagrangian.hpp"
#include "opd/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace opd {

namespace {

constexpr double kSumTolerance = 1e-12;

using nlohmann::json;

std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

bool same_table(const Table& a, const Table& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

void check_table(const Table& t, const ProblemSpec& spec, const std::string& name, long index,
                 std::vector<Violation>& out) {
  if (t.rows() != spec.num_prompts || t.cols() != spec.num_responses) {
    out.push_back({name + " dimensions",
                   name + " is " + std::to_string(t.rows()) + "x" + std::to_string(t.cols()) +
                       ", expected " + std::to_string(spec.num_prompts) + "x" +
                       std::to_string(spec.num_responses),
                   index});
    return;
  }
  if (!t.allFinite()) {
    out.push_back({name + " finite", name + " has a non-finite entry", index});
    return;
  }
  const double largest = t.cwiseAbs().maxCoeff();
  if (largest > spec.r_max) {
    out.push_back({name + " bounded by r_max",
                   name + " has |entry| " + fmt_double(largest) + " > r_max " +
                       fmt_double(spec.r_max),
                   index});
  }
}

Table table_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw SchemaError("field \"" + field + "\" must be a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j.front().is_array()) throw SchemaError("field \"" + field + "\" must be an array of rows");
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Table t(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw SchemaError("field \"" + field + "\" has a ragged row " + std::to_string(r));
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw SchemaError("field \"" + field + "\" has a non-numeric entry");
      t(r, c) = v.get<double>();
    }
  }
  return t;
}

json table_to_json(const Table& t) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < t.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < t.cols(); ++c) row.push_back(t(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

const json& require(const json& j, const std::string& field) {
  auto it = j.find(field);
  if (it == j.end()) throw SchemaError("missing field \"" + field + "\"");
  return *it;
}

double require_number(const json& j, const std::string& field) {
  const auto& v = require(j, field);
  if (!v.is_number()) throw SchemaError("field \"" + field + "\" must be a number");
  return v.get<double>();
}

}  // namespace

void ProblemSpec::add_constraint(Table raw, double threshold) {
  HardConstraint h;
  h.shifted.values = raw.array() - threshold;
  h.raw.values = std::move(raw);
  h.threshold = threshold;
  hard_rewards.push_back(std::move(h));
}

bool ProblemSpec::operator==(const ProblemSpec& o) const {
  if (num_prompts != o.num_prompts || num_responses != o.num_responses || beta != o.beta ||
      r_max != o.r_max)
    return false;
  if (prompt_dist.size() != o.prompt_dist.size() ||
      !(prompt_dist.array() == o.prompt_dist.array()).all())
    return false;
  if (!same_table(ref_policy.probs, o.ref_policy.probs)) return false;
  if (soft_rewards.size() != o.soft_rewards.size() || hard_rewards.size() != o.hard_rewards.size())
    return false;
  for (std::size_t k = 0; k < soft_rewards.size(); ++k) {
    if (soft_rewards[k].weight != o.soft_rewards[k].weight ||
        !same_table(soft_rewards[k].reward.values, o.soft_rewards[k].reward.values))
      return false;
  }
  for (std::size_t j = 0; j < hard_rewards.size(); ++j) {
    const auto& a = hard_rewards[j];
    const auto& b = o.hard_rewards[j];
    if (a.threshold != b.threshold || !same_table(a.raw.values, b.raw.values) ||
        !same_table(a.shifted.values, b.shifted.values))
      return false;
  }
  return true;
}

std::vector<Violation> validate(const ProblemSpec& spec) {
  std::vector<Violation> out;
  if (spec.num_prompts <= 0 || spec.num_responses <= 0) {
    out.push_back({"dimensions positive", "num_prompts and num_responses must be positive", -1});
    return out;
  }
  if (!(spec.beta > 0.0) || !std::isfinite(spec.beta))
    out.push_back({"beta positive", "beta is " + fmt_double(spec.beta) + ", must be > 0", -1});
  if (!(spec.r_max > 0.0) || !std::isfinite(spec.r_max))
    out.push_back({"r_max positive", "r_max is " + fmt_double(spec.r_max) + ", must be > 0", -1});

  if (spec.prompt_dist.size() != spec.num_prompts) {
    out.push_back({"prompt_dist dimensions",
                   "prompt_dist has length " + std::to_string(spec.prompt_dist.size()), -1});
  } else {
    for (Eigen::Index x = 0; x < spec.num_prompts; ++x) {
      const double p = spec.prompt_dist[x];
      if (!std::isfinite(p) || p < 0.0)
        out.push_back({"prompt_dist nonnegative",
                       "prompt_dist[" + std::to_string(x) + "] is " + fmt_double(p), static_cast<long>(x)});
    }
    const double total = spec.prompt_dist.sum();
    if (!(std::abs(total - 1.0) <= kSumTolerance))
      out.push_back({"prompt_dist sums to 1", "prompt_dist sums to " + fmt_double(total), -1});
  }

  const Table& ref = spec.ref_policy.probs;
  if (ref.rows() != spec.num_prompts || ref.cols() != spec.num_responses) {
    out.push_back({"ref_policy dimensions", "ref_policy has the wrong shape", -1});
  } else {
    for (Eigen::Index x = 0; x < ref.rows(); ++x) {
      const double total = ref.row(x).sum();
      if (!(std::abs(total - 1.0) <= kSumTolerance))
        out.push_back({"ref_policy rows sum to 1",
                       "ref_policy row " + std::to_string(x) + " sums to " + fmt_double(total),
                       static_cast<long>(x)});
      const double smallest = ref.row(x).minCoeff();
      if (!(smallest > 0.0))
        out.push_back({"ref_policy full support",
                       "ref_policy row " + std::to_string(x) + " has entry " +
                           fmt_double(smallest) + "; full support requires p_min > 0",
                       static_cast<long>(x)});
    }
  }

  double weight_total = 0.0;
  for (std::size_t k = 0; k < spec.soft_rewards.size(); ++k) {
    const auto& s = spec.soft_rewards[k];
    if (!std::isfinite(s.weight) || s.weight < 0.0)
      out.push_back({"soft weights nonnegative",
                     "soft weight " + std::to_string(k) + " is " + fmt_double(s.weight), static_cast<long>(k)});
    weight_total += s.weight;
    check_table(s.reward.values, spec, "soft reward " + std::to_string(k), static_cast<long>(k), out);
  }
  if (!(std::abs(weight_total - 1.0) <= kSumTolerance))
    out.push_back({"soft weights sum to 1", "soft weights sum to " + fmt_double(weight_total), -1});

  for (std::size_t j = 0; j < spec.hard_rewards.size(); ++j) {
    const auto& h = spec.hard_rewards[j];
    const std::string name = "hard reward " + std::to_string(j);
    if (!std::isfinite(h.threshold))
      out.push_back({"thresholds finite", name + " threshold is not finite", static_cast<long>(j)});
    check_table(h.raw.values, spec, name, static_cast<long>(j), out);
    check_table(h.shifted.values, spec, "shifted " + name, static_cast<long>(j), out);
    if (h.raw.values.rows() == h.shifted.values.rows() &&
        h.raw.values.cols() == h.shifted.values.cols()) {
      const Table rebuilt = h.raw.values.array() - h.threshold;
      if (!same_table(rebuilt, h.shifted.values))
        out.push_back({"shifted reward reconstruction",
                       name + " shifted table differs from raw - threshold", static_cast<long>(j)});
    }
  }
  return out;
}

ProblemSpec toy_instance() {
  ProblemSpec spec;
  spec.num_prompts = 1;
  spec.num_responses = 2;
  spec.prompt_dist = Vector::Ones(1);
  spec.ref_policy.probs = Table(1, 2);
  spec.ref_policy.probs << 0.3, 0.7;
  Table soft(1, 2);
  soft << 1.0, 0.0;
  spec.soft_rewards.push_back({RewardTable{soft}, 1.0});
  Table hard(1, 2);
  hard << -0.7, 0.3;
  spec.add_constraint(hard, 0.0);
  spec.beta = 0.05;
  spec.r_max = 1.0;
  return spec;
}

ProblemSpec random_instance(std::uint64_t seed, InstanceSizes sizes, double r_max,
                            double p_floor) {
  if (sizes.num_prompts <= 0 || sizes.num_responses <= 0 || sizes.num_soft <= 0 ||
      sizes.num_hard <= 0)
    throw std::invalid_argument("random_instance: sizes must be positive");
  if (!(r_max > 0.0)) throw std::invalid_argument("random_instance: r_max must be positive");
  if (!(p_floor > 0.0) || p_floor * static_cast<double>(sizes.num_responses) >= 1.0)
    throw std::invalid_argument("random_instance: p_floor must lie in (0, 1/|Y|)");

  const Eigen::Index nx = sizes.num_prompts;
  const Eigen::Index ny = sizes.num_responses;
  Rng rng(seed);

  ProblemSpec spec;
  spec.num_prompts = nx;
  spec.num_responses = ny;
  {
    const auto d = rng.dirichlet_flat(static_cast<std::size_t>(nx));
    spec.prompt_dist = Eigen::Map<const Vector>(d.data(), nx);
  }
  // Mixing with the uniform floor keeps every entry >= p_floor and rows on the simplex.
  spec.ref_policy.probs = Table(nx, ny);
  const double free_mass = 1.0 - p_floor * static_cast<double>(ny);
  for (Eigen::Index x = 0; x < nx; ++x) {
    const auto d = rng.dirichlet_flat(static_cast<std::size_t>(ny));
    for (Eigen::Index y = 0; y < ny; ++y)
      spec.ref_policy.probs(x, y) = p_floor + free_mass * d[static_cast<std::size_t>(y)];
  }

  auto uniform_table = [&] {
    Table t(nx, ny);
    for (Eigen::Index x = 0; x < nx; ++x)
      for (Eigen::Index y = 0; y < ny; ++y) t(x, y) = rng.uniform(-r_max, r_max);
    return t;
  };

  std::vector<double> weights(static_cast<std::size_t>(sizes.num_soft));
  double weight_total = 0.0;
  for (auto& w : weights) {
    w = rng.uniform();
    weight_total += w;
  }
  for (Eigen::Index k = 0; k < sizes.num_soft; ++k)
    spec.soft_rewards.push_back({RewardTable{uniform_table()}, 0.0});
  // Normalize, then push the rounding residue into the largest weight.
  std::size_t largest = 0;
  double assigned = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    spec.soft_rewards[k].weight = weights[k] / weight_total;
    if (weights[k] > weights[largest]) largest = k;
  }
  for (std::size_t k = 0; k < weights.size(); ++k)
    if (k != largest) assigned += spec.soft_rewards[k].weight;
  spec.soft_rewards[largest].weight = 1.0 - assigned;

  std::vector<Table> raw;
  for (Eigen::Index j = 0; j < sizes.num_hard; ++j) raw.push_back(uniform_table());

  spec.beta = rng.uniform(0.05, 1.0);
  spec.r_max = r_max;

  const double xi_target = kSlaterMarginFraction * r_max;
  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    ProblemSpec candidate = spec;
    bool feasible_range = true;
    for (const auto& r : raw) {
      const double lo = spec.prompt_dist.dot(r.rowwise().minCoeff());
      const double hi = spec.prompt_dist.dot(r.rowwise().maxCoeff()) - xi_target;
      if (hi < lo) {
        feasible_range = false;
        break;
      }
      candidate.add_constraint(r, rng.uniform(lo, hi));
    }
    if (!feasible_range) break;
    if (slater_margin(candidate).xi < xi_target) continue;

    double largest_abs = r_max;
    for (const auto& h : candidate.hard_rewards)
      largest_abs = std::max(largest_abs, h.shifted.values.cwiseAbs().maxCoeff());
    candidate.r_max = largest_abs;
    return candidate;
  }
  throw InstanceRejection("random_instance: no thresholds with Slater margin >= " +
                          fmt_double(xi_target) + " (seed " + std::to_string(seed) + ")");
}

std::string to_json(const ProblemSpec& spec) {
  json j;
  j["num_prompts"] = spec.num_prompts;
  j["num_responses"] = spec.num_responses;
  j["prompt_dist"] = std::vector<double>(spec.prompt_dist.data(),
                                         spec.prompt_dist.data() + spec.prompt_dist.size());
  j["ref_policy"] = table_to_json(spec.ref_policy.probs);
  j["soft_rewards"] = json::array();
  for (const auto& s : spec.soft_rewards)
    j["soft_rewards"].push_back({{"weight", s.weight}, {"values", table_to_json(s.reward.values)}});
  j["hard_rewards"] = json::array();
  for (const auto& h : spec.hard_rewards)
    j["hard_rewards"].push_back({{"threshold", h.threshold},
                                 {"values", table_to_json(h.raw.values)},
                                 {"shifted", table_to_json(h.shifted.values)}});
  j["beta"] = spec.beta;
  j["r_max"] = spec.r_max;
  return j.dump(2) + "\n";
}

ProblemSpec problem_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("problem file is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw SchemaError("problem file must hold a JSON object");

  ProblemSpec spec;
  const auto& np = require(j, "num_prompts");
  const auto& nr = require(j, "num_responses");
  if (!np.is_number_integer() || !nr.is_number_integer())
    throw SchemaError("num_prompts and num_responses must be integers");
  spec.num_prompts = np.get<Eigen::Index>();
  spec.num_responses = nr.get<Eigen::Index>();

  const auto& dist = require(j, "prompt_dist");
  if (!dist.is_array()) throw SchemaError("field \"prompt_dist\" must be an array");
  spec.prompt_dist.resize(static_cast<Eigen::Index>(dist.size()));
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (!dist[i].is_number()) throw SchemaError("field \"prompt_dist\" has a non-numeric entry");
    spec.prompt_dist[static_cast<Eigen::Index>(i)] = dist[i].get<double>();
  }
  spec.ref_policy.probs = table_from_json(require(j, "ref_policy"), "ref_policy");

  const auto& soft = require(j, "soft_rewards");
  if (!soft.is_array()) throw SchemaError("field \"soft_rewards\" must be an array");
  for (const auto& s : soft) {
    if (!s.is_object()) throw SchemaError("soft_rewards entries must be objects");
    spec.soft_rewards.push_back(
        {RewardTable{table_from_json(require(s, "values"), "soft_rewards.values")},
         require_number(s, "weight")});
  }
  const auto& hard = require(j, "hard_rewards");
  if (!hard.is_array()) throw SchemaError("field \"hard_rewards\" must be an array");
  for (const auto& h : hard) {
    if (!h.is_object()) throw SchemaError("hard_rewards entries must be objects");
    spec.add_constraint(table_from_json(require(h, "values"), "hard_rewards.values"),
                        require_number(h, "threshold"));
    if (auto it = h.find("shifted"); it != h.end())
      spec.hard_rewards.back().shifted.values = table_from_json(*it, "hard_rewards.shifted");
  }
  spec.beta = require_number(j, "beta");
  spec.r_max = require_number(j, "r_max");

  const auto report = validate(spec);
  if (!report.empty()) {
    std::string msg = "invalid problem:";
    for (const auto& v : report) msg += " [" + v.invariant + "] " + v.message + ";";
    throw ValidationError(msg);
  }
  return spec;
}

void save(const ProblemSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << to_json(spec);
  if (!out) throw Error("failed writing " + path.string());
}

ProblemSpec load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string() + " for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  return problem_from_json(buf.str());
}

}  // namespace opd
