#include "opd/trace.hpp"

#include <algorithm>

namespace opd {

std::optional<std::vector<double>> ConvergenceTrace::phi_sequence() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    if (!r.phi) return std::nullopt;
    out.push_back(*r.phi);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::optional<double> ConvergenceTrace::min_distance(std::size_t first, std::size_t last) const {
  std::optional<double> best;
  last = std::min(last, records.size());
  for (std::size_t i = first; i < last; ++i) {
    const auto& d = records[i].distance;
    if (!d) return std::nullopt;
    if (!best || *d < *best) best = *d;
  }
  return best;
}

std::size_t ConvergenceTrace::total_inner_steps() const {
  std::size_t total = 0;
  for (const auto& r : records) total += r.inner_steps;
  return total;
}

}  // namespace opd
