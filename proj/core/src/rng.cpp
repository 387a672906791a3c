#include "opd/rng.hpp"

#include <cmath>

namespace opd {

namespace {

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t s = seed;
  for (auto& word : state_) word = splitmix64(s);
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::exponential() {
  // 1 - U lies in (0, 1], so the log is finite.
  return -std::log(1.0 - uniform());
}

std::vector<double> Rng::dirichlet_flat(std::size_t n) {
  std::vector<double> out(n);
  double total = 0.0;
  for (auto& v : out) {
    v = exponential();
    total += v;
  }
  if (total == 0.0) {
    for (auto& v : out) v = 1.0 / static_cast<double>(n);
    return out;
  }
  for (auto& v : out) v /= total;
  return out;
}

Rng Rng::split(std::uint64_t stream) const {
  std::uint64_t s = seed_ ^ (0xd1b54a32d192ed03ULL * (stream + 1));
  return Rng(splitmix64(s));
}

}  // namespace opd
