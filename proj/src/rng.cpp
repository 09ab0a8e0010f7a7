#include "dynsc/rng.hpp"

#include <cmath>

namespace dynsc {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& s : s_) s = splitmix64(x);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Rng::u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

double Rng::gaussian(double mean, double sigma) {
  // u in (0,1] so log() is finite.
  double u = 1.0 - u01();
  double v = u01();
  double r = std::sqrt(-2.0 * std::log(u));
  return mean + sigma * r * std::cos(2.0 * 3.14159265358979323846 * v);
}

std::uint64_t Rng::below(std::uint64_t n) {
  // Rejection to avoid modulo bias.
  const std::uint64_t limit = ~0ULL - (~0ULL % n);
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % n;
}

double Rng::beta22() {
  double a = u01(), b = u01(), c = u01();
  // median of three
  double lo = a < b ? a : b;
  double hi = a < b ? b : a;
  if (c < lo) return lo;
  if (c > hi) return hi;
  return c;
}

std::uint64_t Rng::derive(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t x = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  return splitmix64(x);
}

}  // namespace dynsc
