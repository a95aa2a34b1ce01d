#include "varstab/rng.hpp"

#include <cmath>

namespace varstab {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t index) {
  // Mix the index through splitmix so neighboring substreams decorrelate.
  std::uint64_t sm = seed ^ (0x632be59bd9b4e019ULL * (index + 1));
  return Rng(splitmix64(sm));
}

std::uint64_t Rng::next_u64() {
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

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (have_cached_normal_) {
    have_cached_normal_ = false;
    return cached_normal_;
  }
  double u1 = 0.0;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(a);
  have_cached_normal_ = true;
  return r * std::cos(a);
}

int Rng::uniform_int(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo + 1);
  return lo + static_cast<int>(next_u64() % span);
}

Vector Rng::normal_vector(int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = normal();
  return v;
}

Vector Rng::ball(int n, double radius) {
  if (n == 0) return Vector(0);
  Vector v = normal_vector(n);
  const double nrm = v.norm();
  if (nrm == 0.0) return Vector::Zero(n);
  const double u = uniform();
  return v * (radius * std::pow(u, 1.0 / n) / nrm);
}

Vector Rng::on_simplex(int n) {
  Vector e(n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    double u = 0.0;
    do {
      u = uniform();
    } while (u <= 0.0);
    e[i] = -std::log(u);
    total += e[i];
  }
  return e / total;
}

}  // namespace varstab
