#include "pwlbfgs/random.hpp"

#include <cmath>

namespace pwlbfgs {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t sm = seed;
  for (auto& s : s_) s = splitmix64(sm);
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

double Rng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform_open01() {
  double u;
  do {
    u = uniform01();
  } while (u == 0.0);
  return u;
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, q;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    q = u * u + v * v;
  } while (q >= 1.0 || q == 0.0);
  const double f = std::sqrt(-2.0 * std::log(q) / q);
  spare_ = v * f;
  have_spare_ = true;
  return u * f;
}

std::uint64_t stream_seed(std::uint64_t root, std::uint64_t index) {
  std::uint64_t state = root ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  std::uint64_t a = splitmix64(state);
  std::uint64_t b = splitmix64(state);
  return a ^ rotl(b, 32);
}

SymMatrix gaussian_matrix(int n, Rng& rng, const PrecisionContext& ctx) {
  if (n < 2) throw DimensionMismatch("gaussian_matrix: n must be >= 2");
  std::vector<std::vector<Real>> X(n);
  for (int i = 0; i < n; ++i) {
    X[i].reserve(n);
    for (int j = 0; j < n; ++j) X[i].push_back(ctx.real(rng.normal()));
  }
  SymMatrix H(n, ctx);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Real acc = ctx.zero();
      for (int k = 0; k < n; ++k) acc += X[k][i] * X[k][j];
      H.set(i, j, std::move(acc));
    }
  }
  return H;
}

Vector gaussian_vector(int n, Rng& rng, const PrecisionContext& ctx) {
  if (n < 2) throw DimensionMismatch("gaussian_vector: n must be >= 2");
  Vector v(n, ctx);
  for (int i = 0; i < n; ++i) v[i] = ctx.real(rng.normal());
  return v;
}

}  // namespace pwlbfgs
