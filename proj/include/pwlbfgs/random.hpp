#ifndef PWLBFGS_RANDOM_HPP
#define PWLBFGS_RANDOM_HPP

#include <cstdint>

#include "pwlbfgs/linalg.hpp"

namespace pwlbfgs {

// xoshiro256** seeded through splitmix64. Self-contained so that streams are
// reproducible independent of the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  double uniform01();        // in [0, 1), 53-bit granularity
  double uniform_open01();   // in (0, 1)
  double normal();           // standard normal, Marsaglia polar method

 private:
  std::uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Counter-based stream split: the run at `index` under `root` always sees the
// same stream, no matter how runs are distributed over threads.
std::uint64_t stream_seed(std::uint64_t root, std::uint64_t index);

// X^T X for an n-by-n matrix X of i.i.d. standard normals. Deviates are drawn
// at binary64 granularity and widened; the products and sums run under ctx.
SymMatrix gaussian_matrix(int n, Rng& rng, const PrecisionContext& ctx);

// n i.i.d. standard normals, widened to ctx.
Vector gaussian_vector(int n, Rng& rng, const PrecisionContext& ctx);

}  // namespace pwlbfgs

#endif
