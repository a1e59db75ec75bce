#ifndef MIRS_RNG_HPP
#define MIRS_RNG_HPP

#include <cstdint>
#include <utility>
#include <vector>

namespace mirs {

// Address of one logical random stream: a master seed plus a short path of
// integers (repetition, replicate, imputation, purpose tag, ...).  Distinct
// keys map to statistically independent streams; the same key always
// reproduces the same draw sequence, independent of execution order.
struct StreamKey {
  std::uint64_t master_seed{0};
  std::vector<std::uint64_t> path{};

  StreamKey child(std::uint64_t component) const {
    StreamKey k{master_seed, path};
    k.path.push_back(component);
    return k;
  }
};

// Counter-based generator (Philox4x32-10).  The 128-bit counter is split
// into a per-stream prefix derived from the key hash and a 64-bit running
// block index, so streams from distinct keys never share state.
class RandomStream {
 public:
  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Standard normal via Box-Muller; the second value of each pair is cached.
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer on [0, bound); rejection sampling, unbiased.
  std::uint64_t uniform_int(std::uint64_t bound);

 private:
  friend RandomStream derive_stream(const StreamKey& key);
  RandomStream(std::uint64_t key_bits, std::uint64_t stream_bits);

  void refill();

  std::uint32_t key_[2];
  std::uint32_t stream_[2];
  std::uint64_t block_{0};
  std::uint32_t buf_[4];
  int buf_pos_{4};
  double spare_normal_{0.0};
  bool have_spare_{false};
};

// Deterministically derives an independent stream from a key.
// Preconditions: path length <= 8 and every component < 2^32.
RandomStream derive_stream(const StreamKey& key);

// One draw from the bivariate normal with zero means, unit variances and
// correlation rho, via the Cholesky factor of the 2x2 correlation matrix.
std::pair<double, double> sample_bivariate_normal(RandomStream& stream,
                                                  double rho);

}  // namespace mirs

#endif  // MIRS_RNG_HPP
