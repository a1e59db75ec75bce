#include "mirs/rng.hpp"

#include <cmath>
#include <numbers>

#include "mirs/errors.hpp"

namespace mirs {

namespace {

// SplitMix64 finalizer; used to absorb the key path into 128 bits of
// stream identity.
inline std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  ctr[0] = hi1 ^ ctr[1] ^ key[0];
  ctr[1] = lo1;
  ctr[2] = hi0 ^ ctr[3] ^ key[1];
  ctr[3] = lo0;
}

}  // namespace

RandomStream::RandomStream(std::uint64_t key_bits, std::uint64_t stream_bits) {
  key_[0] = static_cast<std::uint32_t>(key_bits);
  key_[1] = static_cast<std::uint32_t>(key_bits >> 32);
  stream_[0] = static_cast<std::uint32_t>(stream_bits);
  stream_[1] = static_cast<std::uint32_t>(stream_bits >> 32);
}

void RandomStream::refill() {
  std::uint32_t ctr[4] = {static_cast<std::uint32_t>(block_),
                          static_cast<std::uint32_t>(block_ >> 32), stream_[0],
                          stream_[1]};
  std::uint32_t key[2] = {key_[0], key_[1]};
  for (int round = 0; round < 10; ++round) {
    philox_round(ctr, key);
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  buf_[0] = ctr[0];
  buf_[1] = ctr[1];
  buf_[2] = ctr[2];
  buf_[3] = ctr[3];
  buf_pos_ = 0;
  ++block_;
}

std::uint64_t RandomStream::next_u64() {
  if (buf_pos_ > 2) refill();
  const std::uint64_t lo = buf_[buf_pos_];
  const std::uint64_t hi = buf_[buf_pos_ + 1];
  buf_pos_ += 2;
  return lo | (hi << 32);
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_normal_;
  }
  // u1 in (0, 1] so the log is finite.
  const double u1 =
      (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_normal_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t RandomStream::uniform_int(std::uint64_t bound) {
  if (bound == 0) throw ConfigError("uniform_int: bound must be positive");
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t draw;
  do {
    draw = next_u64();
  } while (draw >= limit);
  return draw % bound;
}

RandomStream derive_stream(const StreamKey& key) {
  if (key.path.size() > 8)
    throw ConfigError("stream key path longer than 8 components");
  for (std::uint64_t c : key.path) {
    if (c >> 32)
      throw ConfigError("stream key path component exceeds 2^32 - 1");
  }
  std::uint64_t h = mix64(key.master_seed + kGolden);
  h = mix64(h ^ (static_cast<std::uint64_t>(key.path.size()) + kGolden));
  for (std::uint64_t c : key.path) h = mix64(h + c + kGolden);
  const std::uint64_t key_bits = mix64(h ^ 0x6A09E667F3BCC908ull);
  const std::uint64_t stream_bits = mix64(h ^ 0x510E527FADE682D1ull);
  return RandomStream(key_bits, stream_bits);
}

std::pair<double, double> sample_bivariate_normal(RandomStream& stream,
                                                  double rho) {
  if (!(std::abs(rho) < 1.0))
    throw ConfigError("bivariate normal requires |rho| < 1");
  const double z1 = stream.normal();
  const double z2 = stream.normal();
  return {z1, rho * z1 + std::sqrt(1.0 - rho * rho) * z2};
}

}  // namespace mirs
