#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "encmf/types.hpp"

namespace encmf {

// Counter-based random number generation (Philox4x32-10). Every draw is a pure
// function of (key, counter), so independent streams can be addressed by
// (master seed, stream label, step, member, substream) and reruns with the
// same seed reproduce every draw bit-exactly regardless of call order between
// streams.

/// Philox4x32-10 block cipher. Stateless; produces 4 x 32 random bits per
/// (counter, key) pair.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key);
};

/// Logical sub-stream labels of one experiment run. Distinct labels yield
/// independent streams under the same master seed.
enum class StreamLabel : std::uint32_t {
  TruthInit = 1,
  EnsembleInit = 2,
  ObsNoise = 3,
  ForecastNoise = 4,
  AugmentNoise = 5,
  TrainShuffle = 6,
  NetInit = 7,
  Demo = 8,
  Oracle = 9,
};

/// One addressable random stream: uniform and Gaussian doubles plus raw
/// 64-bit words, all derived from Philox blocks. Copyable value type.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, StreamLabel label, std::uint32_t step = 0,
            std::uint32_t member = 0, std::uint32_t substream = 0);

  std::uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  /// Standard normal draw (Box-Muller on Philox uniforms).
  double normal();

  /// Uniform integer in [0, bound), bound >= 1. Unbiased (rejection).
  std::uint64_t below(std::uint64_t bound);

  /// Vector of i.i.d. standard normal draws.
  Vector normal_vector(Eigen::Index n);

 private:
  void refill();

  Philox4x32::Key key_;
  std::array<std::uint32_t, 3> prefix_;  // (step, member, substream)
  std::uint32_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Stream factory for one experiment run, keyed by the master seed.
struct RngPolicy {
  std::uint64_t master_seed = 0;

  RngStream stream(StreamLabel label, std::uint32_t step = 0,
                   std::uint32_t member = 0, std::uint32_t substream = 0) const {
    return RngStream(master_seed, label, step, member, substream);
  }
};

/// SplitMix64 finalizer; used to mix seeds and derive per-point seeds in
/// parameter sweeps.
std::uint64_t mix64(std::uint64_t x);

/// Deterministic per-point seed for sweep point `index` under `master_seed`.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t index);

/// Fisher-Yates permutation of 0..n-1 drawn from the stream.
std::vector<Eigen::Index> shuffled_indices(Eigen::Index n, RngStream& rng);

}  // namespace encmf
