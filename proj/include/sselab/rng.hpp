#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace sselab {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Independent random stream addressed by (master seed, stream id).
///
/// The master seed is the Philox key and the stream id occupies the upper 64
/// bits of the 128-bit counter, so distinct ids never share a block. Each
/// stream can emit 2^64 blocks before wrapping.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }
  std::uint64_t next_u64();

  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal draw (Box-Muller, pairs cached).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Stream-id namespaces used across the library. Path streams are
/// `series << 32 | path`; other consumers live in disjoint high ranges.
namespace streams {
inline constexpr std::uint64_t path(std::uint64_t series, std::uint64_t index) { return (series << 32) | index; }
inline constexpr std::uint64_t law_samples(std::uint64_t series) { return (std::uint64_t{1} << 62) | series; }
inline constexpr std::uint64_t noise_paths(std::uint64_t series) { return (std::uint64_t{1} << 61) | series; }
}  // namespace streams

}  // namespace sselab
