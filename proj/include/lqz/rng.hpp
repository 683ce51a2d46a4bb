#ifndef LQZ_RNG_HPP
#define LQZ_RNG_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace lqz {

/// Philox4x32-10 block function (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream.
///
/// The key is the master seed and the upper counter half is the stream id, so
/// stream (seed, k) is fixed regardless of how streams are scheduled.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on (0, 1).
  double uniform();
  /// Standard normal.
  double normal() { return normal_(*this); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
  std::normal_distribution<double> normal_;
};

/// Child stream id for sub-purpose `tag` of stream `parent`.
std::uint64_t derive_stream(std::uint64_t parent, std::uint64_t tag);

}  // namespace lqz

#endif
