#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace ocmsim {

//! Philox4x32-10 block cipher (Salmon, Moraes, Dror, Shaw; SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter encrypt(Counter counter, Key key) noexcept;
};

/*!
 * Counter-based random stream.
 *
 * The key is the master seed and the upper half of the counter is the
 * stream id, so stream k of seed s is a pure function of (s, k). Simulations
 * give every event its own stream, which makes results independent of how
 * events are partitioned across workers.
 */
class RngStream {
 public:
  using result_type = std::uint32_t;

  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  //! Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  //! Uniform on (0, 1].
  double uniform_positive() noexcept;
  //! Standard normal (Box-Muller, second variate cached).
  double normal() noexcept;
  bool bernoulli(double p) noexcept;

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int next_ = 4;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

//! Mix a master seed with a purpose tag (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t purpose) noexcept;

}  // namespace ocmsim
