#ifndef KRIVINE_NUMERICS_HPP
#define KRIVINE_NUMERICS_HPP

#include <array>
#include <cstdint>

namespace krivine {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrtTwoOverPi = 0.79788456080286535588;
inline constexpr double kInvSqrtTwoPi = 0.39894228040143267794;

/// Standard Gaussian CDF. Throws std::domain_error for NaN or infinite input.
double normal_cdf(double x);

/// Standard Gaussian density.
double normal_pdf(double x);

/// Inverse of normal_cdf on the open interval (0, 1).
///
/// Wichura's AS241 rational approximation followed by one Halley step
/// against normal_cdf. The refinement is done on the lower tail
/// min(p, 1 - p) so that quantiles near 0 keep full relative precision.
/// Throws std::domain_error when p is not strictly inside (0, 1).
double normal_quantile(double p);

namespace detail {
/// Wichura's AS241 for p in (0, 0.5] without the refinement step. Its relative
/// error is already near double rounding, so the sampler and xi call it directly.
double lower_quantile_as241(double p);
}  // namespace detail

/// Philox4x32-10 block function (Salmon et al.), exposed for known-answer tests.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Mixes a tag into a master seed so unrelated consumers get disjoint keys.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag);

// Counter-based random stream. A draw is a pure function of
// (master_seed, stream_id, counter); one counter value yields one uniform.
// Counters 2b and 2b + 1 share Philox block b (words 0-1 and 2-3).
struct RngStream {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
  std::uint64_t counter = 0;

  /// Uniform on the open interval (0, 1) with 52 random bits.
  [[nodiscard]] double uniform_at(std::uint64_t index) const;
  [[nodiscard]] double gaussian_at(std::uint64_t index) const;

  /// Values at counters 2 * block and 2 * block + 1 from one Philox call.
  [[nodiscard]] std::array<double, 2> uniform_pair_at(std::uint64_t block) const;
  [[nodiscard]] std::array<double, 2> gaussian_pair_at(std::uint64_t block) const;

  double next_uniform() { return uniform_at(counter++); }
  double next_gaussian() { return gaussian_at(counter++); }

  /// Same key, different stream id, counter reset.
  [[nodiscard]] RngStream substream(std::uint64_t id) const { return {master_seed, id, 0}; }

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

/// Offset between a trajectory's driving stream and its fallback-coin stream.
inline constexpr std::uint64_t kCoinStreamOffset = std::uint64_t{1} << 32;

/// One standard Gaussian via inverse CDF of one uniform; advances the counter.
double sample_gaussian(RngStream& stream);

}  // namespace krivine

#endif  // KRIVINE_NUMERICS_HPP
