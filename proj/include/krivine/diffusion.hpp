#ifndef KRIVINE_DIFFUSION_HPP
#define KRIVINE_DIFFUSION_HPP

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "krivine/embedding.hpp"
#include "krivine/numerics.hpp"
#include "krivine/speed.hpp"

namespace krivine {

struct DiffusionConfig {
  double step_h = 1e-3;
  double t_max = 12.0;
  double absorb_eps = 1e-6;
  bool record_paths = false;

  /// Throws std::invalid_argument unless 0 < step_h <= t_max and 0 < absorb_eps < 1.
  void check() const;

  /// ceil(t_max / step_h), ignoring representation noise in the quotient.
  [[nodiscard]] std::size_t steps() const;
};

/// K increments of a d-dimensional Brownian motion, each N(0, step_h I_d).
///
/// Generated increments are drawn lazily from an RngStream: component j of
/// step k is sqrt(step_h) times the Gaussian at counter k * d + j, so any step
/// can be read without producing the ones before it. The same object drives
/// every vector of a batch. Explicit increments (zero drivers, negated or
/// coarsened copies) are held in memory.
class BrownianIncrements {
 public:
  static BrownianIncrements generate(const RngStream& stream, std::size_t dim,
                                     const DiffusionConfig& cfg);

  /// `values` holds steps * dim entries, step-major. `coins` seeds the tie and
  /// fallback coins of the consumers.
  static BrownianIncrements from_values(std::size_t dim, double step_h, std::vector<double> values,
                                        RngStream coins = {0, kCoinStreamOffset, 0});

  [[nodiscard]] std::size_t dim() const { return dim_; }
  [[nodiscard]] std::size_t steps() const { return steps_; }
  [[nodiscard]] double step_h() const { return step_h_; }

  void fill(std::size_t k, std::span<double> out) const;

  /// Stream for per-vector coins: the driving stream id offset by 2^32.
  [[nodiscard]] const RngStream& coin_stream() const { return coins_; }

  [[nodiscard]] BrownianIncrements materialized() const;
  [[nodiscard]] BrownianIncrements negated() const;

  /// Sums consecutive blocks of `factor` increments: the same Brownian path
  /// sampled on a grid `factor` times coarser. steps() must divide evenly.
  [[nodiscard]] BrownianIncrements coarsened(std::size_t factor) const;

 private:
  BrownianIncrements() = default;
  std::size_t dim_ = 0;
  std::size_t steps_ = 0;
  double step_h_ = 0.0;
  double sqrt_h_ = 0.0;
  std::optional<RngStream> source_;
  std::vector<double> values_;
  RngStream coins_;
};

struct SignAssignment {
  std::vector<int> sigma;           // each entry exactly -1 or +1
  std::size_t unabsorbed_count = 0;
  std::vector<bool> fallback_used;  // coin decided this entry

  [[nodiscard]] std::size_t size() const { return sigma.size(); }
};

// Paths of a coupled batch. Rows of `w` are recorded times, columns vectors.
// Without record_paths only t = 0 and the final time are kept.
struct TrajectoryBatch {
  std::size_t n = 0;
  double step_h = 0.0;
  std::size_t steps = 0;
  std::vector<double> times;
  std::vector<double> w;
  std::vector<std::optional<std::size_t>> absorbed_at;  // step index, 1-based
  std::vector<double> final_w;
  SignAssignment signs;

  [[nodiscard]] double at(std::size_t k, std::size_t i) const { return w[k * n + i]; }
};

/// Euler-Maruyama for dW = phi(W) <u, dB> from W(0) = 0, for every row of
/// `emb` over the shared increments. Each step is clamped to [-1, 1]; a path
/// with |W| >= 1 - absorb_eps is frozen at sign(W). Unabsorbed paths output
/// sign(W(t_end)), with an exact zero broken by the vector's coin.
///
/// Throws std::invalid_argument on dimension or step mismatch, or when the
/// speed is not usable_for_simulation().
TrajectoryBatch simulate_sticky(const Embedding& emb, const SpeedFunction& speed,
                                const DiffusionConfig& cfg, const BrownianIncrements& increments);

struct AbsorptionStats {
  std::vector<double> bin_edges;     // bins + 1 edges over [0, steps * step_h]
  std::vector<std::size_t> counts;   // absorptions per bin
  std::size_t absorbed = 0;
  std::size_t unabsorbed = 0;
  std::vector<double> frozen_values; // final value of each vector, in order

  [[nodiscard]] double fraction_unabsorbed() const;
  /// Adds another batch's counts; frozen values are appended.
  void merge(const AbsorptionStats& other);
};

AbsorptionStats absorption_stats(const TrajectoryBatch& batch, std::size_t bins = 24);

// Discrete-time Krivine diffusion.
//
// For t = 1..T the state moves by
//   X_u(t) = X_u(t-1) + F_t(X_u(1), ..., X_u(t-1)) * f(<gamma_t, u>)
// from X_u(0) = 0, where component j of gamma_t is the Gaussian at counter
// (t - 1) * d + j of `stream`. The output is sign(X_u(T_u)) at the first t with
// |X_u(t)| >= 1, otherwise a fair coin from the stream offset by 2^32
// (counter = vector index).
//
// `coefficient(t, history)` receives t and the t - 1 earlier states.
template <class Coefficient, class Nonlinearity>
SignAssignment krivine_discrete(const Embedding& emb, std::size_t T, const Nonlinearity& f,
                                const Coefficient& coefficient, const RngStream& stream) {
  if (T == 0) throw std::invalid_argument("krivine_discrete: T must be at least 1");
  const std::size_t n = emb.size();
  const std::size_t d = emb.dim();

  std::vector<std::vector<double>> history(n);
  std::vector<bool> done(n, false);
  SignAssignment out;
  out.sigma.assign(n, 0);
  out.fallback_used.assign(n, false);

  std::vector<double> gamma(d);
  std::size_t remaining = n;
  for (std::size_t t = 1; t <= T && remaining > 0; ++t) {
    for (std::size_t j = 0; j < d; ++j) gamma[j] = stream.gaussian_at((t - 1) * d + j);
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      auto& h = history[i];
      const double prev = h.empty() ? 0.0 : h.back();
      const double next = prev + coefficient(t, std::span<const double>(h)) * f(dot(gamma, emb.row(i)));
      h.push_back(next);
      if (std::fabs(next) >= 1.0) {
        out.sigma[i] = next > 0.0 ? 1 : -1;
        done[i] = true;
        --remaining;
      }
    }
  }

  const RngStream coins = stream.substream(stream.stream_id + kCoinStreamOffset);
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    out.sigma[i] = coins.uniform_at(i) < 0.5 ? -1 : 1;
    out.fallback_used[i] = true;
    ++out.unabsorbed_count;
  }
  return out;
}

/// The Euler-Maruyama scheme for speed `phi` written as a Krivine diffusion.
///
/// With f = identity and gamma_t = dB_t / sqrt(h), the state is rescaled as
/// X = W / (1 - absorb_eps), so the exit rule |X| >= 1 coincides with the
/// absorption band of simulate_sticky:
///   F_t(history) = phi((1 - eps) * X(t-1)) * sqrt(h) / (1 - eps).
struct EulerKrivine {
  SpeedFunction phi;
  double sqrt_h;
  double band;  // 1 - absorb_eps
  std::size_t steps;

  double operator()(std::size_t /*t*/, std::span<const double> history) const {
    const double x = history.empty() ? 0.0 : history.back();
    return phi(band * x) * sqrt_h / band;
  }
};

EulerKrivine euler_as_krivine(const SpeedFunction& phi, const DiffusionConfig& cfg);

struct Identity {
  double operator()(double x) const { return x; }
};

}  // namespace krivine

#endif  // KRIVINE_DIFFUSION_HPP
