#include "krivine/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace krivine {

void DiffusionConfig::check() const {
  if (!(step_h > 0.0) || !std::isfinite(step_h)) {
    throw std::invalid_argument("diffusion config: step_h must be positive");
  }
  if (!(t_max >= step_h) || !std::isfinite(t_max)) {
    throw std::invalid_argument("diffusion config: need 0 < step_h <= t_max");
  }
  if (!(absorb_eps > 0.0 && absorb_eps < 1.0)) {
    throw std::invalid_argument("diffusion config: absorb_eps must lie in (0, 1)");
  }
}

std::size_t DiffusionConfig::steps() const {
  const double ratio = t_max / step_h;
  return static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12)));
}

BrownianIncrements BrownianIncrements::generate(const RngStream& stream, std::size_t dim,
                                                const DiffusionConfig& cfg) {
  cfg.check();
  if (dim == 0) throw std::invalid_argument("brownian increments: dimension must be positive");
  BrownianIncrements b;
  b.dim_ = dim;
  b.steps_ = cfg.steps();
  b.step_h_ = cfg.step_h;
  b.sqrt_h_ = std::sqrt(cfg.step_h);
  b.source_ = stream.substream(stream.stream_id);
  b.coins_ = stream.substream(stream.stream_id + kCoinStreamOffset);
  return b;
}

BrownianIncrements BrownianIncrements::from_values(std::size_t dim, double step_h,
                                                   std::vector<double> values, RngStream coins) {
  if (dim == 0 || values.size() % dim != 0) {
    throw std::invalid_argument("brownian increments: values must be a multiple of dim");
  }
  if (!(step_h > 0.0)) throw std::invalid_argument("brownian increments: step_h must be positive");
  BrownianIncrements b;
  b.dim_ = dim;
  b.steps_ = values.size() / dim;
  b.step_h_ = step_h;
  b.sqrt_h_ = std::sqrt(step_h);
  b.values_ = std::move(values);
  b.coins_ = coins;
  return b;
}

void BrownianIncrements::fill(std::size_t k, std::span<double> out) const {
  if (source_) {
    const std::uint64_t base = static_cast<std::uint64_t>(k) * dim_;
    std::size_t j = 0;
    while (j < dim_) {
      const std::uint64_t idx = base + j;
      if ((idx & 1) == 0 && j + 1 < dim_) {
        const auto g = source_->gaussian_pair_at(idx >> 1);
        out[j] = sqrt_h_ * g[0];
        out[j + 1] = sqrt_h_ * g[1];
        j += 2;
      } else {
        out[j] = sqrt_h_ * source_->gaussian_at(idx);
        ++j;
      }
    }
  } else {
    std::copy_n(values_.begin() + static_cast<std::ptrdiff_t>(k * dim_), dim_, out.begin());
  }
}

BrownianIncrements BrownianIncrements::materialized() const {
  std::vector<double> all(steps_ * dim_);
  for (std::size_t k = 0; k < steps_; ++k) fill(k, std::span<double>(all).subspan(k * dim_, dim_));
  return from_values(dim_, step_h_, std::move(all), coins_);
}

BrownianIncrements BrownianIncrements::negated() const {
  BrownianIncrements m = materialized();
  for (double& x : m.values_) x = -x;
  return m;
}

BrownianIncrements BrownianIncrements::coarsened(std::size_t factor) const {
  if (factor == 0 || steps_ % factor != 0) {
    throw std::invalid_argument("coarsened: factor must divide the step count");
  }
  const std::size_t coarse = steps_ / factor;
  std::vector<double> sum(coarse * dim_, 0.0);
  std::vector<double> buf(dim_);
  for (std::size_t k = 0; k < steps_; ++k) {
    fill(k, buf);
    for (std::size_t j = 0; j < dim_; ++j) sum[(k / factor) * dim_ + j] += buf[j];
  }
  return from_values(dim_, step_h_ * static_cast<double>(factor), std::move(sum), coins_);
}

namespace {

template <class Phi>
void run_sticky(const Phi& phi, const Embedding& emb, const DiffusionConfig& cfg,
                const BrownianIncrements& inc, TrajectoryBatch& out) {
  const std::size_t n = emb.size();
  const std::size_t d = emb.dim();
  const std::size_t K = inc.steps();
  const double edge = 1.0 - cfg.absorb_eps;

  std::vector<double> w(n, 0.0);
  std::vector<char> frozen(n, 0);
  std::vector<double> db(d);
  std::size_t active = n;

  if (cfg.record_paths) out.w.reserve((K + 1) * n);
  out.w.assign(n, 0.0);

  std::size_t k = 0;
  for (; k < K && active > 0; ++k) {
    inc.fill(k, db);
    for (std::size_t i = 0; i < n; ++i) {
      if (frozen[i]) continue;
      double x = w[i] + phi(w[i]) * dot(emb.row(i), db);
      x = std::clamp(x, -1.0, 1.0);
      if (std::fabs(x) >= edge) {
        x = x > 0.0 ? 1.0 : -1.0;
        frozen[i] = 1;
        out.absorbed_at[i] = k + 1;
        --active;
      }
      w[i] = x;
    }
    if (cfg.record_paths) out.w.insert(out.w.end(), w.begin(), w.end());
  }

  if (cfg.record_paths) {
    // Every path is frozen from here on.
    for (; k < K; ++k) out.w.insert(out.w.end(), w.begin(), w.end());
    out.times.resize(K + 1);
    for (std::size_t j = 0; j <= K; ++j) out.times[j] = static_cast<double>(j) * inc.step_h();
  } else {
    out.w.insert(out.w.end(), w.begin(), w.end());
    out.times = {0.0, static_cast<double>(K) * inc.step_h()};
  }
  out.final_w = w;
}

}  // namespace

TrajectoryBatch simulate_sticky(const Embedding& emb, const SpeedFunction& speed,
                                const DiffusionConfig& cfg, const BrownianIncrements& increments) {
  cfg.check();
  if (increments.dim() != emb.dim()) {
    throw std::invalid_argument("simulate_sticky: increment dimension does not match embedding");
  }
  if (std::fabs(increments.step_h() - cfg.step_h) > 1e-12 * cfg.step_h) {
    throw std::invalid_argument("simulate_sticky: increment step does not match config");
  }
  if (!usable_for_simulation(speed)) {
    throw std::invalid_argument("simulate_sticky: speed fails the admissibility conditions");
  }

  const std::size_t n = emb.size();
  TrajectoryBatch out;
  out.n = n;
  out.step_h = increments.step_h();
  out.steps = increments.steps();
  out.absorbed_at.assign(n, std::nullopt);

  speed.visit([&](const auto& phi) { run_sticky(phi, emb, cfg, increments, out); });

  out.signs.sigma.assign(n, 0);
  out.signs.fallback_used.assign(n, false);
  const RngStream& coins = increments.coin_stream();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = out.final_w[i];
    if (!out.absorbed_at[i]) ++out.signs.unabsorbed_count;
    if (x > 0.0) {
      out.signs.sigma[i] = 1;
    } else if (x < 0.0) {
      out.signs.sigma[i] = -1;
    } else {
      out.signs.sigma[i] = coins.uniform_at(i) < 0.5 ? -1 : 1;
      out.signs.fallback_used[i] = true;
    }
  }
  return out;
}

double AbsorptionStats::fraction_unabsorbed() const {
  const std::size_t total = absorbed + unabsorbed;
  return total == 0 ? 0.0 : static_cast<double>(unabsorbed) / static_cast<double>(total);
}

void AbsorptionStats::merge(const AbsorptionStats& other) {
  if (counts.empty()) {
    *this = other;
    return;
  }
  if (other.counts.size() != counts.size() || other.bin_edges != bin_edges) {
    throw std::invalid_argument("absorption stats: incompatible histograms");
  }
  for (std::size_t b = 0; b < counts.size(); ++b) counts[b] += other.counts[b];
  absorbed += other.absorbed;
  unabsorbed += other.unabsorbed;
  frozen_values.insert(frozen_values.end(), other.frozen_values.begin(), other.frozen_values.end());
}

AbsorptionStats absorption_stats(const TrajectoryBatch& batch, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("absorption_stats: need at least one bin");
  AbsorptionStats s;
  const double horizon = static_cast<double>(batch.steps) * batch.step_h;
  s.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) {
    s.bin_edges[b] = horizon * static_cast<double>(b) / static_cast<double>(bins);
  }
  s.counts.assign(bins, 0);
  for (std::size_t i = 0; i < batch.n; ++i) {
    if (const auto& at = batch.absorbed_at[i]) {
      ++s.absorbed;
      // Step k covers (t_{k-1}, t_k]; bin by its end time.
      const std::size_t bin = std::min(bins - 1, (*at - 1) * bins / batch.steps);
      ++s.counts[bin];
    } else {
      ++s.unabsorbed;
    }
  }
  s.frozen_values = batch.final_w;
  return s;
}

EulerKrivine euler_as_krivine(const SpeedFunction& phi, const DiffusionConfig& cfg) {
  cfg.check();
  return EulerKrivine{phi, std::sqrt(cfg.step_h), 1.0 - cfg.absorb_eps, cfg.steps()};
}

}  // namespace krivine
