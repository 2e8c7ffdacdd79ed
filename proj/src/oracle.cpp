#include "krivine/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "krivine/numerics.hpp"

namespace krivine {

ZPath simulate_z(const Embedding& emb, const DiffusionConfig& cfg,
                 const BrownianIncrements& increments) {
  cfg.check();
  if (increments.dim() != emb.dim()) {
    throw std::invalid_argument("simulate_z: increment dimension does not match embedding");
  }
  if (std::fabs(increments.step_h() - cfg.step_h) > 1e-12 * cfg.step_h) {
    throw std::invalid_argument("simulate_z: increment step does not match config");
  }
  const std::size_t n = emb.size();
  const std::size_t K = increments.steps();
  const double h = increments.step_h();

  ZPath out;
  out.n = n;
  std::vector<double> z(n, 0.0);
  std::vector<double> db(emb.dim());
  if (cfg.record_paths) out.z.reserve((K + 1) * n);
  out.z.assign(n, 0.0);

  for (std::size_t k = 0; k < K; ++k) {
    increments.fill(k, db);
    const double discount = std::exp(-0.5 * static_cast<double>(k) * h);
    for (std::size_t i = 0; i < n; ++i) z[i] += discount * dot(emb.row(i), db);
    if (cfg.record_paths) out.z.insert(out.z.end(), z.begin(), z.end());
  }

  if (cfg.record_paths) {
    out.times.resize(K + 1);
    for (std::size_t k = 0; k <= K; ++k) out.times[k] = static_cast<double>(k) * h;
  } else {
    out.z.insert(out.z.end(), z.begin(), z.end());
    out.times = {0.0, static_cast<double>(K) * h};
  }
  return out;
}

MartingalePath closed_form_m(const ZPath& z) {
  MartingalePath out;
  out.n = z.n;
  out.times = z.times;
  out.m.resize(z.z.size());
  for (std::size_t k = 0; k < z.times.size(); ++k) {
    const double growth = std::exp(0.5 * z.times[k]);
    for (std::size_t i = 0; i < z.n; ++i) {
      out.m[k * z.n + i] = 1.0 - 2.0 * normal_cdf(-growth * z.at(k, i));
    }
  }
  return out;
}

SignAssignment hyperplane_round(const Embedding& emb, std::span<const double> g) {
  if (g.size() != emb.dim()) {
    throw std::invalid_argument("hyperplane_round: direction dimension does not match embedding");
  }
  for (double x : g) {
    if (!std::isfinite(x)) throw std::invalid_argument("hyperplane_round: non-finite direction");
  }
  SignAssignment out;
  out.sigma.resize(emb.size());
  out.fallback_used.assign(emb.size(), false);
  for (std::size_t i = 0; i < emb.size(); ++i) {
    out.sigma[i] = dot(emb.row(i), g) < 0.0 ? -1 : 1;
  }
  return out;
}

double arcsin_law(double rho) {
  if (!(rho >= -1.0 && rho <= 1.0)) {
    throw std::domain_error("arcsin_law: inner product outside [-1, 1]");
  }
  return 2.0 / kPi * std::asin(rho);
}

double clamp_inner_product(double rho, double tolerance) {
  if (!(std::fabs(rho) <= 1.0 + tolerance)) {
    throw std::domain_error("inner product exceeds [-1, 1] beyond tolerance");
  }
  return std::fmax(-1.0, std::fmin(1.0, rho));
}

CorrelationEstimate pair_correlation_from_sum(long long product_sum, std::size_t replicas) {
  if (replicas < 2) throw std::invalid_argument("pair_correlation: need at least two replicas");
  const double n = static_cast<double>(replicas);
  const double mean = static_cast<double>(product_sum) / n;
  return {mean, std::sqrt(std::fmax(0.0, 1.0 - mean * mean) / n), replicas};
}

CorrelationEstimate pair_correlation(std::span<const std::pair<int, int>> pairs) {
  long long sum = 0;
  for (const auto& [a, b] : pairs) sum += static_cast<long long>(a) * b;
  return pair_correlation_from_sum(sum, pairs.size());
}

}  // namespace krivine
