#include "krivine/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "krivine/numerics.hpp"

namespace krivine {

std::size_t default_rank(std::size_t n) {
  const auto r = static_cast<std::size_t>(std::ceil(std::sqrt(2.0 * static_cast<double>(n))));
  return std::max<std::size_t>(2, r);
}

double sdp_objective(const WeightedGraph& g, const Embedding& emb) {
  if (emb.size() != g.size()) {
    throw std::invalid_argument("sdp_objective: embedding size does not match graph");
  }
  double total = 0.0;
  for (const auto& e : g.edges()) total += e.w * (1.0 - emb.inner(e.i, e.j)) / 2.0;
  return total;
}

Embedding solve_maxcut_sdp(const WeightedGraph& g, const SdpConfig& cfg, SdpTrace* trace) {
  const std::size_t n = g.size();
  if (n == 0) throw std::invalid_argument("solve_maxcut_sdp: empty graph");
  if (!(g.total_weight() > 0.0)) {
    throw std::invalid_argument("solve_maxcut_sdp: graph has zero total weight");
  }
  if (!(cfg.tol > 0.0) || cfg.max_sweeps == 0) {
    throw std::invalid_argument("solve_maxcut_sdp: tol and max_sweeps must be positive");
  }
  const std::size_t r = cfg.rank_r == 0 ? default_rank(n) : cfg.rank_r;

  std::vector<double> v(n * r);
  for (std::size_t i = 0; i < n; ++i) {
    const RngStream stream{cfg.init_seed, i, 0};
    for (std::size_t k = 0; k < r; ++k) v[i * r + k] = stream.gaussian_at(k);
  }
  Embedding start = Embedding::normalized(n, r, std::move(v));
  v = start.values();

  const auto& adj = g.adjacency();
  auto objective = [&] {
    double total = 0.0;
    for (const auto& e : g.edges()) {
      double ip = 0.0;
      for (std::size_t k = 0; k < r; ++k) ip += v[e.i * r + k] * v[e.j * r + k];
      total += e.w * (1.0 - ip) / 2.0;
    }
    return total;
  };

  SdpTrace local;
  SdpTrace& tr = trace != nullptr ? *trace : local;
  tr = SdpTrace{};
  double current = objective();
  std::vector<double> grad(r);
  for (std::size_t sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
    for (std::size_t i = 0; i < n; ++i) {
      std::fill(grad.begin(), grad.end(), 0.0);
      for (const auto& nb : adj[i]) {
        for (std::size_t k = 0; k < r; ++k) grad[k] += nb.w * v[nb.v * r + k];
      }
      double norm = 0.0;
      for (double x : grad) norm += x * x;
      norm = std::sqrt(norm);
      if (!(norm > 0.0)) continue;
      for (std::size_t k = 0; k < r; ++k) v[i * r + k] = -grad[k] / norm;
    }
    const double next = objective();
    tr.objective.push_back(next);
    tr.sweeps = sweep + 1;
    const double gain = next - current;
    current = next;
    if (gain < cfg.tol) {
      tr.converged = true;
      break;
    }
  }
  // Rows are unit up to rounding; renormalize so the embedding invariant holds exactly.
  return Embedding::normalized(n, r, std::move(v));
}

}  // namespace krivine
