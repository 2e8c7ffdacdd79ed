#ifndef KRIVINE_SDP_HPP
#define KRIVINE_SDP_HPP

#include <cstdint>
#include <vector>

#include "krivine/embedding.hpp"
#include "krivine/graph.hpp"

namespace krivine {

struct SdpConfig {
  std::size_t rank_r = 0;  // 0 selects default_rank(n)
  std::size_t max_sweeps = 10000;
  double tol = 1e-9;
  std::uint64_t init_seed = 0;
};

/// max(2, ceil(sqrt(2 n))).
std::size_t default_rank(std::size_t n);

/// Sum over edges of w (1 - <v_i, v_j>) / 2.
double sdp_objective(const WeightedGraph& g, const Embedding& emb);

struct SdpTrace {
  std::vector<double> objective;  // value after each completed sweep
  std::size_t sweeps = 0;
  bool converged = false;
};

/// Rank-r Burer-Monteiro factorization of the MAXCUT relaxation solved by
/// Gauss-Seidel block coordinate ascent: each sweep sets
///   v_i <- -g_i / |g_i|,  g_i = sum_j w_ij v_j,
/// in vertex order, leaving v_i untouched when g_i = 0. Stops once a sweep
/// gains less than cfg.tol or after cfg.max_sweeps. Rows start as normalized
/// Gaussian draws from stream (init_seed, i).
///
/// Throws std::invalid_argument for an empty graph or zero total weight.
Embedding solve_maxcut_sdp(const WeightedGraph& g, const SdpConfig& cfg,
                           SdpTrace* trace = nullptr);

}  // namespace krivine

#endif  // KRIVINE_SDP_HPP
