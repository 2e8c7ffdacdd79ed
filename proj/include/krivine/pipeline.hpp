#ifndef KRIVINE_PIPELINE_HPP
#define KRIVINE_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "krivine/diffusion.hpp"
#include "krivine/graph.hpp"
#include "krivine/oracle.hpp"
#include "krivine/sdp.hpp"
#include "krivine/speed.hpp"

namespace krivine {

/// Sum over edges of w (1 - sigma_i sigma_j) / 2.
double cut_value(const WeightedGraph& g, const SignAssignment& signs);

struct ExactCut {
  double value = 0.0;
  SignAssignment signs;
};

inline constexpr std::size_t kBruteForceLimit = 24;

/// Exhaustive search over the 2^{n-1} assignments with sigma_0 = +1. Ties go to
/// the lexicographically smallest (sigma_1, ..., sigma_{n-1}) with +1 ordered
/// before -1. Throws std::invalid_argument when n > kBruteForceLimit.
ExactCut brute_force_maxcut(const WeightedGraph& g);

/// Sum over edges of w (1 - arcsin_law(<v_i, v_j>)) / 2: the expected cut of
/// any rounding whose pair correlations follow the arcsin law.
double expected_cut_arcsin(const WeightedGraph& g, const Embedding& emb);

struct GwConstant {
  double ratio;
  double theta;
};

/// min over theta in (0, pi] of (2 theta / pi) / (1 - cos theta), by
/// golden-section search to a 1e-10 bracket.
GwConstant gw_minimizer();
double gw_constant();

// How a trial turns an embedding into signs.
struct RoundingScheme {
  enum class Kind { Diffusion, Hyperplane };
  Kind kind = Kind::Diffusion;
  std::optional<SpeedFunction> speed;  // set for Kind::Diffusion
  std::string label;

  static RoundingScheme diffusion(SpeedFunction speed);
  static RoundingScheme hyperplane();
};

/// "xi", "hyperplane", "power:<alpha>" or "table:<file>".
RoundingScheme parse_scheme(const std::string& text);

/// One rounding replica. Trial t draws its Brownian path (or hyperplane
/// normal) from stream (seed, t); tie and fallback coins come from (seed, t + 2^32).
SignAssignment round_trial(const Embedding& emb, const RoundingScheme& scheme,
                           const DiffusionConfig& cfg, std::uint64_t seed, std::size_t trial);

struct TrialSummary {
  std::vector<double> cuts;  // one per trial, in trial order
  std::size_t best_trial = 0;
  SignAssignment best_signs;
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t unabsorbed = 0;  // summed over trials
};

TrialSummary run_trials(const WeightedGraph& g, const Embedding& emb, const RoundingScheme& scheme,
                        const DiffusionConfig& cfg, std::uint64_t seed, std::size_t trials,
                        std::size_t workers);

struct PipelineConfig {
  SdpConfig sdp;
  DiffusionConfig diffusion;
  std::size_t workers = 1;
  std::size_t exact_limit = 20;  // brute force only for n <= exact_limit
};

struct CutResult {
  std::string scheme;
  std::size_t trials = 0;
  SignAssignment signs;  // best trial
  std::size_t best_trial = 0;
  double cut_value = 0.0;
  double mean_cut = 0.0;
  double mean_cut_std_error = 0.0;
  double sdp_value = 0.0;
  double expected_cut_arcsin = 0.0;
  double ratio_vs_sdp = 0.0;
  std::optional<double> exact_value;
  std::optional<double> ratio_vs_exact;
  std::size_t unabsorbed = 0;
  std::size_t sdp_sweeps = 0;
  std::size_t rank = 0;
};

/// Solves the relaxation, runs `trials` replicas and reports the best cut with
/// the mean. The SDP start and the rounding streams use separate seeds derived
/// from `seed`; cfg.sdp.init_seed is ignored.
CutResult run_pipeline(const WeightedGraph& g, const RoundingScheme& scheme, std::size_t trials,
                       const PipelineConfig& cfg, std::uint64_t seed);

/// Rounding half of run_pipeline for an embedding that is already solved;
/// trial streams use `seed` as given.
CutResult round_embedding(const WeightedGraph& g, const Embedding& emb,
                          const RoundingScheme& scheme, std::size_t trials,
                          const PipelineConfig& cfg, std::uint64_t seed);

struct IdentityEntry {
  double rho = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
  double target = 0.0;
  double deviation_in_se = 0.0;  // 0 when exact, +inf when SE is 0 but the estimate misses
};

struct IdentityReport {
  std::vector<double> rho_grid;
  std::vector<IdentityEntry> entries;
  double max_abs_deviation_in_se_units = 0.0;
  std::string speed;
  std::string engine;
  double step_h = 0.0;
  double t_max = 0.0;
  double absorb_eps = 0.0;
  std::uint64_t seed = 0;
  std::size_t replicas = 0;
  double unabsorbed_fraction = 0.0;
};

enum class Engine { Sticky, KrivineEuler };

struct IdentityOptions {
  SpeedFunction speed = SpeedFunction::make_xi();
  Engine engine = Engine::Sticky;
  std::size_t workers = 1;
};

inline constexpr std::size_t kMinIdentityReplicas = 1000;

/// For each rho builds u = (1, 0), v = (rho, sqrt(1 - rho^2)) and estimates
/// E[sigma_u sigma_v] over `replicas` coupled trajectories. Replica r is driven
/// by stream (seed, r) and shares that driver across the whole grid.
///
/// Throws std::domain_error for rho outside [-1, 1] and std::invalid_argument
/// for fewer than kMinIdentityReplicas replicas.
IdentityReport verify_identity(const std::vector<double>& rho_grid, std::size_t replicas,
                               const DiffusionConfig& cfg, std::uint64_t seed,
                               const IdentityOptions& options = {});

/// True when every entry satisfies |estimate - target| <= max(3 SE, 0.01).
bool identity_within_tolerance(const IdentityReport& report);

struct SchemeComparison {
  std::string scheme;
  double mean = 0.0;
  double std_error = 0.0;
  double best = 0.0;
};

struct CompareReport {
  double sdp_value = 0.0;
  double expected_cut_arcsin = 0.0;
  std::size_t replicas = 0;
  std::vector<SchemeComparison> schemes;
  /// |mean_a - mean_b| / sqrt(se_a^2 + se_b^2) for every pair a < b, row-major.
  std::vector<double> pairwise_z;
};

CompareReport compare_schemes(const WeightedGraph& g, const std::vector<RoundingScheme>& schemes,
                              std::size_t replicas, const PipelineConfig& cfg, std::uint64_t seed);

}  // namespace krivine

#endif  // KRIVINE_PIPELINE_HPP
