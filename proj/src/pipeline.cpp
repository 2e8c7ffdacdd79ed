#include "krivine/pipeline.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "krivine/numerics.hpp"
#include "krivine/parallel.hpp"

namespace krivine {
namespace {

constexpr std::uint64_t kSdpSeedTag = 0x5D9;
constexpr std::uint64_t kRoundSeedTag = 0x20D;

double gw_ratio(double theta) { return (2.0 * theta / kPi) / (1.0 - std::cos(theta)); }

}  // namespace

double cut_value(const WeightedGraph& g, const SignAssignment& signs) {
  if (signs.size() != g.size()) {
    throw std::invalid_argument("cut_value: sign count does not match graph");
  }
  double total = 0.0;
  for (const auto& e : g.edges()) {
    if (signs.sigma[e.i] != signs.sigma[e.j]) total += e.w;
  }
  return total;
}

ExactCut brute_force_maxcut(const WeightedGraph& g) {
  const std::size_t n = g.size();
  if (n > kBruteForceLimit) {
    throw std::invalid_argument("brute_force_maxcut: refusing n = " + std::to_string(n) +
                                " (limit " + std::to_string(kBruteForceLimit) + ")");
  }
  ExactCut best;
  best.signs.sigma.assign(n, 1);
  best.signs.fallback_used.assign(n, false);
  if (n <= 1) return best;

  // Bit (n - 1 - i) of the mask is vertex i's side, so increasing masks walk
  // (sigma_1, ..., sigma_{n-1}) in lexicographic order with +1 first.
  const std::uint64_t patterns = std::uint64_t{1} << (n - 1);
  std::uint64_t best_mask = 0;
  double best_value = -1.0;
  for (std::uint64_t mask = 0; mask < patterns; ++mask) {
    double value = 0.0;
    for (const auto& e : g.edges()) {
      const auto side_i = e.i == 0 ? 0u : (mask >> (n - 1 - e.i)) & 1u;
      const auto side_j = (mask >> (n - 1 - e.j)) & 1u;
      if (side_i != side_j) value += e.w;
    }
    if (value > best_value) {
      best_value = value;
      best_mask = mask;
    }
  }
  best.value = best_value;
  for (std::size_t i = 1; i < n; ++i) {
    best.signs.sigma[i] = ((best_mask >> (n - 1 - i)) & 1u) ? -1 : 1;
  }
  return best;
}

double expected_cut_arcsin(const WeightedGraph& g, const Embedding& emb) {
  if (emb.size() != g.size()) {
    throw std::invalid_argument("expected_cut_arcsin: embedding size does not match graph");
  }
  double total = 0.0;
  for (const auto& e : g.edges()) {
    total += e.w * (1.0 - arcsin_law(clamp_inner_product(emb.inner(e.i, e.j)))) / 2.0;
  }
  return total;
}

GwConstant gw_minimizer() {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = 1e-6, b = kPi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = gw_ratio(c), fd = gw_ratio(d);
  while (b - a > 1e-10) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = gw_ratio(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = gw_ratio(d);
    }
  }
  const double theta = 0.5 * (a + b);
  return {gw_ratio(theta), theta};
}

double gw_constant() { return gw_minimizer().ratio; }

RoundingScheme RoundingScheme::diffusion(SpeedFunction speed) {
  RoundingScheme s;
  s.kind = Kind::Diffusion;
  s.label = speed.name();
  s.speed = std::move(speed);
  return s;
}

RoundingScheme RoundingScheme::hyperplane() {
  RoundingScheme s;
  s.kind = Kind::Hyperplane;
  s.label = "hyperplane";
  return s;
}

RoundingScheme parse_scheme(const std::string& text) {
  if (text == "xi") return RoundingScheme::diffusion(SpeedFunction::make_xi());
  if (text == "hyperplane") return RoundingScheme::hyperplane();
  if (text.rfind("power:", 0) == 0) {
    const std::string arg = text.substr(6);
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != arg.size()) {
      throw std::invalid_argument("scheme `" + text + "`: expected power:<alpha>");
    }
    auto s = RoundingScheme::diffusion(SpeedFunction::power(alpha));
    s.label = text;
    return s;
  }
  if (text.rfind("table:", 0) == 0) {
    auto s = RoundingScheme::diffusion(load_tabulated_speed(text.substr(6)));
    s.label = text;
    return s;
  }
  throw std::invalid_argument("unknown scheme `" + text + "` (xi, hyperplane, power:<a>, table:<file>)");
}

SignAssignment round_trial(const Embedding& emb, const RoundingScheme& scheme,
                           const DiffusionConfig& cfg, std::uint64_t seed, std::size_t trial) {
  const RngStream stream{seed, trial, 0};
  if (scheme.kind == RoundingScheme::Kind::Hyperplane) {
    std::vector<double> g(emb.dim());
    for (std::size_t j = 0; j < g.size(); ++j) g[j] = stream.gaussian_at(j);
    return hyperplane_round(emb, g);
  }
  DiffusionConfig quiet = cfg;
  quiet.record_paths = false;
  const auto inc = BrownianIncrements::generate(stream, emb.dim(), quiet);
  return simulate_sticky(emb, *scheme.speed, quiet, inc).signs;
}

TrialSummary run_trials(const WeightedGraph& g, const Embedding& emb, const RoundingScheme& scheme,
                        const DiffusionConfig& cfg, std::uint64_t seed, std::size_t trials,
                        std::size_t workers) {
  if (trials == 0) throw std::invalid_argument("run_trials: need at least one trial");
  if (emb.size() != g.size()) {
    throw std::invalid_argument("run_trials: embedding size does not match graph");
  }
  std::vector<SignAssignment> signs(trials);
  parallel_for(trials, workers,
               [&](std::size_t t) { signs[t] = round_trial(emb, scheme, cfg, seed, t); });

  TrialSummary s;
  s.cuts.resize(trials);
  double sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    s.cuts[t] = cut_value(g, signs[t]);
    s.unabsorbed += signs[t].unabsorbed_count;
    sum += s.cuts[t];
    if (s.cuts[t] > s.cuts[s.best_trial]) s.best_trial = t;
  }
  s.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    double ss = 0.0;
    for (double c : s.cuts) ss += (c - s.mean) * (c - s.mean);
    s.std_error = std::sqrt(ss / static_cast<double>(trials - 1) / static_cast<double>(trials));
  }
  s.best_signs = std::move(signs[s.best_trial]);
  return s;
}

CutResult round_embedding(const WeightedGraph& g, const Embedding& emb,
                          const RoundingScheme& scheme, std::size_t trials,
                          const PipelineConfig& cfg, std::uint64_t seed) {
  TrialSummary s = run_trials(g, emb, scheme, cfg.diffusion, seed, trials, cfg.workers);
  CutResult r;
  r.scheme = scheme.label;
  r.trials = trials;
  r.best_trial = s.best_trial;
  r.cut_value = s.cuts[s.best_trial];
  r.signs = std::move(s.best_signs);
  r.mean_cut = s.mean;
  r.mean_cut_std_error = s.std_error;
  r.unabsorbed = s.unabsorbed;
  r.sdp_value = sdp_objective(g, emb);
  r.expected_cut_arcsin = expected_cut_arcsin(g, emb);
  r.ratio_vs_sdp = r.sdp_value > 0.0 ? r.cut_value / r.sdp_value : 0.0;
  r.rank = emb.dim();
  if (g.size() <= cfg.exact_limit && g.size() <= kBruteForceLimit) {
    r.exact_value = brute_force_maxcut(g).value;
    if (*r.exact_value > 0.0) r.ratio_vs_exact = r.cut_value / *r.exact_value;
  }
  return r;
}

CutResult run_pipeline(const WeightedGraph& g, const RoundingScheme& scheme, std::size_t trials,
                       const PipelineConfig& cfg, std::uint64_t seed) {
  SdpConfig sdp = cfg.sdp;
  sdp.init_seed = derive_seed(seed, kSdpSeedTag);
  SdpTrace trace;
  const Embedding emb = solve_maxcut_sdp(g, sdp, &trace);
  CutResult r = round_embedding(g, emb, scheme, trials, cfg, derive_seed(seed, kRoundSeedTag));
  r.sdp_sweeps = trace.sweeps;
  return r;
}

IdentityReport verify_identity(const std::vector<double>& rho_grid, std::size_t replicas,
                               const DiffusionConfig& cfg, std::uint64_t seed,
                               const IdentityOptions& options) {
  cfg.check();
  if (replicas < kMinIdentityReplicas) {
    throw std::invalid_argument("verify_identity: need at least " +
                                std::to_string(kMinIdentityReplicas) + " replicas");
  }
  if (rho_grid.empty()) throw std::invalid_argument("verify_identity: empty rho grid");

  // Row 0 is u = e_1; row k + 1 pairs with rho_grid[k].
  std::vector<double> rows = {1.0, 0.0};
  for (double rho : rho_grid) {
    if (!(rho >= -1.0 && rho <= 1.0)) {
      throw std::domain_error("verify_identity: rho outside [-1, 1]");
    }
    rows.push_back(rho);
    rows.push_back(std::sqrt(std::fmax(0.0, 1.0 - rho * rho)));
  }
  const std::size_t m = rho_grid.size();
  const Embedding emb(m + 1, 2, std::move(rows));

  DiffusionConfig quiet = cfg;
  quiet.record_paths = false;
  if (!usable_for_simulation(options.speed)) {
    throw std::invalid_argument("verify_identity: speed fails the admissibility conditions");
  }
  const EulerKrivine euler = euler_as_krivine(options.speed, quiet);

  std::vector<signed char> products(replicas * m);
  std::vector<std::size_t> unabsorbed(replicas);
  parallel_for(replicas, options.workers, [&](std::size_t r) {
    const RngStream stream{seed, r, 0};
    SignAssignment signs;
    if (options.engine == Engine::Sticky) {
      const auto inc = BrownianIncrements::generate(stream, 2, quiet);
      signs = simulate_sticky(emb, options.speed, quiet, inc).signs;
    } else {
      signs = krivine_discrete(emb, euler.steps, Identity{}, euler, stream);
    }
    for (std::size_t k = 0; k < m; ++k) {
      products[r * m + k] = static_cast<signed char>(signs.sigma[0] * signs.sigma[k + 1]);
    }
    unabsorbed[r] = signs.unabsorbed_count;
  });

  IdentityReport report;
  report.rho_grid = rho_grid;
  report.speed = options.speed.name();
  report.engine = options.engine == Engine::Sticky ? "sticky" : "krivine-euler";
  report.step_h = cfg.step_h;
  report.t_max = cfg.t_max;
  report.absorb_eps = cfg.absorb_eps;
  report.seed = seed;
  report.replicas = replicas;

  std::size_t unabsorbed_total = 0;
  for (std::size_t c : unabsorbed) unabsorbed_total += c;
  report.unabsorbed_fraction =
      static_cast<double>(unabsorbed_total) / static_cast<double>(replicas * (m + 1));

  for (std::size_t k = 0; k < m; ++k) {
    long long sum = 0;
    for (std::size_t r = 0; r < replicas; ++r) sum += products[r * m + k];
    const auto est = pair_correlation_from_sum(sum, replicas);
    IdentityEntry e;
    e.rho = rho_grid[k];
    e.estimate = est.estimate;
    e.std_error = est.std_error;
    e.replicas = replicas;
    e.target = arcsin_law(rho_grid[k]);
    const double gap = std::fabs(e.estimate - e.target);
    if (gap == 0.0) {
      e.deviation_in_se = 0.0;
    } else if (e.std_error > 0.0) {
      e.deviation_in_se = gap / e.std_error;
    } else {
      e.deviation_in_se = std::numeric_limits<double>::infinity();
    }
    report.max_abs_deviation_in_se_units = std::fmax(report.max_abs_deviation_in_se_units,
                                                     e.deviation_in_se);
    report.entries.push_back(e);
  }
  return report;
}

bool identity_within_tolerance(const IdentityReport& report) {
  for (const auto& e : report.entries) {
    if (!(std::fabs(e.estimate - e.target) <= std::fmax(3.0 * e.std_error, 0.01))) return false;
  }
  return true;
}

CompareReport compare_schemes(const WeightedGraph& g, const std::vector<RoundingScheme>& schemes,
                              std::size_t replicas, const PipelineConfig& cfg, std::uint64_t seed) {
  if (schemes.empty()) throw std::invalid_argument("compare_schemes: no schemes given");
  SdpConfig sdp = cfg.sdp;
  sdp.init_seed = derive_seed(seed, kSdpSeedTag);
  const Embedding emb = solve_maxcut_sdp(g, sdp);
  const std::uint64_t round_seed = derive_seed(seed, kRoundSeedTag);

  CompareReport report;
  report.sdp_value = sdp_objective(g, emb);
  report.expected_cut_arcsin = expected_cut_arcsin(g, emb);
  report.replicas = replicas;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    // Independent streams per scheme so the pairwise z-scores are honest.
    const TrialSummary t = run_trials(g, emb, schemes[s], cfg.diffusion,
                                      derive_seed(round_seed, s), replicas, cfg.workers);
    report.schemes.push_back({schemes[s].label, t.mean, t.std_error, t.cuts[t.best_trial]});
  }
  for (std::size_t a = 0; a < report.schemes.size(); ++a) {
    for (std::size_t b = a + 1; b < report.schemes.size(); ++b) {
      const auto& x = report.schemes[a];
      const auto& y = report.schemes[b];
      const double se = std::sqrt(x.std_error * x.std_error + y.std_error * y.std_error);
      const double gap = std::fabs(x.mean - y.mean);
      report.pairwise_z.push_back(gap == 0.0 ? 0.0 : se > 0.0 ? gap / se
                                                          : std::numeric_limits<double>::infinity());
    }
  }
  return report;
}

}  // namespace krivine
