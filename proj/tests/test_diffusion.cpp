#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "krivine/diffusion.hpp"
#include "krivine/numerics.hpp"
#include "krivine/oracle.hpp"

using namespace krivine;

namespace {

DiffusionConfig config(double h, double tmax, double eps = 1e-6, bool record = false) {
  DiffusionConfig c;
  c.step_h = h;
  c.t_max = tmax;
  c.absorb_eps = eps;
  c.record_paths = record;
  return c;
}

// e_1, ..., e_d: independent paths under one driver
Embedding basis(std::size_t d) {
  std::vector<double> v(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) v[i * d + i] = 1.0;
  return Embedding(d, d, v);
}

}  // namespace

TEST_CASE("diffusion config validation") {
  CHECK_NOTHROW(DiffusionConfig{}.check());
  CHECK(DiffusionConfig{}.steps() == 12000);
  CHECK(config(0.1, 0.3).steps() == 3);
  CHECK(config(0.25, 1.0).steps() == 4);
  CHECK(config(0.3, 1.0).steps() == 4);
  CHECK_THROWS_AS(config(0.0, 1.0).check(), std::invalid_argument);
  CHECK_THROWS_AS(config(2.0, 1.0).check(), std::invalid_argument);
  CHECK_THROWS_AS(config(0.1, 1.0, 0.0).check(), std::invalid_argument);
  CHECK_THROWS_AS(config(0.1, 1.0, 1.0).check(), std::invalid_argument);
}

TEST_CASE("generated increments follow the counter layout") {
  const RngStream s{8, 3, 0};
  const auto cfg = config(0.01, 1.0);
  const auto inc = BrownianIncrements::generate(s, 3, cfg);
  CHECK(inc.steps() == 100);
  CHECK(inc.dim() == 3);
  CHECK(inc.coin_stream() == RngStream{8, 3 + kCoinStreamOffset, 0});
  std::vector<double> buf(3);
  for (std::size_t k = 0; k < 100; ++k) {
    inc.fill(k, buf);
    for (std::size_t j = 0; j < 3; ++j) CHECK(buf[j] == 0.1 * s.gaussian_at(k * 3 + j));
  }
  CHECK_THROWS_AS(BrownianIncrements::generate(s, 0, cfg), std::invalid_argument);
}

TEST_CASE("coarsened and negated increments") {
  const auto inc = BrownianIncrements::from_values(2, 0.5, {1, 2, 3, 4, 5, 6, 7, 8});
  const auto c = inc.coarsened(2);
  CHECK(c.steps() == 2);
  CHECK(c.step_h() == 1.0);
  std::vector<double> buf(2);
  c.fill(0, buf);
  CHECK(buf == std::vector<double>{4, 6});
  c.fill(1, buf);
  CHECK(buf == std::vector<double>{12, 14});
  inc.negated().fill(3, buf);
  CHECK(buf == std::vector<double>{-7, -8});
  CHECK_THROWS_AS((void)inc.coarsened(3), std::invalid_argument);
  CHECK_THROWS_AS(BrownianIncrements::from_values(2, 0.5, {1, 2, 3}), std::invalid_argument);
}

TEST_CASE("constant speed override is a clamped random walk") {
  const auto one = SpeedFunction::tabulated({{-1, 1}, {1, 1}}).with_endpoint_override();
  const auto cfg = config(0.01, 2.0, 1e-6, true);
  const Embedding emb = Embedding::normalized(2, 2, {1, 0, 0.6, 0.8});
  const auto inc = BrownianIncrements::generate(RngStream{4, 0, 0}, 2, cfg);
  const auto batch = simulate_sticky(emb, one, cfg, inc);

  std::vector<double> db(2);
  for (std::size_t i = 0; i < 2; ++i) {
    double w = 0.0;
    for (std::size_t k = 0; k < inc.steps(); ++k) {
      if (std::fabs(w) >= 1.0 - cfg.absorb_eps) break;
      inc.fill(k, db);
      w = std::clamp(w + dot(emb.row(i), db), -1.0, 1.0);
      if (std::fabs(w) >= 1.0 - cfg.absorb_eps) w = w > 0 ? 1.0 : -1.0;
      CHECK(batch.at(k + 1, i) == w);
    }
  }
  CHECK_THROWS_AS(simulate_sticky(emb, SpeedFunction::tabulated({{-1, 1}, {1, 1}}), cfg, inc),
                  std::invalid_argument);
}

TEST_CASE("zero driver leaves paths at zero and uses the coin") {
  const auto cfg = config(0.1, 1.0);
  const auto inc = BrownianIncrements::from_values(1, 0.1, std::vector<double>(10, 0.0));
  const Embedding emb(3, 1, {1, -1, 1});
  const auto batch = simulate_sticky(emb, SpeedFunction::make_xi(), cfg, inc);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(batch.final_w[i] == 0.0);
    CHECK(batch.signs.fallback_used[i]);
    CHECK(std::abs(batch.signs.sigma[i]) == 1);
    CHECK(batch.signs.sigma[i] == (inc.coin_stream().uniform_at(i) < 0.5 ? -1 : 1));
  }
  CHECK(batch.signs.unabsorbed_count == 3);
  const auto stats = absorption_stats(batch);
  CHECK(stats.fraction_unabsorbed() == 1.0);
  CHECK(stats.absorbed == 0);
}

TEST_CASE("simulate_sticky argument checks") {
  const auto cfg = config(0.1, 1.0);
  const auto inc = BrownianIncrements::from_values(2, 0.1, std::vector<double>(20, 0.0));
  CHECK_THROWS_AS(simulate_sticky(basis(3), SpeedFunction::make_xi(), cfg, inc),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_sticky(basis(2), SpeedFunction::make_xi(), config(0.05, 1.0), inc),
                  std::invalid_argument);
}

TEST_CASE("antipodal and identical vectors under a shared driver") {
  const auto cfg = config(1e-3, 12.0);
  const Embedding emb = Embedding::normalized(3, 2, {0.3, 0.7, -0.3, -0.7, 0.3, 0.7});
  for (std::uint64_t r = 0; r < 20; ++r) {
    const auto inc = BrownianIncrements::generate(RngStream{1, r, 0}, 2, cfg);
    const auto b = simulate_sticky(emb, SpeedFunction::make_xi(), cfg, inc);
    if (b.absorbed_at[0] || b.absorbed_at[1]) CHECK(b.signs.sigma[0] == -b.signs.sigma[1]);
    CHECK(b.final_w[0] == -b.final_w[1]);
    CHECK(b.signs.sigma[0] == b.signs.sigma[2]);
    CHECK(b.final_w[0] == b.final_w[2]);
  }
}

TEST_CASE("negating the driver flips every path exactly") {
  const auto cfg = config(1e-3, 6.0, 1e-6, true);
  const Embedding emb = Embedding::normalized(4, 3, {1, 0, 0, 0.2, 0.5, -0.1, -1, 2, 3, 0, 0, 1});
  for (const auto& speed : {SpeedFunction::make_xi(), SpeedFunction::power(1.5)}) {
    const auto inc = BrownianIncrements::generate(RngStream{77, 5, 0}, 3, cfg);
    const auto a = simulate_sticky(emb, speed, cfg, inc);
    const auto b = simulate_sticky(emb, speed, cfg, inc.negated());
    REQUIRE(a.w.size() == b.w.size());
    bool exact = true;
    for (std::size_t k = 0; k < a.w.size(); ++k) exact = exact && (a.w[k] == -b.w[k]);
    CHECK(exact);
    for (std::size_t i = 0; i < 4; ++i) {
      if (a.final_w[i] != 0.0) CHECK(a.signs.sigma[i] == -b.signs.sigma[i]);
    }
  }
}

TEST_CASE("recorded paths stay in [-1, 1] and freeze after absorption") {
  const auto cfg = config(1e-3, 12.0, 1e-6, true);
  const auto emb = basis(4);
  const auto inc = BrownianIncrements::generate(RngStream{2, 9, 0}, 4, cfg);
  const auto b = simulate_sticky(emb, SpeedFunction::make_xi(), cfg, inc);
  CHECK(b.times.size() == inc.steps() + 1);
  CHECK(b.w.size() == (inc.steps() + 1) * 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(b.at(0, i) == 0.0);
    for (std::size_t k = 0; k <= inc.steps(); ++k) REQUIRE(std::fabs(b.at(k, i)) <= 1.0);
    if (const auto at = b.absorbed_at[i]) {
      const double frozen = b.at(*at, i);
      CHECK(std::fabs(frozen) == 1.0);
      for (std::size_t k = *at; k <= inc.steps(); ++k) REQUIRE(b.at(k, i) == frozen);
      CHECK(std::fabs(b.at(*at - 1, i)) < 1.0 - cfg.absorb_eps);
    }
  }
  // Without recording only the endpoints are kept.
  auto quiet = cfg;
  quiet.record_paths = false;
  const auto q = simulate_sticky(emb, SpeedFunction::make_xi(), quiet, inc);
  CHECK(q.times.size() == 2);
  CHECK(q.final_w == b.final_w);
  CHECK(q.signs.sigma == b.signs.sigma);
}

TEST_CASE("a wide band absorbs on the first nonzero step") {
  const auto cfg = config(1e-3, 1.0, 0.999);
  const auto emb = basis(5);
  const auto inc = BrownianIncrements::generate(RngStream{3, 0, 0}, 5, cfg);
  const auto b = simulate_sticky(emb, SpeedFunction::make_xi(), cfg, inc);
  const auto stats = absorption_stats(b, 10);
  CHECK(stats.absorbed == 5);
  CHECK(stats.counts[0] == 5);
  for (std::size_t i = 0; i < 5; ++i) CHECK(b.absorbed_at[i] == std::optional<std::size_t>{1});
  CHECK(stats.bin_edges.size() == 11);
  CHECK(stats.bin_edges.back() == doctest::Approx(1.0));
  CHECK_THROWS_AS(absorption_stats(b, 0), std::invalid_argument);
}

TEST_CASE("absorption stats merge") {
  const auto cfg = config(0.1, 1.0, 0.5);
  const auto a = absorption_stats(simulate_sticky(
      basis(2), SpeedFunction::make_xi(), cfg,
      BrownianIncrements::from_values(2, 0.1, std::vector<double>(20, 0.0))), 4);
  auto b = absorption_stats(simulate_sticky(
      basis(2), SpeedFunction::make_xi(), cfg,
      BrownianIncrements::generate(RngStream{1, 1, 0}, 2, cfg)), 4);
  AbsorptionStats total;
  total.merge(a);
  total.merge(b);
  CHECK(total.absorbed + total.unabsorbed == 4);
  CHECK(total.frozen_values.size() == 4);
  CHECK_THROWS_AS(total.merge(absorption_stats(simulate_sticky(
                      basis(2), SpeedFunction::make_xi(), cfg,
                      BrownianIncrements::from_values(2, 0.1, std::vector<double>(20, 0.0))), 3)),
                  std::invalid_argument);
}

TEST_CASE("unabsorbed fraction at the default horizon") {
  // W tracks 1 - 2 Phi(-e^{t/2} Z); a path is still inside the band at t = 12
  // when |Z(12)| < -Phi^{-1}(eps / 2) e^{-6}, which has probability ~0.00967.
  const auto cfg = DiffusionConfig{};
  const double z_edge = -normal_quantile(cfg.absorb_eps / 2) * std::exp(-cfg.t_max / 2);
  const double expected = 2.0 * normal_cdf(z_edge / std::sqrt(1 - std::exp(-cfg.t_max))) - 1.0;
  CHECK(expected == doctest::Approx(0.00967).epsilon(0.01));

  const auto emb = basis(10);
  AbsorptionStats total;
  for (std::uint64_t r = 0; r < 1000; ++r) {
    const auto inc = BrownianIncrements::generate(RngStream{12345, r, 0}, 10, cfg);
    total.merge(absorption_stats(simulate_sticky(emb, SpeedFunction::make_xi(), cfg, inc)));
  }
  const double n = 10000.0;
  const double frac = total.fraction_unabsorbed();
  MESSAGE("unabsorbed fraction over 10^4 trajectories: " << frac);
  CHECK(std::fabs(frac - expected) < 4.0 * std::sqrt(expected * (1 - expected) / n));
  // every absorption is counted in some bin
  std::size_t binned = 0;
  for (auto c : total.counts) binned += c;
  CHECK(binned == total.absorbed);
}

TEST_CASE("martingale has no drift") {
  const auto cfg = config(1e-3, 12.0, 1e-6, true);
  const auto emb = basis(10);
  const std::size_t checkpoints[] = {1000, 3000, 12000};
  double sum[3] = {0, 0, 0}, sq[3] = {0, 0, 0};
  const std::size_t batches = 10000;
  for (std::uint64_t r = 0; r < batches; ++r) {
    const auto inc = BrownianIncrements::generate(RngStream{555, r, 0}, 10, cfg);
    const auto b = simulate_sticky(emb, SpeedFunction::make_xi(), cfg, inc);
    for (int c = 0; c < 3; ++c) {
      for (std::size_t i = 0; i < 10; ++i) {
        const double w = b.at(checkpoints[c], i);
        sum[c] += w;
        sq[c] += w * w;
      }
    }
  }
  const double n = 10.0 * batches;
  for (int c = 0; c < 3; ++c) {
    const double mean = sum[c] / n;
    const double se = std::sqrt((sq[c] / n - mean * mean) / n);
    CAPTURE(checkpoints[c]);
    CHECK(std::fabs(mean) < 4.0 * se);
  }
}

TEST_CASE("discrete engine with zero coefficient is all coins") {
  const auto emb = basis(2);
  auto zero = [](std::size_t, std::span<const double>) { return 0.0; };
  long long agree = 0;
  const int runs = 20000;
  for (int r = 0; r < runs; ++r) {
    const auto s = krivine_discrete(emb, 5, Identity{}, zero, RngStream{6, static_cast<std::uint64_t>(r), 0});
    CHECK(s.unabsorbed_count == 2);
    CHECK(s.fallback_used[0]);
    agree += s.sigma[0] * s.sigma[1];
  }
  CHECK(std::fabs(static_cast<double>(agree) / runs) < 4.0 / std::sqrt(runs));
  CHECK_THROWS_AS(krivine_discrete(emb, 0, Identity{}, zero, RngStream{}), std::invalid_argument);
}

TEST_CASE("discrete engine one-step unrolling") {
  const Embedding emb = Embedding::normalized(3, 2, {1, 0, 0, 1, 1, 1});
  auto unit = [](std::size_t t, std::span<const double> h) {
    CHECK(h.size() == t - 1);
    return 1.0;
  };
  for (std::uint64_t r = 0; r < 200; ++r) {
    const RngStream s{10, r, 0};
    const auto out = krivine_discrete(emb, 1, Identity{}, unit, s);
    const std::vector<double> g = {s.gaussian_at(0), s.gaussian_at(1)};
    const RngStream coins{10, r + kCoinStreamOffset, 0};
    for (std::size_t i = 0; i < 3; ++i) {
      const double x = dot(g, emb.row(i));
      if (std::fabs(x) >= 1.0) {
        CHECK(out.sigma[i] == (x > 0 ? 1 : -1));
        CHECK_FALSE(out.fallback_used[i]);
      } else {
        CHECK(out.sigma[i] == (coins.uniform_at(i) < 0.5 ? -1 : 1));
        CHECK(out.fallback_used[i]);
      }
    }
  }
}

TEST_CASE("discrete engine as the Euler scheme follows simulate_sticky path by path") {
  const auto cfg = DiffusionConfig{};
  const Embedding emb = Embedding::normalized(3, 2, {1, 0, 0.5, 0.8660254037844386, -0.2, 0.98});
  const auto xi_speed = SpeedFunction::make_xi();
  const auto euler = euler_as_krivine(xi_speed, cfg);
  CHECK(euler.steps == cfg.steps());
  std::size_t compared = 0, matched = 0;
  for (std::uint64_t r = 0; r < 200; ++r) {
    const RngStream s{31, r, 0};
    const auto sticky = simulate_sticky(emb, xi_speed, cfg, BrownianIncrements::generate(s, 2, cfg));
    const auto discrete = krivine_discrete(emb, euler.steps, Identity{}, euler, s);
    for (std::size_t i = 0; i < 3; ++i) {
      if (!sticky.absorbed_at[i] || discrete.fallback_used[i]) continue;
      ++compared;
      matched += sticky.signs.sigma[i] == discrete.sigma[i];
    }
  }
  CHECK(compared > 550);
  CHECK(matched == compared);
}
