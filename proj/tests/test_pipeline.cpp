#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "krivine/numerics.hpp"
#include "krivine/pipeline.hpp"
#include "krivine/report.hpp"

using namespace krivine;

namespace {

SignAssignment signs(std::vector<int> s) {
  SignAssignment a;
  a.fallback_used.assign(s.size(), false);
  a.sigma = std::move(s);
  return a;
}

DiffusionConfig coarse() {
  DiffusionConfig c;
  c.step_h = 1e-2;
  c.t_max = 12.0;
  return c;
}

}  // namespace

TEST_CASE("cut value") {
  const auto c5 = cycle_graph(5);
  CHECK(cut_value(c5, signs({1, 1, 1, 1, 1})) == 0.0);
  CHECK(cut_value(WeightedGraph(2, {{0, 1, 2.5}}), signs({1, -1})) == 2.5);
  CHECK(cut_value(c5, signs({1, -1, 1, -1, 1})) == 4.0);
  CHECK_THROWS_AS(cut_value(c5, signs({1, -1})), std::invalid_argument);
}

TEST_CASE("brute force maximum cut") {
  CHECK(brute_force_maxcut(WeightedGraph(2, {{0, 1, 1.5}})).value == 1.5);
  const auto k3 = brute_force_maxcut(complete_graph(3));
  CHECK(k3.value == 2.0);
  // first optimal pattern in (+ before -) order with vertex 0 fixed to +
  CHECK(k3.signs.sigma == std::vector<int>{1, 1, -1});
  const auto c5 = brute_force_maxcut(cycle_graph(5));
  CHECK(c5.value == 4.0);
  CHECK(cut_value(cycle_graph(5), c5.signs) == 4.0);
  CHECK(c5.signs.sigma[0] == 1);
  CHECK(brute_force_maxcut(complete_graph(6)).value == 9.0);
  CHECK_THROWS_AS(brute_force_maxcut(cycle_graph(25)), std::invalid_argument);
}

TEST_CASE("expected cut under the arcsin law") {
  const WeightedGraph g(2, {{0, 1, 2.0}});
  CHECK(expected_cut_arcsin(g, Embedding(2, 2, {1, 0, -1, 0})) == doctest::Approx(2.0));
  CHECK(expected_cut_arcsin(g, Embedding(2, 2, {1, 0, 0, 1})) == doctest::Approx(1.0));
  CHECK(expected_cut_arcsin(g, Embedding(2, 2, {1, 0, 0.5, std::sqrt(0.75)})) ==
        doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(expected_cut_arcsin(g, Embedding(1, 1, {1.0})), std::invalid_argument);
}

TEST_CASE("gw constant against a fine grid") {
  const int points = 10000000;
  double best = 10.0, arg = 0.0;
  for (int k = 1; k <= points; ++k) {
    const double theta = kPi * k / points;
    const double r = (2 * theta / kPi) / (1 - std::cos(theta));
    if (r < best) {
      best = r;
      arg = theta;
    }
  }
  const auto gw = gw_minimizer();
  CHECK(std::fabs(gw.ratio - best) < 1e-6);
  CHECK(std::fabs(gw.ratio - 0.8785672) < 1e-6);
  CHECK(std::fabs(gw.theta - arg) < 1e-4);
  CHECK(std::fabs(gw.theta - 2.3311) < 1e-4);
  CHECK(gw_constant() == gw.ratio);
  // at theta = pi the ratio is exactly 1
  CHECK((2 * kPi / kPi) / (1 - std::cos(kPi)) == 1.0);
}

TEST_CASE("scheme parsing") {
  CHECK(parse_scheme("xi").label == "xi");
  CHECK(parse_scheme("xi").kind == RoundingScheme::Kind::Diffusion);
  CHECK(parse_scheme("hyperplane").kind == RoundingScheme::Kind::Hyperplane);
  CHECK_FALSE(parse_scheme("hyperplane").speed.has_value());
  const auto p = parse_scheme("power:2");
  CHECK(p.label == "power:2");
  CHECK((*p.speed)(0.5) == doctest::Approx(0.5625));
  CHECK_THROWS_AS(parse_scheme("power:"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scheme("power:2x"), std::invalid_argument);
  CHECK_THROWS_AS(parse_scheme("power:-1"), std::domain_error);
  CHECK_THROWS_AS(parse_scheme("gaussian"), std::invalid_argument);
  CHECK_THROWS(parse_scheme("table:/nonexistent"));
}

TEST_CASE("single edge rounds to a full cut") {
  const WeightedGraph g(2, {{0, 1, 1.0}});
  for (const char* s : {"xi", "hyperplane", "power:1"}) {
    const auto r = run_pipeline(g, parse_scheme(s), 8, PipelineConfig{}, 3);
    CHECK(r.cut_value == 1.0);
    CHECK(r.ratio_vs_sdp == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(r.trials == 8);
    CHECK(r.scheme == s);
  }
}

TEST_CASE("five-cycle pipeline") {
  const auto c5 = cycle_graph(5);
  const auto h = run_pipeline(c5, RoundingScheme::hyperplane(), 200, PipelineConfig{}, 11);
  CHECK(h.cut_value == 4.0);
  REQUIRE(h.exact_value.has_value());
  CHECK(*h.exact_value == 4.0);
  CHECK(*h.ratio_vs_exact == 1.0);
  CHECK(std::fabs(h.sdp_value - 4.5225424859) < 1e-4);
  CHECK(h.cut_value <= *h.exact_value);
  CHECK(*h.exact_value <= h.sdp_value);
  CHECK(h.ratio_vs_sdp == doctest::Approx(h.cut_value / h.sdp_value));

  PipelineConfig cfg;
  cfg.diffusion = coarse();
  const auto x = run_pipeline(c5, parse_scheme("xi"), 200, cfg, 11);
  CHECK(x.cut_value == 4.0);
  // the optimal embedding is planar, so every sign pattern it induces cuts 4 edges
  CHECK(x.expected_cut_arcsin == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(std::fabs(x.mean_cut - x.expected_cut_arcsin) <= std::fmax(3.0 * x.mean_cut_std_error, 1e-6));
  CHECK(x.cut_value >= 0.0);
  CHECK(x.cut_value <= c5.total_weight());
}

TEST_CASE("trial results do not depend on the worker count") {
  const auto g = random_graph(9, 0.5, 2);
  const auto emb = solve_maxcut_sdp(g, SdpConfig{});
  for (const char* s : {"xi", "hyperplane"}) {
    const auto a = run_trials(g, emb, parse_scheme(s), coarse(), 5, 40, 1);
    const auto b = run_trials(g, emb, parse_scheme(s), coarse(), 5, 40, 3);
    CHECK(a.cuts == b.cuts);
    CHECK(a.best_trial == b.best_trial);
    CHECK(a.best_signs.sigma == b.best_signs.sigma);
  }
  CHECK_THROWS_AS(run_trials(g, emb, parse_scheme("xi"), coarse(), 5, 0, 1), std::invalid_argument);
}

TEST_CASE("mean diffusion cut is the arcsin expectation") {
  const auto g = complete_graph(5);
  const auto emb = solve_maxcut_sdp(g, SdpConfig{});
  const auto s = run_trials(g, emb, parse_scheme("xi"), DiffusionConfig{}, 77, 10000, 1);
  CHECK(s.std_error > 0.0);
  CHECK(std::fabs(s.mean - expected_cut_arcsin(g, emb)) <= 3.0 * s.std_error);
  CHECK(s.mean >= (gw_constant() - 0.01) * sdp_objective(g, emb));
}

TEST_CASE("identity at the endpoints is exact") {
  const auto r = verify_identity({1.0, -1.0}, 1000, coarse(), 4);
  CHECK(r.entries[0].estimate == 1.0);
  CHECK(r.entries[1].estimate == -1.0);
  CHECK(r.entries[0].deviation_in_se == 0.0);
  CHECK(r.max_abs_deviation_in_se_units == 0.0);
  CHECK(identity_within_tolerance(r));
  CHECK(r.replicas == 1000);
  CHECK(r.speed == "xi");
  CHECK(r.engine == "sticky");
}

TEST_CASE("identity argument checks") {
  CHECK_THROWS_AS(verify_identity({0.5}, 999, coarse(), 1), std::invalid_argument);
  CHECK_THROWS_AS(verify_identity({1.5}, 1000, coarse(), 1), std::domain_error);
  CHECK_THROWS_AS(verify_identity({}, 1000, coarse(), 1), std::invalid_argument);
  IdentityOptions bad;
  bad.speed = SpeedFunction::tabulated({{-1, 1}, {1, 1}});
  CHECK_THROWS_AS(verify_identity({0.5}, 1000, coarse(), 1, bad), std::invalid_argument);
}

TEST_CASE("identity report is worker independent and within tolerance at small scale") {
  IdentityOptions one, two;
  two.workers = 2;
  const auto a = verify_identity({-0.5, 0.3}, 2000, coarse(), 12, one);
  const auto b = verify_identity({-0.5, 0.3}, 2000, coarse(), 12, two);
  CHECK(to_json(a).dump() == to_json(b).dump());
  CHECK(identity_within_tolerance(a));
  for (const auto& e : a.entries) CHECK(e.std_error == doctest::Approx(std::sqrt((1 - e.estimate * e.estimate) / 2000)));

  IdentityOptions k;
  k.engine = Engine::KrivineEuler;
  const auto d = verify_identity({-0.5, 0.3}, 2000, coarse(), 12, k);
  CHECK(d.engine == "krivine-euler");
  CHECK(identity_within_tolerance(d));
}

TEST_CASE("scheme comparison") {
  PipelineConfig cfg;
  cfg.diffusion = coarse();
  const auto r = compare_schemes(cycle_graph(5), {parse_scheme("xi"), RoundingScheme::hyperplane()},
                                 500, cfg, 3);
  REQUIRE(r.schemes.size() == 2);
  REQUIRE(r.pairwise_z.size() == 1);
  const double z = std::fabs(r.schemes[0].mean - r.schemes[1].mean) /
                   std::hypot(r.schemes[0].std_error, r.schemes[1].std_error);
  CHECK(r.pairwise_z[0] == doctest::Approx(z));
  CHECK(r.pairwise_z[0] <= 3.0);
  CHECK_THROWS_AS(compare_schemes(cycle_graph(5), {}, 10, cfg, 3), std::invalid_argument);
}

TEST_CASE("report formats") {
  const auto r = verify_identity({0.5, 1.0}, 1000, coarse(), 4);
  std::ostringstream csv;
  write_identity_csv(csv, r);
  const std::string text = csv.str();
  CHECK(text.rfind("rho,estimate,std_error,target,deviation_in_se\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 3);
  std::ostringstream svg;
  write_identity_svg(svg, r);
  CHECK(svg.str().find("<svg") == 0);
  CHECK(svg.str().find("</svg>") != std::string::npos);

  const auto j = to_json(r);
  CHECK(j["kind"] == "identity");
  CHECK(j["entries"].size() == 2);
  CHECK(j["z_variance_deficit"].get<double>() == doctest::Approx(std::exp(-12.0)));

  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
  CHECK(format_double(INFINITY) == "inf");

  IdentityReport inf = r;
  inf.entries[0].deviation_in_se = INFINITY;
  CHECK(to_json(inf)["entries"][0]["deviation_in_se"].is_null());
}
