#include "cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "krivine/graph.hpp"
#include "krivine/pipeline.hpp"
#include "krivine/report.hpp"
#include "krivine/sdp.hpp"

namespace krivine::cli {
namespace {

namespace fs = std::filesystem;

const std::vector<double> kDefaultRhoGrid = {-0.95, -0.5, 0.0, 0.3, 0.5, 0.7071, 0.95};

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (item.find_first_not_of(" \t", used) != std::string::npos) {
      throw std::invalid_argument("bad list entry `" + item + "`");
    }
    values.push_back(v);
  }
  if (values.empty()) throw std::invalid_argument("empty list");
  return values;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) parts.push_back(item);
  }
  return parts;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << content;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

struct DiffusionFlags {
  double h = 1e-3;
  double tmax = 12.0;
  double eps = 1e-6;

  void attach(CLI::App* app) {
    app->add_option("--h", h, "Euler time step")->capture_default_str();
    app->add_option("--tmax", tmax, "simulation horizon")->capture_default_str();
    app->add_option("--eps", eps, "absorption band half-width")->capture_default_str();
  }
  [[nodiscard]] DiffusionConfig config() const {
    DiffusionConfig c;
    c.step_h = h;
    c.t_max = tmax;
    c.absorb_eps = eps;
    c.check();
    return c;
  }
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sticky-diffusion rounding for MAXCUT"};
  app.require_subcommand(1);
  // -h would collide with the step flag --h
  app.set_help_flag("--help", "print this help message and exit");

  std::uint64_t seed = 1;
  std::size_t workers = 1;
  std::string out_dir = ".";
  bool check = false;
  std::string graph_path;
  std::size_t rank = 0;
  DiffusionFlags diff;

  auto common = [&](CLI::App* sub, bool with_seed) {
    if (with_seed) sub->add_option("--seed", seed, "master seed")->capture_default_str();
    sub->add_option("--workers", workers, "worker threads (output is independent of this)")
        ->capture_default_str();
    sub->add_option("--out", out_dir, "directory for report files")->capture_default_str();
  };

  // verify-identity
  auto* verify = app.add_subcommand("verify-identity", "estimate E[sigma_u sigma_v] on a rho grid");
  std::string rho_grid_text;
  std::size_t replicas = 200000;
  std::string speed_text = "xi";
  std::string engine_text = "sticky";
  bool svg = false;
  verify->add_option("--rho-grid", rho_grid_text, "comma-separated inner products");
  verify->add_option("--replicas", replicas, "coupled trajectories per grid point")
      ->capture_default_str();
  verify->add_option("--scheme", speed_text, "xi | power:<alpha> | table:<file>")
      ->capture_default_str();
  verify->add_option("--engine", engine_text, "sticky | krivine")->capture_default_str();
  verify->add_flag("--svg", svg, "also write identity.svg");
  verify->add_flag("--check", check, "exit 1 unless every point is within max(3 SE, 0.01)");
  diff.attach(verify);
  common(verify, true);

  // solve
  auto* solve = app.add_subcommand("solve", "solve the low-rank MAXCUT relaxation");
  std::size_t max_sweeps = 10000;
  double tol = 1e-9;
  solve->add_option("--graph", graph_path, "edge list file")->required();
  solve->add_option("--rank", rank, "factorization rank (0 = max(2, ceil(sqrt(2n))))")
      ->capture_default_str();
  solve->add_option("--max-sweeps", max_sweeps)->capture_default_str();
  solve->add_option("--tol", tol)->capture_default_str();
  common(solve, true);

  // round
  auto* round = app.add_subcommand("round", "solve, round and report the best cut");
  std::string scheme_text = "xi";
  std::size_t trials = 100;
  round->add_option("--graph", graph_path, "edge list file")->required();
  round->add_option("--scheme", scheme_text, "xi | power:<alpha> | hyperplane | table:<file>")
      ->capture_default_str();
  round->add_option("--trials", trials)->capture_default_str();
  round->add_option("--rank", rank)->capture_default_str();
  round->add_flag("--check", check, "exit 1 unless mean cut >= (alpha_GW - 0.01) * SDP value");
  diff.attach(round);
  common(round, true);

  // compare
  auto* compare = app.add_subcommand("compare", "compare mean cuts of several schemes");
  std::string schemes_text = "xi,hyperplane";
  std::size_t compare_replicas = 2000;
  compare->add_option("--graph", graph_path, "edge list file")->required();
  compare->add_option("--schemes", schemes_text, "comma-separated schemes")->capture_default_str();
  compare->add_option("--replicas", compare_replicas)->capture_default_str();
  compare->add_option("--rank", rank)->capture_default_str();
  compare->add_flag("--check", check, "exit 1 if any pair differs by more than 3 combined SE");
  diff.attach(compare);
  common(compare, true);

  // exact
  auto* exact = app.add_subcommand("exact", "brute-force maximum cut (n <= 24)");
  exact->add_option("--graph", graph_path, "edge list file")->required();
  common(exact, false);

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    PipelineConfig pcfg;
    pcfg.workers = workers;
    pcfg.sdp.rank_r = rank;

    if (verify->parsed()) {
      IdentityOptions opts;
      opts.workers = workers;
      opts.engine = engine_text == "krivine" ? Engine::KrivineEuler : Engine::Sticky;
      if (engine_text != "krivine" && engine_text != "sticky") {
        throw std::invalid_argument("unknown engine `" + engine_text + "`");
      }
      const RoundingScheme scheme = parse_scheme(speed_text);
      if (!scheme.speed) throw std::invalid_argument("verify-identity needs a diffusion speed");
      opts.speed = *scheme.speed;
      const auto grid = rho_grid_text.empty() ? kDefaultRhoGrid : parse_list(rho_grid_text);
      const auto report = verify_identity(grid, replicas, diff.config(), seed, opts);

      write_file(dir / "report.json", dump(to_json(report)));
      std::ostringstream csv;
      write_identity_csv(csv, report);
      write_file(dir / "identity.csv", csv.str());
      if (svg) {
        std::ostringstream s;
        write_identity_svg(s, report);
        write_file(dir / "identity.svg", s.str());
      }
      out << csv.str();
      const bool ok = identity_within_tolerance(report);
      out << "max deviation: " << format_double(report.max_abs_deviation_in_se_units)
          << " SE; " << (ok ? "within" : "OUTSIDE") << " tolerance\n";
      return check && !ok ? 1 : 0;
    }

    const WeightedGraph g = load_edge_list(graph_path);

    if (solve->parsed()) {
      SdpConfig cfg;
      cfg.rank_r = rank;
      cfg.max_sweeps = max_sweeps;
      cfg.tol = tol;
      cfg.init_seed = seed;
      SdpTrace trace;
      const Embedding emb = solve_maxcut_sdp(g, cfg, &trace);
      nlohmann::json rows = nlohmann::json::array();
      for (std::size_t i = 0; i < emb.size(); ++i) {
        rows.push_back(std::vector<double>(emb.row(i).begin(), emb.row(i).end()));
      }
      const double obj = sdp_objective(g, emb);
      const nlohmann::json j = {{"kind", "sdp"},
                                {"objective", obj},
                                {"rank", emb.dim()},
                                {"sweeps", trace.sweeps},
                                {"converged", trace.converged},
                                {"expected_cut_arcsin", expected_cut_arcsin(g, emb)},
                                {"embedding", rows}};
      write_file(dir / "report.json", dump(j));
      out << "sdp objective " << format_double(obj) << " (rank " << emb.dim() << ", "
          << trace.sweeps << " sweeps)\n";
      return 0;
    }

    if (round->parsed()) {
      pcfg.diffusion = diff.config();
      const auto result = run_pipeline(g, parse_scheme(scheme_text), trials, pcfg, seed);
      write_file(dir / "report.json", dump(to_json(result)));
      out << "best cut " << format_double(result.cut_value) << ", mean "
          << format_double(result.mean_cut) << " +- " << format_double(result.mean_cut_std_error)
          << ", sdp " << format_double(result.sdp_value) << ", arcsin expectation "
          << format_double(result.expected_cut_arcsin) << "\n";
      const bool ok = result.mean_cut >= (gw_constant() - 0.01) * result.sdp_value;
      return check && !ok ? 1 : 0;
    }

    if (compare->parsed()) {
      pcfg.diffusion = diff.config();
      std::vector<RoundingScheme> schemes;
      for (const auto& s : split(schemes_text)) schemes.push_back(parse_scheme(s));
      const auto report = compare_schemes(g, schemes, compare_replicas, pcfg, seed);
      write_file(dir / "report.json", dump(to_json(report)));
      bool ok = true;
      for (const auto& s : report.schemes) {
        out << s.scheme << ": mean " << format_double(s.mean) << " +- "
            << format_double(s.std_error) << ", best " << format_double(s.best) << "\n";
      }
      for (double z : report.pairwise_z) ok = ok && z <= 3.0;
      out << "arcsin expectation " << format_double(report.expected_cut_arcsin) << "\n";
      return check && !ok ? 1 : 0;
    }

    if (exact->parsed()) {
      const auto best = brute_force_maxcut(g);
      write_file(dir / "report.json", dump(to_json(best)));
      out << "max cut " << format_double(best.value) << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace krivine::cli
