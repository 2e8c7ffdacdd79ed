#include "krivine/report.hpp"

#include <charconv>
#include <cmath>

#include "krivine/oracle.hpp"

namespace krivine {
namespace {

nlohmann::json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

nlohmann::json signs_json(const SignAssignment& s) {
  return {{"sigma", s.sigma},
          {"unabsorbed_count", s.unabsorbed_count},
          {"fallback_used", std::vector<bool>(s.fallback_used)}};
}

}  // namespace

std::string format_double(double x) {
  if (!std::isfinite(x)) return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

nlohmann::json to_json(const IdentityReport& report) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : report.entries) {
    entries.push_back({{"rho", e.rho},
                       {"estimate", e.estimate},
                       {"std_error", e.std_error},
                       {"replicas", e.replicas},
                       {"target", e.target},
                       {"deviation_in_se", number(e.deviation_in_se)}});
  }
  return {{"kind", "identity"},
          {"rho_grid", report.rho_grid},
          {"entries", entries},
          {"max_abs_deviation_in_se_units", number(report.max_abs_deviation_in_se_units)},
          {"within_tolerance", identity_within_tolerance(report)},
          {"speed", report.speed},
          {"engine", report.engine},
          {"step_h", report.step_h},
          {"t_max", report.t_max},
          {"absorb_eps", report.absorb_eps},
          {"z_variance_deficit", std::exp(-report.t_max)},
          {"seed", report.seed},
          {"replicas", report.replicas},
          {"unabsorbed_fraction", report.unabsorbed_fraction}};
}

nlohmann::json to_json(const CutResult& r) {
  return {{"kind", "cut"},
          {"scheme", r.scheme},
          {"trials", r.trials},
          {"best_trial", r.best_trial},
          {"signs", signs_json(r.signs)},
          {"cut_value", r.cut_value},
          {"mean_cut", r.mean_cut},
          {"mean_cut_std_error", r.mean_cut_std_error},
          {"sdp_value", r.sdp_value},
          {"expected_cut_arcsin", r.expected_cut_arcsin},
          {"ratio_vs_sdp", r.ratio_vs_sdp},
          {"exact_value", r.exact_value ? nlohmann::json(*r.exact_value) : nlohmann::json()},
          {"ratio_vs_exact", r.ratio_vs_exact ? nlohmann::json(*r.ratio_vs_exact) : nlohmann::json()},
          {"unabsorbed", r.unabsorbed},
          {"sdp_sweeps", r.sdp_sweeps},
          {"rank", r.rank},
          {"gw_constant", gw_constant()}};
}

nlohmann::json to_json(const CompareReport& report) {
  nlohmann::json schemes = nlohmann::json::array();
  for (const auto& s : report.schemes) {
    schemes.push_back(
        {{"scheme", s.scheme}, {"mean", s.mean}, {"std_error", s.std_error}, {"best", s.best}});
  }
  nlohmann::json z = nlohmann::json::array();
  for (double v : report.pairwise_z) z.push_back(number(v));
  return {{"kind", "compare"},
          {"sdp_value", report.sdp_value},
          {"expected_cut_arcsin", report.expected_cut_arcsin},
          {"replicas", report.replicas},
          {"schemes", schemes},
          {"pairwise_z", z}};
}

nlohmann::json to_json(const ExactCut& exact) {
  return {{"kind", "exact"}, {"value", exact.value}, {"sigma", exact.signs.sigma}};
}

void write_identity_csv(std::ostream& out, const IdentityReport& report) {
  out << "rho,estimate,std_error,target,deviation_in_se\n";
  for (const auto& e : report.entries) {
    out << format_double(e.rho) << ',' << format_double(e.estimate) << ','
        << format_double(e.std_error) << ',' << format_double(e.target) << ','
        << format_double(e.deviation_in_se) << '\n';
  }
}

void write_identity_svg(std::ostream& out, const IdentityReport& report) {
  constexpr double kWidth = 480, kHeight = 480, kMargin = 48;
  auto px = [&](double rho) { return kMargin + (rho + 1.0) / 2.0 * (kWidth - 2 * kMargin); };
  auto py = [&](double c) { return kHeight - kMargin - (c + 1.0) / 2.0 * (kHeight - 2 * kMargin); };
  auto f = [](double x) { return format_double(std::round(x * 100.0) / 100.0); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin
      << "\" height=\"" << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"#888\"/>\n";

  out << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
  for (int k = 0; k <= 200; ++k) {
    const double rho = -1.0 + 2.0 * k / 200.0;
    out << f(px(rho)) << ',' << f(py(arcsin_law(rho))) << (k < 200 ? " " : "");
  }
  out << "\"/>\n";

  for (const auto& e : report.entries) {
    const double x = px(e.rho);
    out << "<line x1=\"" << f(x) << "\" x2=\"" << f(x) << "\" y1=\""
        << f(py(std::fmin(1.0, e.estimate + 3 * e.std_error))) << "\" y2=\""
        << f(py(std::fmax(-1.0, e.estimate - 3 * e.std_error)))
        << "\" stroke=\"#d62728\"/>\n";
    out << "<circle cx=\"" << f(x) << "\" cy=\"" << f(py(e.estimate))
        << "\" r=\"3\" fill=\"#d62728\"/>\n";
  }
  out << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">rho = &lt;u,v&gt;</text>\n";
  out << "<text x=\"14\" y=\"" << kHeight / 2 << "\" font-size=\"13\" transform=\"rotate(-90 14 "
      << kHeight / 2 << ")\" text-anchor=\"middle\">E[sigma_u sigma_v]</text>\n";
  out << "<text x=\"" << kMargin + 8 << "\" y=\"" << kMargin + 18
      << "\" font-size=\"12\">curve: (2/pi) arcsin(rho); points: estimate +- 3 SE ("
      << report.speed << ")</text>\n";
  out << "</svg>\n";
}

}  // namespace krivine
