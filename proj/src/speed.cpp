#include "krivine/speed.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "krivine/numerics.hpp"

namespace krivine {
namespace {

void require_unit_interval(double s, const char* who) {
  if (!(s >= -1.0 && s <= 1.0)) {
    throw std::domain_error(std::string(who) + ": argument outside [-1, 1]");
  }
}

}  // namespace

double xi(double s) {
  require_unit_interval(s, "xi");
  const double a = std::fabs(s);
  if (a == 1.0) return 0.0;
  // Evaluating at |s| keeps the quantile argument in the lower tail, which is
  // exact for s near +-1 and makes xi exactly even.
  const double q = detail::lower_quantile_as241(0.5 * (1.0 - a));
  return kSqrtTwoOverPi * std::exp(-0.5 * q * q);
}

double power_speed(double alpha, double s) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("power_speed: alpha must be positive");
  }
  require_unit_interval(s, "power_speed");
  return std::pow(1.0 - s * s, alpha);
}

double XiSpeed::operator()(double s) const { return xi(s); }

double PowerSpeed::operator()(double s) const { return power_speed(alpha, s); }

double TabulatedSpeed::operator()(double x) const {
  require_unit_interval(x, "tabulated speed");
  const auto it = std::upper_bound(s.begin(), s.end(), x);
  if (it == s.end()) return value.back();
  const auto hi = static_cast<std::size_t>(it - s.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - s[lo]) / (s[hi] - s[lo]);
  return value[lo] + w * (value[hi] - value[lo]);
}

SpeedFunction SpeedFunction::make_xi() { return SpeedFunction(XiSpeed{}); }

SpeedFunction SpeedFunction::power(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("power speed: alpha must be positive");
  }
  return SpeedFunction(PowerSpeed{alpha});
}

SpeedFunction SpeedFunction::tabulated(std::vector<std::pair<double, double>> breakpoints) {
  if (breakpoints.size() < 2) {
    throw std::invalid_argument("tabulated speed: need at least two breakpoints");
  }
  TabulatedSpeed t;
  for (const auto& [s, v] : breakpoints) {
    if (!std::isfinite(s) || !std::isfinite(v)) {
      throw std::invalid_argument("tabulated speed: non-finite breakpoint");
    }
    if (v < 0.0) throw std::invalid_argument("tabulated speed: negative value");
    if (!t.s.empty() && !(s > t.s.back())) {
      throw std::invalid_argument("tabulated speed: s must be strictly increasing");
    }
    t.s.push_back(s);
    t.value.push_back(v);
  }
  if (t.s.front() != -1.0 || t.s.back() != 1.0) {
    throw std::invalid_argument("tabulated speed: breakpoints must span [-1, 1]");
  }
  return SpeedFunction(std::move(t));
}

SpeedFunction SpeedFunction::with_endpoint_override() const {
  SpeedFunction copy = *this;
  copy.endpoint_override_ = true;
  return copy;
}

double SpeedFunction::operator()(double s) const {
  return std::visit([s](const auto& phi) { return phi(s); }, kind_);
}

std::string SpeedFunction::name() const {
  struct Namer {
    std::string operator()(const XiSpeed&) const { return "xi"; }
    std::string operator()(const PowerSpeed& p) const {
      std::ostringstream os;
      os << "power:" << p.alpha;
      return os.str();
    }
    std::string operator()(const TabulatedSpeed&) const { return "tabulated"; }
  };
  return std::visit(Namer{}, kind_);
}

ValidationReport validate(const SpeedFunction& speed, std::size_t grid_size) {
  if (grid_size < 3) throw std::invalid_argument("validate: grid_size must be >= 3");
  ValidationReport report;
  const double spacing = 2.0 / static_cast<double>(grid_size - 1);
  auto grid = [&](std::size_t k) {
    if (k == 0) return -1.0;
    if (k + 1 == grid_size) return 1.0;
    return -1.0 + spacing * static_cast<double>(k);
  };

  for (const double end : {-1.0, 1.0}) {
    if (speed(end) != 0.0) report.nonzero_endpoints.push_back(end);
  }

  double prev = speed(-1.0);
  for (std::size_t k = 1; k < grid_size; ++k) {
    const double s = grid(k);
    const double cur = speed(s);
    if (k + 1 < grid_size && !(cur > 0.0)) report.nonpositive_interior.push_back(s);

    const double jump = std::fabs(cur - prev);
    report.max_jump = std::max(report.max_jump, jump);
    if (jump > 1e-3) {
      double a = grid(k - 1), b = s;
      double fa = prev, fb = cur;
      for (int it = 0; it < 40; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = speed(m);
        if (std::fabs(fm - fa) >= std::fabs(fb - fm)) {
          b = m;
          fb = fm;
        } else {
          a = m;
          fa = fm;
        }
      }
      if (std::fabs(fb - fa) > 0.5 * jump) report.continuity_breaks.push_back(grid(k - 1));
    }
    prev = cur;
  }

  report.passed = report.nonpositive_interior.empty() && report.nonzero_endpoints.empty() &&
                  report.continuity_breaks.empty();
  return report;
}

bool usable_for_simulation(const SpeedFunction& speed) {
  const auto* table = std::get_if<TabulatedSpeed>(&speed.kind());
  if (table == nullptr) return true;
  const auto& v = table->value;
  for (std::size_t k = 1; k + 1 < v.size(); ++k) {
    if (!(v[k] > 0.0)) return false;
  }
  for (std::size_t k = 0; k + 1 < v.size(); ++k) {
    if (!(std::max(v[k], v[k + 1]) > 0.0)) return false;
  }
  return speed.endpoint_override() || (v.front() == 0.0 && v.back() == 0.0);
}

SpeedFunction parse_tabulated_speed(std::istream& in) {
  std::vector<std::pair<double, double>> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double s = 0.0, v = 0.0;
    if (!(row >> s)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw std::invalid_argument("speed table line " + std::to_string(line_no) +
                                  ": expected `s value`");
    }
    std::string extra;
    if (!(row >> v) || (row >> extra)) {
      throw std::invalid_argument("speed table line " + std::to_string(line_no) +
                                  ": expected exactly two columns");
    }
    points.emplace_back(s, v);
  }
  return SpeedFunction::tabulated(std::move(points));
}

SpeedFunction load_tabulated_speed(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open speed table " + path.string());
  return parse_tabulated_speed(in);
}

}  // namespace krivine
