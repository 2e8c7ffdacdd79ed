#ifndef KRIVINE_SPEED_HPP
#define KRIVINE_SPEED_HPP

#include <filesystem>
#include <istream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace krivine {

/// xi(s) = sqrt(2/pi) * exp(-q^2 / 2) with q = Phi^{-1}((1 - s) / 2).
/// Exactly 0 at s = +-1; throws std::domain_error outside [-1, 1].
double xi(double s);

/// (1 - s^2)^alpha for alpha > 0 and s in [-1, 1].
double power_speed(double alpha, double s);

struct XiSpeed {
  double operator()(double s) const;
};

struct PowerSpeed {
  double alpha;
  double operator()(double s) const;
};

// Piecewise-linear speed through sorted breakpoints covering [-1, 1].
struct TabulatedSpeed {
  std::vector<double> s;
  std::vector<double> value;
  double operator()(double x) const;
};

/// An admissible diffusion speed on [-1, 1]: continuous, zero at +-1 and
/// positive inside. Tabulated speeds can be built in violation of this so
/// that validate() can report the offending points.
class SpeedFunction {
 public:
  using Kind = std::variant<XiSpeed, PowerSpeed, TabulatedSpeed>;

  static SpeedFunction make_xi();
  static SpeedFunction power(double alpha);

  /// Breakpoints must be strictly increasing in s with s.front() == -1 and
  /// s.back() == 1, and values must be finite and >= 0. Zero-free interiors and
  /// zero endpoints are checked by validate(), not here.
  static SpeedFunction tabulated(std::vector<std::pair<double, double>> breakpoints);

  /// Marks a tabulated speed with nonzero endpoint values as a deliberate test
  /// override (e.g. constant 1, plain sticky Brownian motion). Such speeds are
  /// accepted by the simulators, which always absorb at the band edge.
  [[nodiscard]] SpeedFunction with_endpoint_override() const;

  double operator()(double s) const;

  [[nodiscard]] const Kind& kind() const { return kind_; }
  [[nodiscard]] bool endpoint_override() const { return endpoint_override_; }
  [[nodiscard]] std::string name() const;

  template <class Fn>
  decltype(auto) visit(Fn&& fn) const {
    return std::visit(std::forward<Fn>(fn), kind_);
  }

 private:
  explicit SpeedFunction(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
  bool endpoint_override_ = false;
};

struct ValidationReport {
  bool passed = true;
  std::vector<double> nonpositive_interior;  // grid points where phi <= 0
  std::vector<double> nonzero_endpoints;     // endpoints with phi != 0
  std::vector<double> continuity_breaks;     // left grid point of each persistent jump
  double max_jump = 0.0;                     // largest |phi(s_{k+1}) - phi(s_k)|
};

/// Checks the admissibility conditions on a uniform grid of `grid_size` points.
/// Continuity: any grid interval whose jump exceeds 1e-3 is bisected toward
/// its steeper half; a jump that does not shrink below half its size after 40
/// bisections is reported as a break. Never throws on failure; throws
/// std::invalid_argument for grid_size < 3.
ValidationReport validate(const SpeedFunction& speed, std::size_t grid_size);

/// True when the speed may drive a simulation: admissible, or an explicit
/// endpoint override whose interior is still positive.
bool usable_for_simulation(const SpeedFunction& speed);

/// Two-column text `s value`, one pair per line, '#' comments and blank lines
/// skipped, strictly increasing s spanning [-1, 1].
SpeedFunction parse_tabulated_speed(std::istream& in);
SpeedFunction load_tabulated_speed(const std::filesystem::path& path);

}  // namespace krivine

#endif  // KRIVINE_SPEED_HPP
