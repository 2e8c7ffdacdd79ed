#ifndef KRIVINE_ORACLE_HPP
#define KRIVINE_ORACLE_HPP

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "krivine/diffusion.hpp"
#include "krivine/embedding.hpp"

namespace krivine {

// Discounted Gaussian integral Z_u(t) = int_0^t e^{-s/2} <u, dB(s)>, sampled
// on the same grid layout as TrajectoryBatch.
struct ZPath {
  std::size_t n = 0;
  std::vector<double> times;
  std::vector<double> z;  // times.size() x n

  [[nodiscard]] double at(std::size_t k, std::size_t i) const { return z[k * n + i]; }
  [[nodiscard]] std::span<const double> final_values() const {
    return {z.data() + (times.size() - 1) * n, n};
  }
};

// m_u(t) = 1 - 2 Phi(-e^{t/2} z_u(t)) = E[sign Z_u(inf) | F_t].
struct MartingalePath {
  std::size_t n = 0;
  std::vector<double> times;
  std::vector<double> m;

  [[nodiscard]] double at(std::size_t k, std::size_t i) const { return m[k * n + i]; }
};

/// Left-endpoint Euler: Z(t_{k+1}) = Z(t_k) + e^{-t_k/2} <u, dB_k>. Records
/// every step when cfg.record_paths, otherwise t = 0 and the final time.
ZPath simulate_z(const Embedding& emb, const DiffusionConfig& cfg,
                 const BrownianIncrements& increments);

/// Pointwise closed form. Saturates to exactly +-1 once e^{t/2} |z| exceeds
/// about 38, where Phi underflows in double precision.
MartingalePath closed_form_m(const ZPath& z);

/// sign(<u_i, g>), with an exact zero mapped to +1.
SignAssignment hyperplane_round(const Embedding& emb, std::span<const double> g);

/// (2 / pi) arcsin(rho). Throws std::domain_error for |rho| > 1.
double arcsin_law(double rho);

/// Clamps an inner product that overshoots [-1, 1] by at most `tolerance`;
/// larger overshoots throw std::domain_error.
double clamp_inner_product(double rho, double tolerance = 1e-9);

struct CorrelationEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t replicas = 0;
};

/// Sample mean of sigma_u * sigma_v with standard error sqrt((1 - mean^2) / N).
/// Throws std::invalid_argument for fewer than two replicas.
CorrelationEstimate pair_correlation(std::span<const std::pair<int, int>> pairs);

/// Same estimate from the sum of the N sign products.
CorrelationEstimate pair_correlation_from_sum(long long product_sum, std::size_t replicas);

}  // namespace krivine

#endif  // KRIVINE_ORACLE_HPP
