#ifndef KRIVINE_EMBEDDING_HPP
#define KRIVINE_EMBEDDING_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace krivine {

inline constexpr double kUnitNormTolerance = 1e-9;

/// n unit vectors in R^d, stored row-major.
class Embedding {
 public:
  Embedding() = default;

  /// Throws std::invalid_argument unless values.size() == n * d and every row
  /// has Euclidean norm within kUnitNormTolerance of 1.
  Embedding(std::size_t n, std::size_t d, std::vector<double> values);

  /// Normalizes each row first; throws on a zero row.
  static Embedding normalized(std::size_t n, std::size_t d, std::vector<double> values);

  static Embedding from_rows(const std::vector<std::vector<double>>& rows);

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] std::size_t dim() const { return d_; }

  [[nodiscard]] std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * d_, d_};
  }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }

  [[nodiscard]] double inner(std::size_t i, std::size_t j) const;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> values_;
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

}  // namespace krivine

#endif  // KRIVINE_EMBEDDING_HPP
