#include "krivine/embedding.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace krivine {

Embedding::Embedding(std::size_t n, std::size_t d, std::vector<double> values)
    : n_(n), d_(d), values_(std::move(values)) {
  if (d_ == 0) throw std::invalid_argument("embedding: dimension must be positive");
  if (values_.size() != n_ * d_) {
    throw std::invalid_argument("embedding: expected n * d values");
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const auto r = row(i);
    const double norm = std::sqrt(dot(r, r));
    if (!(std::fabs(norm - 1.0) <= kUnitNormTolerance)) {
      throw std::invalid_argument("embedding: row " + std::to_string(i) + " is not a unit vector");
    }
  }
}

Embedding Embedding::normalized(std::size_t n, std::size_t d, std::vector<double> values) {
  if (d == 0 || values.size() != n * d) {
    throw std::invalid_argument("embedding: expected n * d values");
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::span<double> r(values.data() + i * d, d);
    const double norm = std::sqrt(dot(r, r));
    if (!(norm > 0.0) || !std::isfinite(norm)) {
      throw std::invalid_argument("embedding: cannot normalize row " + std::to_string(i));
    }
    for (double& x : r) x /= norm;
  }
  return Embedding(n, d, std::move(values));
}

Embedding Embedding::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw std::invalid_argument("embedding: no rows");
  const std::size_t d = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw std::invalid_argument("embedding: ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Embedding(rows.size(), d, std::move(flat));
}

double Embedding::inner(std::size_t i, std::size_t j) const { return dot(row(i), row(j)); }

}  // namespace krivine
