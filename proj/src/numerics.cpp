#include "krivine/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace krivine {
namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;
constexpr double kSqrtTwoPi = 2.50662827463100050242;

// Horner evaluation, coefficients ordered from highest degree down.
template <std::size_t N>
double horner(double x, const std::array<double, N>& c) {
  double acc = 0.0;
  for (double v : c) acc = acc * x + v;
  return acc;
}

// AS241 (PPND16). Central region |p - 0.5| <= 0.425.
constexpr std::array<double, 8> kCentralNum = {
    2.5090809287301226727e+3, 3.3430575583588128105e+4, 6.7265770927008700853e+4,
    4.5921953931549871457e+4, 1.3731693765509461125e+4, 1.9715909503065514427e+3,
    1.3314166789178437745e+2, 3.3871328727963666080e+0};
constexpr std::array<double, 8> kCentralDen = {
    5.2264952788528545610e+3, 2.8729085735721942674e+4, 3.9307895800092710610e+4,
    2.1213794301586595867e+4, 5.3941960214247511077e+3, 6.8718700749205790830e+2,
    4.2313330701600911252e+1, 1.0};

// Intermediate tail, sqrt(-log p) <= 5.
constexpr std::array<double, 8> kNearNum = {
    7.74545014278341407640e-4, 2.27238449892691845833e-2, 2.41780725177450611770e-1,
    1.27045825245236838258e+0, 3.64784832476320460504e+0, 5.76949722146069140550e+0,
    4.63033784615654529590e+0, 1.42343711074968357734e+0};
constexpr std::array<double, 8> kNearDen = {
    1.05075007164441684324e-9, 5.47593808499534494600e-4, 1.51986665636164571966e-2,
    1.48103976427480074590e-1, 6.89767334985100004550e-1, 1.67638483018380384940e+0,
    2.05319162663775882187e+0, 1.0};

// Far tail.
constexpr std::array<double, 8> kFarNum = {
    2.01033439929228813265e-7, 2.71155556874348757815e-5, 1.24266094738807843860e-3,
    2.65321895265761230930e-2, 2.96560571828504891230e-1, 1.78482653991729133580e+0,
    5.46378491116411436990e+0, 6.65790464350110377720e+0};
constexpr std::array<double, 8> kFarDen = {
    2.04426310338993978564e-15, 1.42151175831644588870e-7, 1.84631831751005468180e-5,
    7.86869131145613259100e-4, 1.48753612908506148525e-2, 1.36929880922735805310e-1,
    5.99832206555887937690e-1, 1.0};

}  // namespace

double detail::lower_quantile_as241(double p) {
  double x;
  const double q = p - 0.5;
  if (q >= -0.425) {
    const double r = 0.180625 - q * q;
    x = q * horner(r, kCentralNum) / horner(r, kCentralDen);
  } else {
    double r = std::sqrt(-std::log(p));
    if (r <= 5.0) {
      r -= 1.6;
      x = -horner(r, kNearNum) / horner(r, kNearDen);
    } else {
      r -= 5.0;
      x = -horner(r, kFarNum) / horner(r, kFarDen);
    }
  }
  return x;
}

namespace {

// Quantile of a lower-tail probability p in (0, 0.5]; result <= 0.
double lower_quantile(double p) {
  const double x = detail::lower_quantile_as241(p);
  // Halley step on Phi(x) - p. The lower tail keeps erfc in its accurate range.
  const double err = 0.5 * std::erfc(-x * kSqrtHalf) - p;
  const double u = err * kSqrtTwoPi * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

// Philox4x32 round constants.
constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

double normal_cdf(double x) {
  if (!std::isfinite(x)) throw std::domain_error("normal_cdf: non-finite argument");
  return 0.5 * std::erfc(-x * kSqrtHalf);
}

double normal_pdf(double x) { return kInvSqrtTwoPi * std::exp(-0.5 * x * x); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("normal_quantile: probability must lie in (0, 1)");
  }
  if (p <= 0.5) return lower_quantile(p);
  return -lower_quantile(1.0 - p);
}

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kPhiloxM0} * c[0];
    const std::uint64_t p1 = std::uint64_t{kPhiloxM1} * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  return c;
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag) {
  return splitmix64(master_seed ^ splitmix64(tag));
}

namespace {

// 52 bits keep (bits + 0.5) / 2^52 exactly representable and strictly below 1.
double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (std::uint64_t{hi} << 32 | lo) >> 12;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

double uniform_to_gaussian(double u) {
  return u <= 0.5 ? detail::lower_quantile_as241(u) : -detail::lower_quantile_as241(1.0 - u);
}

}  // namespace

std::array<double, 2> RngStream::uniform_pair_at(std::uint64_t block) const {
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
       static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)},
      {static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)});
  return {to_open_unit(out[0], out[1]), to_open_unit(out[2], out[3])};
}

double RngStream::uniform_at(std::uint64_t index) const {
  return uniform_pair_at(index >> 1)[index & 1];
}

double RngStream::gaussian_at(std::uint64_t index) const {
  return uniform_to_gaussian(uniform_at(index));
}

std::array<double, 2> RngStream::gaussian_pair_at(std::uint64_t block) const {
  const auto u = uniform_pair_at(block);
  return {uniform_to_gaussian(u[0]), uniform_to_gaussian(u[1])};
}

double sample_gaussian(RngStream& stream) { return stream.next_gaussian(); }

}  // namespace krivine
