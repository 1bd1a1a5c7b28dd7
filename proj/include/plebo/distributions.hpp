#pragma once

#include <cmath>

#include "plebo/errors.hpp"

namespace plebo {

inline constexpr double kLogTwoPi = 1.8378770664093454836;

// log Gamma(x; shape, scale) density, shape/scale parameterisation.
inline double gamma_logpdf(double x, double shape, double scale) {
  if (!(x > 0.0)) throw DomainError("gamma_logpdf: x must be positive");
  return (shape - 1.0) * std::log(x) - x / scale - shape * std::log(scale) -
         std::lgamma(shape);
}

// log LogNormal(x; mu, sigma) density on the natural-space value x.
inline double lognormal_logpdf(double x, double mu, double sigma) {
  if (!(x > 0.0)) throw DomainError("lognormal_logpdf: x must be positive");
  const double z = (std::log(x) - mu) / sigma;
  return -std::log(x) - std::log(sigma) - 0.5 * kLogTwoPi - 0.5 * z * z;
}

inline double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
}

inline double normal_cdf(double z) {
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

}  // namespace plebo
