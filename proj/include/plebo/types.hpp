#pragma once

#include <cmath>

namespace plebo {

// One task's RBF kernel hyperparameters. The noise variance is fixed per run
// rather than learned; it rides along so every consumer sees the same value.
struct HyperParams {
  double lengthscale = 1.0;
  double signal_variance = 1.0;
  double noise_variance = 1e-4;

  bool valid() const {
    return std::isfinite(lengthscale) && lengthscale > 0.0 &&
           std::isfinite(signal_variance) && signal_variance > 0.0 &&
           std::isfinite(noise_variance) && noise_variance >= 0.0;
  }
};

// Gamma shape/scale pairs generating per-task lengthscale and signal
// variance.
struct HyperPrior {
  double l_shape = 1.0;
  double l_scale = 1.0;
  double v_shape = 1.0;
  double v_scale = 1.0;

  bool valid() const {
    return std::isfinite(l_shape) && l_shape > 0.0 && std::isfinite(l_scale) &&
           l_scale > 0.0 && std::isfinite(v_shape) && v_shape > 0.0 &&
           std::isfinite(v_scale) && v_scale > 0.0;
  }

  double lengthscale_mean() const { return l_shape * l_scale; }
  double variance_mean() const { return v_shape * v_scale; }
};

}  // namespace plebo
