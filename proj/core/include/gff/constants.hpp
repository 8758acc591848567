#pragma once

#include <cmath>
#include <numbers>

namespace gff {

// Model constants for the square-lattice free field in two dimensions.
inline constexpr double k_pi = std::numbers::pi;
inline constexpr double k_euler_gamma = 0.57721566490153286060651209008240243;

// Effective coupling g = 2/pi; sqrt(g) sets the scale of extreme levels.
inline constexpr double k_g = 2.0 / k_pi;
inline const double k_sqrt_g = std::sqrt(k_g);

// Critical inverse temperature beta_c = sqrt(2*pi) = 2/sqrt(g).
inline const double k_beta_c = std::sqrt(2.0 * k_pi);

// Constant term of the potential-kernel asymptotics: (2*gamma + log 8)/pi.
inline const double k_kernel_const = (2.0 * k_euler_gamma + std::log(8.0)) / k_pi;

// Centering sequence for the field maximum on an N-scale lattice.
inline double max_centering(int n) {
  const double ln = std::log(static_cast<double>(n));
  return 2.0 * k_sqrt_g * ln - 0.75 * k_sqrt_g * std::log(ln);
}

// Limiting normalized free energy: 1 + (beta/beta_c)^2 up to beta_c, then
// linear 2 beta / beta_c.
inline double free_energy_limit(double beta) {
  const double t = beta / k_beta_c;
  return beta <= k_beta_c ? 1.0 + t * t : 2.0 * t;
}

}  // namespace gff
