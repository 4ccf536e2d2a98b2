#pragma once

#include "nldecay/damped_system.hpp"

namespace nldecay {

/// Deterministic random state on the unit sphere: std::mt19937_64 seeded as
/// given, Gaussian components, normalized.
Eigen::VectorXd random_state(const DampedSystem& system, unsigned long long seed);

/// Smooth initial data for decay experiments: per-rotation-pair energy
/// c_k^2 proportional to 1 / (k w_k^2), i.e. the graph-norm-critical modal
/// profile (for the modal wave this is energy n^{-3} per mode), with a
/// seed-determined phase inside each pair. Normalized to ||x0|| = 1.
Eigen::VectorXd smooth_state(const DampedSystem& system, unsigned long long seed);

}  // namespace nldecay
