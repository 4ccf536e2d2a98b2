#pragma once

#include "nldecay/damped_system.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace nldecay {

/// Weakly damped wave equation on (0,1): modal truncation with damping
/// profile coefficients b_n. When coeffs is absent they are generated as
/// b_n = n^(-beta); square-summability then requires beta > 1/2.
struct WaveModelConfig {
    double beta = 1.0;
    std::optional<std::vector<double>> coeffs;
    int modes = 128;
};

/// Fourier sine coefficients b_n = integral_0^1 profile(x) sin(n pi x) dx,
/// n = 1..count, by adaptive quadrature (absolute error <= 1e-10 each for
/// smooth profiles). Throws if the profile evaluates non-finite, naming the
/// abscissa.
std::vector<double> sine_coefficients(const std::function<double(double)>& profile,
                                      int count);

/// Modal wave system in coordinates z_n = (w_n a_n, a_n') per mode, where
/// u = sum a_n(t) sqrt(2) sin(n pi x) and w_n = n pi. B is a single column
/// with sqrt(2) b_n on the velocity slots; eigen_data carries s = +-n pi and
/// |B* e_k| = b_n.
DampedSystem build_wave_modal(const WaveModelConfig& config);

}  // namespace nldecay
