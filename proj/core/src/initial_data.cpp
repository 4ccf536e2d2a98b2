#include "nldecay/initial_data.hpp"

#include <cmath>
#include <random>

namespace nldecay {

Eigen::VectorXd random_state(const DampedSystem& system, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd x(system.dim);
    for (int i = 0; i < system.dim; ++i) x(i) = gauss(rng);
    x.normalize();
    return x;
}

Eigen::VectorXd smooth_state(const DampedSystem& system, unsigned long long seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    const int n_pairs = static_cast<int>(system.freqs.size());
    Eigen::VectorXd z = Eigen::VectorXd::Zero(system.dim);
    for (int k = 0; k < n_pairs; ++k) {
        // per-pair energy ~ (k+1)^-3 in mode index: smooth data whose decay
        // envelope tracks the sharp polynomial rate for both model families
        const double amp = std::pow(static_cast<double>(k + 1), -1.5);
        const double phase = angle(rng);
        z(2 * k) = amp * std::cos(phase);
        z(2 * k + 1) = amp * std::sin(phase);
    }
    z.normalize();
    return system.modal ? z : (system.pair_basis * z).eval();
}

}  // namespace nldecay
