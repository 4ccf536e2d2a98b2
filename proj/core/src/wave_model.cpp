#include "nldecay/wave_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nldecay {

namespace {

double eval_checked(const std::function<double(double)>& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v))
        throw std::runtime_error("sine_coefficients: profile non-finite at x = " +
                                 std::to_string(x));
    return v;
}

// Adaptive Simpson on [a, b] with function values fa, fm, fb already known.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double fa, double fm, double fb, double whole, double tol,
                        int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval_checked(f, lm);
    const double frm = eval_checked(f, rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double integrate_01(const std::function<double(double)>& f, int panels, double tol) {
    double total = 0.0;
    const double h = 1.0 / panels;
    for (int p = 0; p < panels; ++p) {
        const double a = p * h;
        const double b = a + h;
        const double m = 0.5 * (a + b);
        const double fa = eval_checked(f, a);
        const double fm = eval_checked(f, m);
        const double fb = eval_checked(f, b);
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        total += adaptive_simpson(f, a, b, fa, fm, fb, whole, tol / panels, 40);
    }
    return total;
}

}  // namespace

std::vector<double> sine_coefficients(const std::function<double(double)>& profile,
                                      int count) {
    if (count < 1) throw std::invalid_argument("sine_coefficients: count must be >= 1");
    std::vector<double> coeffs(count);
    for (int n = 1; n <= count; ++n) {
        auto integrand = [&profile, n](double x) {
            return profile(x) * std::sin(n * M_PI * x);
        };
        // one panel per half-period keeps the adaptive refinement local
        const int panels = std::max(8, 2 * n);
        coeffs[n - 1] = integrate_01(integrand, panels, 1e-11);
    }
    return coeffs;
}

DampedSystem build_wave_modal(const WaveModelConfig& config) {
    if (config.modes < 1)
        throw std::invalid_argument("build_wave_modal: modes must be >= 1");

    std::vector<double> b;
    if (config.coeffs) {
        b = *config.coeffs;
        if (static_cast<int>(b.size()) < config.modes)
            throw std::invalid_argument("build_wave_modal: coeffs shorter than modes");
        b.resize(config.modes);
        for (double bn : b)
            if (!std::isfinite(bn))
                throw std::invalid_argument("build_wave_modal: non-finite coefficient");
    } else {
        if (config.beta <= 0.5)
            throw std::invalid_argument(
                "build_wave_modal: beta must exceed 1/2 for b_n = n^-beta");
        b.resize(config.modes);
        for (int n = 1; n <= config.modes; ++n)
            b[n - 1] = std::pow(static_cast<double>(n), -config.beta);
    }

    const int n_modes = config.modes;
    DampedSystem sys;
    sys.dim = 2 * n_modes;
    sys.input_dim = 1;
    sys.modal = true;
    sys.label = "wave-modal(modes=" + std::to_string(n_modes) + ")";

    sys.freqs.resize(n_modes);
    sys.generator = Eigen::MatrixXd::Zero(sys.dim, sys.dim);
    sys.input_map = Eigen::MatrixXd::Zero(sys.dim, 1);
    const double sqrt2 = std::sqrt(2.0);
    for (int n = 1; n <= n_modes; ++n) {
        const double w = n * M_PI;
        const int i0 = 2 * (n - 1);        // position slot: w_n a_n
        sys.freqs(n - 1) = w;
        sys.generator(i0, i0 + 1) = w;
        sys.generator(i0 + 1, i0) = -w;
        sys.input_map(i0 + 1, 0) = sqrt2 * b[n - 1];  // velocity slot
    }
    sys.pair_basis = Eigen::MatrixXd::Identity(sys.dim, sys.dim);
    sys.input_map_pairs = sys.input_map;
    sys.eigen_data = eigen_data_from_pairs(sys.freqs, sys.pair_basis, sys.input_map);
    return sys;
}

}  // namespace nldecay
