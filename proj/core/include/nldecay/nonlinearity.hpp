#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

namespace nldecay {

enum class PhiKind { Identity, LinearGain, Radial };

/// Damping map phi: R^d -> R^d with phi(0) = 0. Radial maps are
/// psi(|u|) u / |u| for a scalar profile psi >= 0.
struct Nonlinearity {
    PhiKind kind = PhiKind::Identity;
    double gain = 1.0;                        // LinearGain only
    std::function<double(double)> psi;        // Radial only
    std::string label = "identity";

    static Nonlinearity identity();
    static Nonlinearity linear_gain(double kappa);
    static Nonlinearity radial(std::function<double(double)> psi, std::string label);

    // builtin radial profiles
    static Nonlinearity tanh_profile();                 // psi(r) = tanh r
    static Nonlinearity saturation();                   // psi(r) = min(r, 1)
    static Nonlinearity power(double p);                // psi(r) = r^p
    static Nonlinearity deadzone(double threshold);     // psi(r) = max(r - threshold, 0)

    /// Builds a nonlinearity from a name like "identity", "gain:2", "tanh",
    /// "saturation", "power:3", "deadzone:0.1". Throws on unknown names.
    static Nonlinearity from_name(const std::string& name);
};

Eigen::VectorXd eval(const Nonlinearity& phi, const Eigen::VectorXd& u);

/// Empirical sector constants of <phi(u), u> (lower bounds of Eq-(2) type).
struct SectorReport {
    double delta;
    double c_small;          // inf of <phi(u),u>/|u|^2 on 0 < |u| <= delta
    double c_large;          // inf of <phi(u),u> on delta <= |u| <= R_max
    double lipschitz_delta;  // sup of |phi(u)|/|u| on |u| <= delta
    bool pass;               // c_small > 0 and c_large > 0
};

SectorReport verify_sector(const Nonlinearity& phi, int dim, double delta,
                           double r_max, int samples);

struct MonotoneReport {
    double min_pairing;      // sampled min of <phi(u1)-phi(u2), u1-u2>
    Eigen::VectorXd worst_u1;
    Eigen::VectorXd worst_u2;
    // A negative min_pairing certifies non-monotonicity; a nonnegative one
    // is sampling evidence only.
};

MonotoneReport verify_monotone(const Nonlinearity& phi, int dim, int pairs);

/// Power-law fit of the remainder phi(u) - kappa u near the origin.
struct LinearizationFit {
    double kappa;
    double gamma;      // +inf when the remainder is numerically zero
    double C;
    double epsilon;
    double residual;   // max log10 deviation of the fit
    bool clean;        // residual below 0.25 (a power law describes the data)
};

LinearizationFit fit_linearization(const Nonlinearity& phi, double epsilon);

}  // namespace nldecay
