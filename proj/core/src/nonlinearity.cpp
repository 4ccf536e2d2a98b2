#include "nldecay/nonlinearity.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace nldecay {

namespace {

constexpr double kGoldenAngle = 2.39996322972865332;  // 2 pi (1 - 1/phi)

double psi_checked(const Nonlinearity& phi, double r) {
    const double v = phi.psi(r);
    if (!std::isfinite(v) || v < 0.0)
        throw std::runtime_error("Nonlinearity: psi(" + std::to_string(r) +
                                 ") is negative or non-finite in '" + phi.label + "'");
    return v;
}

// <phi(u), u> for u = r * direction with |direction| = 1.
double pairing(const Nonlinearity& phi, const Eigen::VectorXd& dir, double r) {
    if (r == 0.0) return 0.0;
    return eval(phi, r * dir).dot(r * dir);
}

// deterministic quasi-random directions on the unit sphere of R^d, d <= 2
Eigen::VectorXd direction(int dim, int index) {
    Eigen::VectorXd dir(dim);
    if (dim == 1) {
        dir(0) = (index % 2 == 0) ? 1.0 : -1.0;
    } else {
        const double angle = index * kGoldenAngle;
        dir(0) = std::cos(angle);
        dir(1) = std::sin(angle);
    }
    return dir;
}

}  // namespace

Nonlinearity Nonlinearity::identity() {
    Nonlinearity phi;
    phi.kind = PhiKind::Identity;
    phi.label = "identity";
    return phi;
}

Nonlinearity Nonlinearity::linear_gain(double kappa) {
    Nonlinearity phi;
    phi.kind = PhiKind::LinearGain;
    phi.gain = kappa;
    phi.label = "gain:" + std::to_string(kappa);
    return phi;
}

Nonlinearity Nonlinearity::radial(std::function<double(double)> psi, std::string label) {
    Nonlinearity phi;
    phi.kind = PhiKind::Radial;
    phi.psi = std::move(psi);
    phi.label = std::move(label);
    return phi;
}

Nonlinearity Nonlinearity::tanh_profile() {
    return radial([](double r) { return std::tanh(r); }, "tanh");
}

Nonlinearity Nonlinearity::saturation() {
    return radial([](double r) { return std::min(r, 1.0); }, "saturation");
}

Nonlinearity Nonlinearity::power(double p) {
    return radial([p](double r) { return std::pow(r, p); },
                  "power:" + std::to_string(p));
}

Nonlinearity Nonlinearity::deadzone(double threshold) {
    return radial([threshold](double r) { return std::max(r - threshold, 0.0); },
                  "deadzone:" + std::to_string(threshold));
}

Nonlinearity Nonlinearity::from_name(const std::string& name) {
    const auto colon = name.find(':');
    const std::string head = name.substr(0, colon);
    const std::string arg =
        colon == std::string::npos ? std::string() : name.substr(colon + 1);
    if (head == "identity") return identity();
    if (head == "tanh") return tanh_profile();
    if (head == "saturation") return saturation();
    if (head == "gain") return linear_gain(arg.empty() ? 1.0 : std::stod(arg));
    if (head == "power") return power(arg.empty() ? 3.0 : std::stod(arg));
    if (head == "deadzone") return deadzone(arg.empty() ? 0.1 : std::stod(arg));
    throw std::runtime_error("Nonlinearity: unknown name '" + name + "'");
}

Eigen::VectorXd eval(const Nonlinearity& phi, const Eigen::VectorXd& u) {
    switch (phi.kind) {
        case PhiKind::Identity:
            return u;
        case PhiKind::LinearGain:
            return phi.gain * u;
        case PhiKind::Radial: {
            const double r = u.norm();
            if (r == 0.0) return Eigen::VectorXd::Zero(u.size());
            return psi_checked(phi, r) / r * u;
        }
    }
    throw std::logic_error("Nonlinearity: bad kind");
}

SectorReport verify_sector(const Nonlinearity& phi, int dim, double delta,
                           double r_max, int samples) {
    if (samples < 1000)
        throw std::invalid_argument("verify_sector: samples must be >= 1000");
    if (delta <= 0 || r_max <= delta)
        throw std::invalid_argument("verify_sector: need 0 < delta < r_max");

    // radial maps (and linear ones) reduce the search to 1-D over r
    const int n_dirs = (phi.kind == PhiKind::Radial || dim == 1) ? 1 : 16;

    SectorReport report{delta, std::numeric_limits<double>::infinity(),
                        std::numeric_limits<double>::infinity(), 0.0, false};

    // small radii: log-spaced grid on [1e-6 delta, delta] to reach the r -> 0
    // regime where the sector bound bites
    const int n_r = samples;
    for (int dir_i = 0; dir_i < n_dirs; ++dir_i) {
        const Eigen::VectorXd dir = direction(dim, dir_i);
        for (int i = 0; i < n_r; ++i) {
            const double t = static_cast<double>(i) / (n_r - 1);
            const double r = delta * std::pow(1e-6, 1.0 - t);
            const double p = pairing(phi, dir, r);
            report.c_small = std::min(report.c_small, p / (r * r));
            report.lipschitz_delta =
                std::max(report.lipschitz_delta, eval(phi, r * dir).norm() / r);
        }
        // large radii: [delta, r_max], closed at delta
        for (int i = 0; i < n_r; ++i) {
            const double t = static_cast<double>(i) / (n_r - 1);
            const double r = delta * std::pow(r_max / delta, t);
            report.c_large = std::min(report.c_large, pairing(phi, dir, r));
        }
    }
    report.pass = report.c_small > 0.0 && report.c_large > 0.0;
    return report;
}

MonotoneReport verify_monotone(const Nonlinearity& phi, int dim, int pairs) {
    if (pairs < 10000)
        throw std::invalid_argument("verify_monotone: pairs must be >= 10000");

    MonotoneReport report;
    report.min_pairing = std::numeric_limits<double>::infinity();
    report.worst_u1 = Eigen::VectorXd::Zero(dim);
    report.worst_u2 = Eigen::VectorXd::Zero(dim);

    // additive-recurrence (Kronecker) sequence in the cube [-10, 10]^(2 dim)
    const double alphas[4] = {0.6180339887498949, 0.7548776662466927,
                              0.5698402909980532, 0.8191725133961645};
    double state[4] = {0.5, 0.5, 0.5, 0.5};
    for (int k = 0; k < pairs; ++k) {
        Eigen::VectorXd u1(dim), u2(dim);
        for (int j = 0; j < dim; ++j) {
            state[j] += alphas[j];
            state[j] -= std::floor(state[j]);
            state[j + 2] += alphas[j + 2];
            state[j + 2] -= std::floor(state[j + 2]);
            u1(j) = 20.0 * state[j] - 10.0;
            u2(j) = 20.0 * state[j + 2] - 10.0;
        }
        if (dim == 2 && (u1.norm() > 10.0 || u2.norm() > 10.0)) continue;
        double p;
        try {
            p = (eval(phi, u1) - eval(phi, u2)).dot(u1 - u2);
        } catch (const std::runtime_error&) {
            continue;  // psi undefined out there; not evidence either way
        }
        if (p < report.min_pairing) {
            report.min_pairing = p;
            report.worst_u1 = u1;
            report.worst_u2 = u2;
        }
    }
    return report;
}

LinearizationFit fit_linearization(const Nonlinearity& phi, double epsilon) {
    if (epsilon <= 0)
        throw std::invalid_argument("fit_linearization: epsilon must be positive");
    if (phi.kind == PhiKind::Radial && !phi.psi)
        throw std::invalid_argument("fit_linearization: radial phi without psi");

    auto slope = [&phi](double r) {
        Eigen::VectorXd u(1);
        u(0) = r;
        // radial and linear maps are direction-independent, so one axis is enough
        if (phi.kind == PhiKind::Radial) return psi_checked(phi, r) / r;
        return eval(phi, u)(0) / r;
    };

    const int n_grid = 60;
    std::vector<double> radii(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        const double t = static_cast<double>(i) / (n_grid - 1);
        radii[i] = (epsilon / 100.0) * std::pow(100.0, t);
    }

    // limit slope psi(r)/r at r -> 0, extrapolated quadratically from the
    // three smallest grid radii
    const double r0 = radii[0], r1 = radii[1], r2 = radii[2];
    const double s0 = slope(r0), s1 = slope(r1), s2 = slope(r2);
    const double kappa = s0 * (r1 * r2) / ((r1 - r0) * (r2 - r0)) +
                         s1 * (r0 * r2) / ((r0 - r1) * (r2 - r1)) +
                         s2 * (r0 * r1) / ((r0 - r2) * (r1 - r2));

    LinearizationFit fit;
    fit.kappa = kappa;
    fit.epsilon = epsilon;

    std::vector<double> log_r, log_rem;
    double max_rem = 0.0;
    for (double r : radii) {
        const double rem = std::abs(slope(r) - kappa) * r;  // |phi(u) - kappa u|
        max_rem = std::max(max_rem, rem);
        if (rem > 1e-14 * r) {
            log_r.push_back(std::log10(r));
            log_rem.push_back(std::log10(rem));
        }
    }

    if (log_r.size() < 5) {
        fit.gamma = std::numeric_limits<double>::infinity();
        fit.C = max_rem;
        fit.residual = 0.0;
        fit.clean = true;
        return fit;
    }

    const int n = static_cast<int>(log_r.size());
    double mx = 0, my = 0;
    for (int i = 0; i < n; ++i) {
        mx += log_r[i];
        my += log_rem[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (log_r[i] - mx) * (log_r[i] - mx);
        sxy += (log_r[i] - mx) * (log_rem[i] - my);
    }
    fit.gamma = sxy / sxx;
    fit.C = std::pow(10.0, my - fit.gamma * mx);
    fit.residual = 0.0;
    for (int i = 0; i < n; ++i) {
        const double pred = my + fit.gamma * (log_r[i] - mx);
        fit.residual = std::max(fit.residual, std::abs(log_rem[i] - pred));
    }
    fit.clean = fit.residual <= 0.25;
    return fit;
}

}  // namespace nldecay
