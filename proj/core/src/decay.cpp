#include "nldecay/decay.hpp"

#include "nldecay/damped_system.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace nldecay {

namespace {

void format_float(std::ostream& out, double v) {
    char buf[40];
    snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}

// indices of >= 30 log-spaced samples in [t_lo, t_hi] (nearest sample per
// log-spaced target, deduplicated)
std::vector<size_t> log_resample(const std::vector<double>& times, double t_lo,
                                 double t_hi) {
    std::vector<size_t> picked;
    const int targets = 200;
    size_t cursor = 0;
    for (int i = 0; i < targets; ++i) {
        const double t =
            t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / (targets - 1));
        while (cursor + 1 < times.size() &&
               std::abs(times[cursor + 1] - t) <= std::abs(times[cursor] - t))
            ++cursor;
        if (times[cursor] < t_lo - 1e-12 || times[cursor] > t_hi + 1e-12) continue;
        if (picked.empty() || picked.back() != cursor) picked.push_back(cursor);
    }
    return picked;
}

void default_window(const Trajectory& traj, double& t_lo, double& t_hi) {
    if (traj.times.size() < 2) throw std::invalid_argument("decay: trajectory too short");
    const double t_end = traj.times.back();
    if (t_hi <= 0.0) t_hi = t_end;
    if (t_lo <= 0.0) t_lo = 0.05 * t_end;
    if (!(t_lo < t_hi))
        throw std::invalid_argument("decay: window must satisfy t_lo < t_hi");
}

}  // namespace

DecayReport fit_decay_exponent(const Trajectory& trajectory, double t_lo, double t_hi) {
    default_window(trajectory, t_lo, t_hi);

    DecayReport report;
    report.t_lo = t_lo;
    report.t_hi = t_hi;

    // truncate at the floating floor: a norm that has collapsed to roundoff
    // contributes garbage slopes
    double floor_t = t_hi;
    const double floor_norm = 1e-300;
    for (size_t i = 0; i < trajectory.times.size(); ++i) {
        if (trajectory.times[i] >= t_lo && trajectory.norms[i] <= floor_norm) {
            floor_t = trajectory.times[i];
            report.window_truncated = true;
            break;
        }
    }
    const double hi = std::min(t_hi, floor_t);

    const std::vector<size_t> idx = log_resample(trajectory.times, t_lo, hi);
    if (idx.size() < 30)
        throw std::runtime_error("fit_decay_exponent: fewer than 30 samples in window");

    double mx = 0, my = 0;
    for (size_t i : idx) {
        if (trajectory.norms[i] <= 0.0)
            throw std::runtime_error("fit_decay_exponent: nonpositive norm in window");
        mx += std::log(trajectory.times[i]);
        my += std::log(trajectory.norms[i]);
    }
    const double n = static_cast<double>(idx.size());
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (size_t i : idx) {
        const double dx = std::log(trajectory.times[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(trajectory.norms[i]) - my);
    }
    const double slope = sxy / sxx;
    report.theta_hat = -slope;
    double ssr = 0;
    for (size_t i : idx) {
        const double pred = my + slope * (std::log(trajectory.times[i]) - mx);
        const double r = std::log(trajectory.norms[i]) - pred;
        ssr += r * r;
    }
    report.stderr_theta = idx.size() > 2 ? std::sqrt(ssr / (n - 2) / sxx) : 0.0;
    return report;
}

std::pair<double, double> sharpness_check(const Trajectory& trajectory,
                                          double predicted, double t_lo, double t_hi) {
    default_window(trajectory, t_lo, t_hi);
    double sup_scaled = 0.0;
    double tail_sum = 0.0;
    int tail_count = 0;
    const double tail_lo = t_hi / 10.0;  // last decade of the window
    for (size_t i = 0; i < trajectory.times.size(); ++i) {
        const double t = trajectory.times[i];
        if (t < t_lo || t > t_hi) continue;
        const double scaled = std::pow(t, predicted) * trajectory.norms[i];
        sup_scaled = std::max(sup_scaled, scaled);
        if (t >= tail_lo) {
            tail_sum += scaled;
            ++tail_count;
        }
    }
    return {sup_scaled, tail_count > 0 ? tail_sum / tail_count : 0.0};
}

double contraction_check(const DampedSystem& system, const Nonlinearity& phi,
                         const Eigen::VectorXd& x0_a, const Eigen::VectorXd& x0_b,
                         const Schedule& schedule) {
    // advance both states through identical steps; the difference norm must
    // be non-increasing for monotone phi
    const StrangStepper stepper(system, phi, schedule.dt, schedule.substep_tol);
    Eigen::VectorXd a = stepper.to_pairs(x0_a);
    Eigen::VectorXd b = stepper.to_pairs(x0_b);
    double prev = (b - a).norm();
    double max_increase = 0.0;
    const int n_steps = static_cast<int>(std::llround(schedule.t_end / schedule.dt));
    for (int step = 0; step < n_steps; ++step) {
        stepper.step(a);
        stepper.step(b);
        const double diff = (b - a).norm();
        max_increase = std::max(max_increase, diff - prev);
        prev = diff;
    }
    return max_increase;
}

double derivative_monotonicity_check(const Trajectory& trajectory) {
    double max_increase = 0.0;
    for (size_t i = 1; i < trajectory.xdot_norms.size(); ++i)
        max_increase = std::max(
            max_increase, trajectory.xdot_norms[i] - trajectory.xdot_norms[i - 1]);
    return max_increase;
}

double uniform_decay_profile(const DampedSystem& system, const Nonlinearity& phi,
                             const std::vector<Eigen::VectorXd>& x0_batch,
                             const Schedule& schedule, double beta) {
    double worst = 0.0;
    for (const auto& x0 : x0_batch) {
        const double denom = graph_seminorm(system, x0);
        if (denom == 0.0) continue;
        const Trajectory traj = integrate(system, phi, x0, schedule);
        for (size_t i = 0; i < traj.times.size(); ++i) {
            const double ratio =
                std::pow(1.0 + traj.times[i], 1.0 / (2.0 * beta)) * traj.norms[i] /
                denom;
            worst = std::max(worst, ratio);
        }
    }
    return worst;
}

void write_decay_csv(const DecayReport& report, std::ostream& out) {
    out << "key,value\n";
    out << "theta_hat,";
    format_float(out, report.theta_hat);
    out << "\nstderr,";
    format_float(out, report.stderr_theta);
    out << "\nwindow_lo,";
    format_float(out, report.t_lo);
    out << "\nwindow_hi,";
    format_float(out, report.t_hi);
    out << "\npredicted,";
    format_float(out, report.predicted);
    out << "\nsup_scaled,";
    format_float(out, report.sup_scaled);
    out << "\ntail_scaled,";
    format_float(out, report.tail_scaled);
    out << "\nwindow_truncated," << (report.window_truncated ? 1 : 0) << '\n';
}

}  // namespace nldecay
