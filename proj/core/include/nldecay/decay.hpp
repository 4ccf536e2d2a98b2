#pragma once

#include "nldecay/integrator.hpp"

#include <iosfwd>
#include <utility>

namespace nldecay {

/// Fitted decay exponent of ||x(t)|| ~ C t^{-theta} plus sharpness data.
struct DecayReport {
    double theta_hat = 0.0;
    double stderr_theta = 0.0;
    double t_lo = 0.0;
    double t_hi = 0.0;
    double predicted = 0.0;   // 1/(2 beta) or 1/alpha, per scenario
    double sup_scaled = 0.0;  // sup over window of t^predicted ||x(t)||
    double tail_scaled = 0.0; // mean of the same over the last decade
    bool window_truncated = false;  // norms hit the floating floor
};

/// Least-squares slope of log ||x|| vs log t over a log-spaced resampling of
/// the window (>= 30 samples). Window defaults to (0.05 t_end, t_end) when
/// t_lo <= 0.
DecayReport fit_decay_exponent(const Trajectory& trajectory, double t_lo = 0.0,
                               double t_hi = 0.0);

/// (sup_scaled, tail_scaled) of t^predicted ||x(t)|| over the window.
std::pair<double, double> sharpness_check(const Trajectory& trajectory,
                                          double predicted, double t_lo = 0.0,
                                          double t_hi = 0.0);

/// Runs the pair (x0_a, x0_b) through the same schedule and returns the
/// largest sample-to-sample increase of ||x_b(t) - x_a(t)|| (0 = monotone).
double contraction_check(const DampedSystem& system, const Nonlinearity& phi,
                         const Eigen::VectorXd& x0_a, const Eigen::VectorXd& x0_b,
                         const Schedule& schedule);

/// Largest sample-to-sample increase of ||x'(t)|| along the trajectory.
double derivative_monotonicity_check(const Trajectory& trajectory);

/// Max over the batch of sup_t (1+t)^{1/(2 beta)} ||x(t)|| / (||x0|| + ||A x0||).
double uniform_decay_profile(const DampedSystem& system, const Nonlinearity& phi,
                             const std::vector<Eigen::VectorXd>& x0_batch,
                             const Schedule& schedule, double beta);

void write_decay_csv(const DecayReport& report, std::ostream& out);

}  // namespace nldecay
