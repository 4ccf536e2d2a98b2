#pragma once

#include "nldecay/damped_system.hpp"
#include "nldecay/nonlinearity.hpp"

#include <iosfwd>
#include <vector>

namespace nldecay {

struct Schedule {
    double t_end = 100.0;
    double dt = 1e-2;          // macro step
    int sample_stride = 1;     // emit one sample every this many macro steps
    double substep_tol = 1e-12;  // damping-substep solver tolerance
};

/// Time-sampled record of one simulation run.
struct Trajectory {
    std::vector<double> times;
    std::vector<double> norms;                   // ||x(t)||
    std::vector<Eigen::VectorXd> w_samples;      // w = B* x(t)
    std::vector<double> dissipation;             // 2 int_0^t <phi(w), w> ds
    std::vector<double> xdot_norms;              // ||A x - B phi(B* x)||
    double initial_graph_seminorm = 0.0;
};

enum class Method { Strang, ImplicitMidpoint };

/// Exact conservative flow exp(A dt) x: per-pair rotations in the
/// rotation-pair basis. Norm-preserving to roundoff.
Eigen::VectorXd linear_flow(const DampedSystem& system, const Eigen::VectorXd& x,
                            double dt);

/// Exact-in-range flow of y' = -B phi(B* y): w = B* y satisfies the
/// d-dimensional ODE w' = -(B*B) phi(w), integrated adaptively to tol;
/// components orthogonal to range(B) are untouched.
Eigen::VectorXd damping_substep(const DampedSystem& system, const Nonlinearity& phi,
                                const Eigen::VectorXd& x, double dt, double tol);

Trajectory integrate(const DampedSystem& system, const Nonlinearity& phi,
                     const Eigen::VectorXd& x0, const Schedule& schedule,
                     Method method = Method::Strang);

/// One macro step of the Strang composition in rotation-pair coordinates.
/// Lets callers advance several states through identical schedules without
/// paying the basis transform per step.
class StrangStepper {
public:
    StrangStepper(const DampedSystem& system, const Nonlinearity& phi, double dt,
                  double tol);
    ~StrangStepper();
    StrangStepper(const StrangStepper&) = delete;
    StrangStepper& operator=(const StrangStepper&) = delete;

    Eigen::VectorXd to_pairs(const Eigen::VectorXd& x) const;
    Eigen::VectorXd from_pairs(const Eigen::VectorXd& z) const;

    /// Advances z by one macro step; returns the dissipation increment.
    double step(Eigen::VectorXd& z) const;

private:
    struct Impl;
    Impl* impl_;
};

/// residual(t_k) = ||x(t_k)||^2 + dissipation(t_k) - ||x(0)||^2.
std::vector<double> energy_balance_residual(const Trajectory& trajectory);

/// CSV with header t,norm,w1[,w2],dissipation,xdot_norm at 17 significant
/// digits.
void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out);

}  // namespace nldecay
