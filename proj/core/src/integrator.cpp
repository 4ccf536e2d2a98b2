#include "nldecay/integrator.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace nldecay {

namespace {

void format_float(std::ostream& out, double v);  // defined below

// ---- rotation-pair kernels -------------------------------------------------

// z <- exp(A dt) z in pair coordinates, using precomputed cos/sin per pair
void rotate_pairs(Eigen::VectorXd& z, const Eigen::VectorXd& c,
                  const Eigen::VectorXd& s) {
    const int n_pairs = static_cast<int>(c.size());
    for (int k = 0; k < n_pairs; ++k) {
        const double a = z(2 * k);
        const double b = z(2 * k + 1);
        // d/dt (a, b) = (w b, -w a): rotation by angle w dt
        z(2 * k) = c(k) * a + s(k) * b;
        z(2 * k + 1) = -s(k) * a + c(k) * b;
    }
}

Eigen::VectorXd apply_pair_generator(const Eigen::VectorXd& freqs,
                                     const Eigen::VectorXd& z) {
    Eigen::VectorXd out(z.size());
    for (int k = 0; k < freqs.size(); ++k) {
        out(2 * k) = freqs(k) * z(2 * k + 1);
        out(2 * k + 1) = -freqs(k) * z(2 * k);
    }
    return out;
}

// ---- reduced damping ODE w' = -(B*B) phi(w) --------------------------------

struct ReducedResult {
    Eigen::VectorXd w_end;
    double dissipation = 0.0;  // trapezoid of 2 <phi(w), w> over the substep nodes
};

// Dormand-Prince 5(4) coefficients
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                 kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

ReducedResult solve_reduced(const Eigen::MatrixXd& btb, const Nonlinearity& phi,
                            const Eigen::VectorXd& w0, double dt, double tol) {
    ReducedResult res;

    // linear damping has a closed-form substep; trapezoid on the half-step
    // nodes keeps the quadrature error below the splitting error
    if (phi.kind == PhiKind::Identity || phi.kind == PhiKind::LinearGain) {
        const double kappa = phi.kind == PhiKind::Identity ? 1.0 : phi.gain;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(btb);
        const Eigen::VectorXd half =
            (-kappa * 0.5 * dt * es.eigenvalues().array()).exp().matrix();
        const Eigen::VectorXd w_mid = es.eigenvectors() * half.asDiagonal() *
                                      es.eigenvectors().transpose() * w0;
        res.w_end = es.eigenvectors() * half.cwiseProduct(half).asDiagonal() *
                    es.eigenvectors().transpose() * w0;
        res.dissipation =
            0.5 * kappa * dt *
            (w0.squaredNorm() + 2.0 * w_mid.squaredNorm() + res.w_end.squaredNorm());
        return res;
    }

    auto rhs = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
        return -(btb * eval(phi, w));
    };
    auto diss_rate = [&](const Eigen::VectorXd& w) {
        return 2.0 * eval(phi, w).dot(w);
    };

    Eigen::VectorXd w = w0;
    Eigen::VectorXd k1 = rhs(w);
    double g_prev = diss_rate(w);
    double t = 0.0;
    // cap steps at dt/2 so the dissipation trapezoid sees at least the
    // half-step nodes even when the ODE solver could stride the whole substep
    const double h_max = 0.5 * dt;
    double h = h_max;

    while (t < dt) {
        if (h > h_max) h = h_max;
        if (t + h > dt) h = dt - t;
        const Eigen::VectorXd k2 = rhs(w + h * kA21 * k1);
        const Eigen::VectorXd k3 = rhs(w + h * (kA31 * k1 + kA32 * k2));
        const Eigen::VectorXd k4 = rhs(w + h * (kA41 * k1 + kA42 * k2 + kA43 * k3));
        const Eigen::VectorXd k5 =
            rhs(w + h * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4));
        const Eigen::VectorXd k6 = rhs(
            w + h * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5));
        const Eigen::VectorXd w_new =
            w + h * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
        const Eigen::VectorXd k7 = rhs(w_new);
        const double err =
            (h * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 + kE7 * k7))
                .norm();
        const double scale = tol * std::max(1.0, std::max(w.norm(), w_new.norm()));
        if (err <= scale) {
            t += h;
            w = w_new;
            k1 = k7;  // FSAL
            const double g_new = diss_rate(w);
            res.dissipation += 0.5 * h * (g_prev + g_new);
            g_prev = g_new;
            if (t >= dt) break;
        }
        const double factor =
            err > 0 ? 0.9 * std::pow(scale / err, 0.2) : 5.0;
        h *= std::min(5.0, std::max(0.2, factor));
        if (h < 1e-14 * dt)
            throw std::runtime_error(
                "damping_substep: step underflow at substep time " + std::to_string(t));
    }
    res.w_end = w;
    return res;
}

// shared per-run damping data
struct DampingOp {
    Eigen::MatrixXd input_pairs;  // B in pair coordinates, N x d
    Eigen::MatrixXd btb;          // B* B, d x d
    Eigen::MatrixXd btb_inv;
    bool active = false;
};

DampingOp make_damping_op(const DampedSystem& system) {
    DampingOp op;
    op.input_pairs = system.input_map_pairs.size() > 0
                         ? system.input_map_pairs
                         : system.pair_basis.transpose() * system.input_map;
    op.btb = op.input_pairs.transpose() * op.input_pairs;
    op.active = op.btb.norm() > 0.0;
    if (op.active) op.btb_inv = op.btb.inverse();
    return op;
}

// one damping substep in pair coordinates; returns the dissipation increment
double damp_in_place(const DampingOp& op, const Nonlinearity& phi,
                     Eigen::VectorXd& z, double dt, double tol) {
    if (!op.active) return 0.0;
    const Eigen::VectorXd w0 = op.input_pairs.transpose() * z;
    ReducedResult red = solve_reduced(op.btb, phi, w0, dt, tol);
    z.noalias() -= op.input_pairs * (op.btb_inv * (w0 - red.w_end));
    return red.dissipation;
}

// d x d Jacobian of phi by forward differences
Eigen::MatrixXd phi_jacobian(const Nonlinearity& phi, const Eigen::VectorXd& w) {
    const int d = static_cast<int>(w.size());
    const Eigen::VectorXd f0 = eval(phi, w);
    Eigen::MatrixXd jac(d, d);
    for (int j = 0; j < d; ++j) {
        const double h = 1e-7 * std::max(1.0, std::abs(w(j)));
        Eigen::VectorXd wp = w;
        wp(j) += h;
        jac.col(j) = (eval(phi, wp) - f0) / h;
    }
    return jac;
}

}  // namespace

Eigen::VectorXd linear_flow(const DampedSystem& system, const Eigen::VectorXd& x,
                            double dt) {
    if (x.size() != system.dim)
        throw std::invalid_argument("linear_flow: state dimension mismatch");
    if (system.freqs.size() == 0)
        throw std::runtime_error("linear_flow: system lacks a rotation-pair factorization");
    Eigen::VectorXd z = system.modal ? x : (system.pair_basis.transpose() * x).eval();
    Eigen::VectorXd c(system.freqs.size()), s(system.freqs.size());
    for (int k = 0; k < system.freqs.size(); ++k) {
        c(k) = std::cos(system.freqs(k) * dt);
        s(k) = std::sin(system.freqs(k) * dt);
    }
    rotate_pairs(z, c, s);
    return system.modal ? z : (system.pair_basis * z).eval();
}

Eigen::VectorXd damping_substep(const DampedSystem& system, const Nonlinearity& phi,
                                const Eigen::VectorXd& x, double dt, double tol) {
    if (x.size() != system.dim)
        throw std::invalid_argument("damping_substep: state dimension mismatch");
    DampingOp op;
    op.input_pairs = system.input_map;  // original coordinates
    op.btb = op.input_pairs.transpose() * op.input_pairs;
    op.active = op.btb.norm() > 0.0;
    if (op.active) op.btb_inv = op.btb.inverse();
    Eigen::VectorXd y = x;
    damp_in_place(op, phi, y, dt, tol);
    return y;
}

struct StrangStepper::Impl {
    const DampedSystem& system;
    Nonlinearity phi;
    double dt;
    double tol;
    DampingOp op;
    Eigen::VectorXd ch, sh;  // half-step rotation
};

StrangStepper::StrangStepper(const DampedSystem& system, const Nonlinearity& phi,
                             double dt, double tol)
    : impl_(new Impl{system, phi, dt, tol, make_damping_op(system),
                     Eigen::VectorXd(), Eigen::VectorXd()}) {
    impl_->ch.resize(system.freqs.size());
    impl_->sh.resize(system.freqs.size());
    for (int k = 0; k < system.freqs.size(); ++k) {
        impl_->ch(k) = std::cos(system.freqs(k) * 0.5 * dt);
        impl_->sh(k) = std::sin(system.freqs(k) * 0.5 * dt);
    }
}

StrangStepper::~StrangStepper() { delete impl_; }

Eigen::VectorXd StrangStepper::to_pairs(const Eigen::VectorXd& x) const {
    return impl_->system.modal ? x : (impl_->system.pair_basis.transpose() * x).eval();
}

Eigen::VectorXd StrangStepper::from_pairs(const Eigen::VectorXd& z) const {
    return impl_->system.modal ? z : (impl_->system.pair_basis * z).eval();
}

double StrangStepper::step(Eigen::VectorXd& z) const {
    rotate_pairs(z, impl_->ch, impl_->sh);
    const double d = damp_in_place(impl_->op, impl_->phi, z, impl_->dt, impl_->tol);
    rotate_pairs(z, impl_->ch, impl_->sh);
    return d;
}

Trajectory integrate(const DampedSystem& system, const Nonlinearity& phi,
                     const Eigen::VectorXd& x0, const Schedule& schedule,
                     Method method) {
    if (x0.size() != system.dim)
        throw std::invalid_argument("integrate: state dimension mismatch");
    if (schedule.dt <= 0 || schedule.t_end <= 0 || schedule.dt > schedule.t_end)
        throw std::invalid_argument("integrate: need 0 < dt <= t_end");
    if (schedule.sample_stride < 1)
        throw std::invalid_argument("integrate: sample_stride must be >= 1");
    const int n_steps = static_cast<int>(std::llround(schedule.t_end / schedule.dt));
    const double dt = schedule.dt;

    Eigen::VectorXd z = system.modal ? x0 : (system.pair_basis.transpose() * x0).eval();
    const DampingOp op = make_damping_op(system);

    // a pair with omega*dt at a multiple of 2 pi rotates back onto itself every
    // step, so splitting never feeds its undamped component into the input map
    // and that pair's energy stalls; reject the step size if such pairs carry a
    // non-negligible share of the initial energy
    if (method == Method::Strang) {
        double stalled = 0.0;
        for (int k = 0; k < system.freqs.size(); ++k) {
            const double angle = system.freqs(k) * dt;
            if (angle < M_PI) continue;  // slow rotation, no aliasing
            const double wrapped = std::fmod(angle, 2.0 * M_PI);
            const double dist = std::min(wrapped, 2.0 * M_PI - wrapped);
            if (dist < 0.05) stalled += z.segment<2>(2 * k).squaredNorm();
        }
        if (stalled > 1e-7 * z.squaredNorm())
            throw std::invalid_argument(
                "integrate: dt puts energy-carrying pairs at a splitting resonance "
                "(omega * dt near a multiple of 2 pi), reduce dt");
    }

    Trajectory traj;
    traj.initial_graph_seminorm =
        z.norm() + apply_pair_generator(system.freqs, z).norm();
    const double norm_x0 = z.norm();

    double dissipation = 0.0;
    auto take_sample = [&](double t) {
        const Eigen::VectorXd w = op.input_pairs.transpose() * z;
        Eigen::VectorXd xdot = apply_pair_generator(system.freqs, z);
        if (op.active) xdot.noalias() -= op.input_pairs * eval(phi, w);
        traj.times.push_back(t);
        traj.norms.push_back(z.norm());
        traj.w_samples.push_back(w);
        traj.dissipation.push_back(dissipation);
        traj.xdot_norms.push_back(xdot.norm());
        if (traj.norms.size() >= 2) {
            const double prev = traj.norms[traj.norms.size() - 2];
            if (traj.norms.back() > prev + 1e-10 * norm_x0)
                throw std::runtime_error("integrate: norm increased beyond tolerance at t = " +
                                         std::to_string(t));
        }
    };
    take_sample(0.0);

    if (method == Method::Strang) {
        Eigen::VectorXd ch(system.freqs.size()), sh(system.freqs.size());
        for (int k = 0; k < system.freqs.size(); ++k) {
            ch(k) = std::cos(system.freqs(k) * 0.5 * dt);
            sh(k) = std::sin(system.freqs(k) * 0.5 * dt);
        }
        for (int step = 1; step <= n_steps; ++step) {
            rotate_pairs(z, ch, sh);
            dissipation += damp_in_place(op, phi, z, dt, schedule.substep_tol);
            rotate_pairs(z, ch, sh);
            if (step % schedule.sample_stride == 0 || step == n_steps)
                take_sample(step * dt);
        }
        return traj;
    }

    // implicit midpoint: solve v = z + dt f((z+v)/2) by damped Newton, with
    // the Jacobian inverted through a low-rank (Woodbury) correction of the
    // constant pair-block part
    const int n_pairs = static_cast<int>(system.freqs.size());
    // M = I - (dt/2) A has 2x2 blocks ((1, -aw), (aw, 1)) per pair
    const double a = 0.5 * dt;
    auto apply_m_inv = [&](const Eigen::VectorXd& r) {
        Eigen::VectorXd out(r.size());
        for (int k = 0; k < n_pairs; ++k) {
            const double aw = a * system.freqs(k);
            const double det = 1.0 + aw * aw;
            out(2 * k) = (r(2 * k) + aw * r(2 * k + 1)) / det;
            out(2 * k + 1) = (-aw * r(2 * k) + r(2 * k + 1)) / det;
        }
        return out;
    };
    const int d = system.input_dim;
    const Eigen::MatrixXd m_inv_b =
        op.active ? [&] {
            Eigen::MatrixXd out(system.dim, d);
            for (int j = 0; j < d; ++j) out.col(j) = apply_m_inv(op.input_pairs.col(j));
            return out;
        }()
                  : Eigen::MatrixXd();

    for (int step = 1; step <= n_steps; ++step) {
        const Eigen::VectorXd z_old = z;
        Eigen::VectorXd v = z;  // Newton iterate for z_{n+1}
        auto residual = [&](const Eigen::VectorXd& vv) -> Eigen::VectorXd {
            const Eigen::VectorXd mid = 0.5 * (z_old + vv);
            Eigen::VectorXd f = apply_pair_generator(system.freqs, mid);
            if (op.active)
                f.noalias() -=
                    op.input_pairs * eval(phi, op.input_pairs.transpose() * mid);
            return vv - z_old - dt * f;
        };
        Eigen::VectorXd res = residual(v);
        const double tol = schedule.substep_tol * std::max(1.0, z_old.norm());
        bool converged = res.norm() <= tol;
        for (int iter = 0; iter < 50 && !converged; ++iter) {
            Eigen::VectorXd delta;
            if (op.active) {
                const Eigen::VectorXd w_mid =
                    op.input_pairs.transpose() * (0.5 * (z_old + v));
                const Eigen::MatrixXd dphi = phi_jacobian(phi, w_mid);
                // J = M + a B Dphi B^T; Woodbury against the prefactored M
                const Eigen::VectorXd m_inv_r = apply_m_inv(res);
                const Eigen::MatrixXd cap =
                    Eigen::MatrixXd::Identity(d, d) +
                    a * dphi * (op.input_pairs.transpose() * m_inv_b);
                delta = m_inv_r -
                        m_inv_b * cap.llt().solve(
                                      a * dphi *
                                      (op.input_pairs.transpose() * m_inv_r));
            } else {
                delta = apply_m_inv(res);
            }
            double lambda = 1.0;
            const double res_norm = res.norm();
            while (lambda > 1e-4) {
                const Eigen::VectorXd v_try = v - lambda * delta;
                const Eigen::VectorXd res_try = residual(v_try);
                if (res_try.norm() < res_norm || res_try.norm() <= tol) {
                    v = v_try;
                    res = res_try;
                    break;
                }
                lambda *= 0.5;
            }
            if (lambda <= 1e-4)
                throw std::runtime_error("integrate: Newton stalled at step " +
                                         std::to_string(step));
            converged = res.norm() <= tol;
        }
        if (!converged)
            throw std::runtime_error("integrate: Newton non-convergence at step " +
                                     std::to_string(step));
        const Eigen::VectorXd w_mid = op.active
                                          ? (op.input_pairs.transpose() *
                                             (0.5 * (z_old + v)))
                                                .eval()
                                          : Eigen::VectorXd();
        if (op.active)
            dissipation += dt * 2.0 * eval(phi, w_mid).dot(w_mid);  // midpoint rule
        z = v;
        if (step % schedule.sample_stride == 0 || step == n_steps)
            take_sample(step * dt);
    }
    return traj;
}

std::vector<double> energy_balance_residual(const Trajectory& trajectory) {
    std::vector<double> residual(trajectory.times.size());
    const double e0 = trajectory.norms.empty()
                          ? 0.0
                          : trajectory.norms.front() * trajectory.norms.front();
    for (size_t i = 0; i < trajectory.times.size(); ++i)
        residual[i] = trajectory.norms[i] * trajectory.norms[i] +
                      trajectory.dissipation[i] - e0;
    return residual;
}

namespace {
void format_float(std::ostream& out, double v) {
    char buf[40];
    snprintf(buf, sizeof(buf), "%.17g", v);
    out << buf;
}
}  // namespace

void write_trajectory_csv(const Trajectory& trajectory, std::ostream& out) {
    const int d = trajectory.w_samples.empty()
                      ? 1
                      : static_cast<int>(trajectory.w_samples.front().size());
    out << "t,norm,w1";
    if (d > 1) out << ",w2";
    out << ",dissipation,xdot_norm\n";
    for (size_t i = 0; i < trajectory.times.size(); ++i) {
        format_float(out, trajectory.times[i]);
        out << ',';
        format_float(out, trajectory.norms[i]);
        for (int j = 0; j < d; ++j) {
            out << ',';
            format_float(out, trajectory.w_samples[i](j));
        }
        out << ',';
        format_float(out, trajectory.dissipation[i]);
        out << ',';
        format_float(out, trajectory.xdot_norms[i]);
        out << '\n';
    }
}

}  // namespace nldecay
