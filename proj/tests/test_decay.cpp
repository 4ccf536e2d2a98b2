#include "nldecay/decay.hpp"
#include "nldecay/initial_data.hpp"
#include "nldecay/wave_model.hpp"

#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

using namespace nldecay;

namespace {

DampedSystem wave(int modes, double beta = 1.0) {
    WaveModelConfig cfg;
    cfg.modes = modes;
    cfg.beta = beta;
    return build_wave_modal(cfg);
}

// synthetic trajectory with norms f(t) on a uniform grid
Trajectory synthetic(double t_end, int samples, double (*f)(double)) {
    Trajectory traj;
    for (int i = 0; i <= samples; ++i) {
        const double t = t_end * i / samples;
        traj.times.push_back(t);
        traj.norms.push_back(f(t));
        traj.dissipation.push_back(0.0);
        traj.xdot_norms.push_back(0.0);
        traj.w_samples.push_back(Eigen::VectorXd::Zero(1));
    }
    return traj;
}

}  // namespace

TEST_CASE("fit_decay_exponent: exact power law is recovered to roundoff") {
    const Trajectory traj =
        synthetic(1000.0, 20000, [](double t) { return 5.0 * std::pow(t, -0.5); });
    const DecayReport rep = fit_decay_exponent(traj, 1.0, 1000.0);
    CHECK(std::abs(rep.theta_hat - 0.5) <= 1e-12);
    CHECK(rep.stderr_theta <= 1e-12);
    CHECK(!rep.window_truncated);
}

TEST_CASE("fit_decay_exponent: invariant under norm rescaling") {
    Trajectory a =
        synthetic(1000.0, 5000, [](double t) { return 5.0 * std::pow(t, -0.7); });
    Trajectory b = a;
    for (double& n : b.norms) n *= 37.5;
    const double ta = fit_decay_exponent(a, 1.0, 1000.0).theta_hat;
    const double tb = fit_decay_exponent(b, 1.0, 1000.0).theta_hat;
    CHECK(std::abs(ta - tb) <= 1e-13);
}

TEST_CASE("fit_decay_exponent: underflowed norms truncate the window and flag it") {
    const Trajectory traj =
        synthetic(800.0, 8000, [](double t) { return std::exp(-t); });
    const DecayReport rep = fit_decay_exponent(traj, 1.0, 800.0);
    CHECK(rep.window_truncated);
}

TEST_CASE("fit_decay_exponent: rejects degenerate windows") {
    const Trajectory traj =
        synthetic(100.0, 1000, [](double t) { return 1.0 / (1.0 + t); });
    CHECK_THROWS(fit_decay_exponent(traj, 50.0, 50.0));
}

TEST_CASE("sharpness_check: exact power law gives sup = tail = C") {
    const Trajectory traj =
        synthetic(1000.0, 20000, [](double t) { return 5.0 * std::pow(t, -0.5); });
    const auto [sup, tail] = sharpness_check(traj, 0.5, 1.0, 1000.0);
    CHECK(std::abs(sup - 5.0) <= 1e-10);
    CHECK(std::abs(tail - 5.0) <= 1e-10);
}

TEST_CASE("sharpness_check: exponential decay drives the scaled tail to zero") {
    const Trajectory traj =
        synthetic(200.0, 20000, [](double t) { return std::exp(-t); });
    const auto [sup, tail] = sharpness_check(traj, 0.5, 0.1, 200.0);
    CHECK(sup > 0.0);
    CHECK(tail <= 1e-6);
}

TEST_CASE("contraction_check: identical starts stay identical") {
    const DampedSystem sys = wave(16);
    const Eigen::VectorXd x0 = random_state(sys, 3);
    Schedule sched;
    sched.t_end = 10.0;
    sched.dt = 0.01;
    CHECK(contraction_check(sys, Nonlinearity::tanh_profile(), x0, x0, sched) == 0.0);
}

TEST_CASE("contraction_check: linear damping contracts pairs") {
    const DampedSystem sys = wave(32);
    const Eigen::VectorXd a = random_state(sys, 5);
    const Eigen::VectorXd b = random_state(sys, 6);
    Schedule sched;
    sched.t_end = 50.0;
    sched.dt = 0.01;
    const double inc = contraction_check(sys, Nonlinearity::identity(), a, b, sched);
    CHECK(inc <= 1e-10 * (b - a).norm());
}

TEST_CASE("contraction_check: tanh damping contracts pairs") {
    const DampedSystem sys = wave(32);
    const Eigen::VectorXd a = smooth_state(sys, 7);
    const Eigen::VectorXd b = random_state(sys, 8);
    Schedule sched;
    sched.t_end = 50.0;
    sched.dt = 0.01;
    const double inc =
        contraction_check(sys, Nonlinearity::tanh_profile(), a, b, sched);
    CHECK(inc <= 1e-9 * (b - a).norm());
}

TEST_CASE("derivative monotonicity: zero state and damped runs") {
    const DampedSystem sys = wave(16);
    Schedule sched;
    sched.t_end = 20.0;
    sched.dt = 0.01;
    sched.sample_stride = 10;
    const Trajectory rest = integrate(sys, Nonlinearity::tanh_profile(),
                                      Eigen::VectorXd::Zero(sys.dim), sched);
    for (double v : rest.xdot_norms) CHECK(v == 0.0);
    CHECK(derivative_monotonicity_check(rest) <= 0.0);

    const Eigen::VectorXd x0 = smooth_state(sys, 9);
    const Trajectory lin = integrate(sys, Nonlinearity::identity(), x0, sched);
    CHECK(derivative_monotonicity_check(lin) <= 1e-10 * lin.xdot_norms.front());
    const Trajectory tnh = integrate(sys, Nonlinearity::tanh_profile(), x0, sched);
    CHECK(derivative_monotonicity_check(tnh) <= 1e-9 * tnh.xdot_norms.front());
}

TEST_CASE("uniform_decay_profile: homogeneity of the linear flow") {
    const DampedSystem sys = wave(16);
    const Eigen::VectorXd x0 = smooth_state(sys, 11);
    Schedule sched;
    sched.t_end = 50.0;
    sched.dt = 0.01;
    sched.sample_stride = 10;
    const double r1 =
        uniform_decay_profile(sys, Nonlinearity::identity(), {x0}, sched, 1.0);
    const double r2 = uniform_decay_profile(sys, Nonlinearity::identity(),
                                            {x0, 2.0 * x0}, sched, 1.0);
    CHECK(std::abs(r1 - r2) <= 1e-12 * r1);
}

TEST_CASE("uniform_decay_profile: smooth batch shares one constant within a factor 5") {
    const DampedSystem sys = wave(32);
    std::vector<Eigen::VectorXd> batch;
    for (int k = 0; k < 10; ++k) batch.push_back(smooth_state(sys, 100 + k));
    Schedule sched;
    sched.t_end = 200.0;
    sched.dt = 0.01;
    sched.sample_stride = 20;
    double lo = 1e300, hi = 0.0;
    for (const auto& x0 : batch) {
        const double r =
            uniform_decay_profile(sys, Nonlinearity::identity(), {x0}, sched, 1.0);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(hi <= 5.0 * lo);
}

TEST_CASE("decay report CSV: key-value rows with stable keys") {
    DecayReport rep;
    rep.theta_hat = 0.5;
    rep.predicted = 0.5;
    std::ostringstream out;
    write_decay_csv(rep, out);
    const std::string text = out.str();
    CHECK(text.find("key,value\n") == 0);
    CHECK(text.find("theta_hat,0.5") != std::string::npos);
    CHECK(text.find("predicted,0.5") != std::string::npos);
    CHECK(text.find("window_truncated,0") != std::string::npos);
}
