#pragma once

#include "nldecay/damped_system.hpp"

#include <functional>

namespace nldecay {

/// Euler-Bernoulli beam on [0,1], clamped at x=0, with a rigid tip body
/// (mass m, inertia J) at x=1 damped through its translational and angular
/// velocities.
struct ScoleConfig {
    std::function<double(double)> EI = [](double) { return 1.0; };
    std::function<double(double)> rho = [](double) { return 1.0; };
    double m = 1.0;
    double J = 1.0;
    int elements = 64;
};

/// Multiplier profile for the tip-damping stability inequalities.
struct MultiplierConfig {
    std::function<double(double)> zeta;
    double a = 0.5;
    double b = 0.5;
    int grid_points = 201;
};

struct MultiplierReport {
    double max_density_expr;    // max over grid of 2(1-a) rho - (rho zeta)' + b
    double max_rigidity_expr;   // max of EI (1 - a - 2 zeta') + (EI zeta)'/2 + b
    bool pass;                  // both maxima strictly negative
};

/// Cubic Hermite Galerkin discretization of the SCOLE beam, transformed to
/// Euclidean-energy coordinates so the generator is exactly skew. B has two
/// columns; w = B* x = (tip deflection velocity, tip slope velocity).
DampedSystem build_scole_fem(const ScoleConfig& config);

/// Evaluates the two multiplier inequalities pointwise on a uniform grid
/// with central-difference derivatives. Requires zeta(0) = 0.
MultiplierReport check_multiplier_condition(const ScoleConfig& scole,
                                            const MultiplierConfig& mult);

}  // namespace nldecay
