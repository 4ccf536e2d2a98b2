#pragma once

#include "nldecay/damped_system.hpp"

#include <iosfwd>
#include <vector>

namespace nldecay {

enum class ResolventMethod { Woodbury, Dense };

/// ||(is - A + kappa B B*)^{-1}||. Woodbury works on the eigenbasis of A and
/// extracts the norm by power iteration (falls back to dense on stagnation);
/// Dense builds the complex matrix and takes a full SVD. Throws a singularity
/// error when kappa = 0 and s hits an eigenvalue.
double resolvent_norm(const DampedSystem& system, double kappa, double s,
                      ResolventMethod method = ResolventMethod::Woodbury);

struct ResolventCurve {
    std::vector<double> s_values;
    std::vector<double> norms;
    double envelope_slope;      // fitted exponent of the local-maxima envelope
    double envelope_stderr;
    double kappa;
    std::vector<double> peak_s;     // local maxima used by the fit
    std::vector<double> peak_norms;
};

/// Samples the resolvent norm on a grid with >= grid_density points between
/// consecutive eigenfrequencies, restricted to [s_min, min(s_max, 0.5 s_N)],
/// and fits log(norm) vs log(s) on the local maxima. Throws when fewer than
/// 5 maxima are available.
ResolventCurve resolvent_growth_fit(const DampedSystem& system, double kappa,
                                    double s_min, double s_max,
                                    int grid_density = 20);

/// Max real part of spec(A - kappa B B*), by dense eigendecomposition.
double spectral_abscissa(const DampedSystem& system, double kappa);

/// Min over distinct eigenvalue pairs of |s_j - s_k|. Throws when a repeated
/// eigenvalue (within 1e-10) violates the gap hypothesis.
double eigen_gap(const DampedSystem& system);

/// min_k (1 + |s_k|^beta) ||B* e_k||.
double wavepacket_margin(const DampedSystem& system, double beta);

struct ObservabilityReport {
    double tau;
    double beta;
    double c_tau;     // smallest eigenvalue of the pencil (G, W)
    double gap;       // min eigenvalue separation
    int N_used;       // truncation order (number of modes)
    bool ingham_regime;  // tau > 2 pi / gap
};

/// Observability constant of int_0^tau ||B* T(t) x0||^2 dt against
/// ||(I-A)^{-beta} x0||^2, realized as the extremal eigenvalue of the
/// Hermitian pencil (G, W) on the eigenbasis with closed-form Gramian
/// entries and W = diag((1 + s_k^2)^{-beta}).
ObservabilityReport observability_constant(const DampedSystem& system, double tau,
                                           double beta);

void write_resolvent_csv(const ResolventCurve& curve, std::ostream& out);
void write_observability_csv(const ObservabilityReport& report, std::ostream& out);

}  // namespace nldecay
