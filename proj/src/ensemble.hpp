#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dynamics.hpp"
#include "operators.hpp"

namespace ite {

// Monte Carlo over an ensemble of Hamiltonians: trial i draws with
// stream_index = i, so retained values are independent of worker count.
struct EnsembleRunConfig {
    EnsembleSpec spec;
    int n_trials = 50;
    int x = 0;  // initial basis outcome
    std::vector<double> eval_times;
    std::uint64_t master_seed = 0;
};

// Per-time moments of the outcome variance V_k over the ensemble.
struct MomentRow {
    double time = 0.0;
    double mean = 0.0;        // sample mean of V_k across trials
    double variance = 0.0;    // unbiased sample variance across trials
    double stderr_mean = 0.0;
    double stderr_var = 0.0;  // fourth-moment estimator
    std::vector<double> trial_values;  // retained, in trial order
};

struct EnsembleMoments {
    int dim = 0;
    int n_trials = 0;
    int n_failed = 0;
    std::vector<MomentRow> per_time;
};

// Diagonalizes n_trials sampled Hamiltonians and reports mean/variance of
// V_k{Pr(k|rho(t))} at each eval time. A trial whose eigensolver fails is
// dropped; more than 1% dropped fails the whole run.
EnsembleMoments ensemble_outcome_moments(const EnsembleRunConfig& config);

// Trial-averaged escape curve on config.eval_times plus its estimated
// equilibration time (slope maximum of the smoothed mean curve).
std::pair<TimeSeries, double> ensemble_escape_curve(const EnsembleRunConfig& config);

struct ScalingFit {
    double exponent = 0.0;
    double log_prefactor = 0.0;  // natural log of the prefactor
    double r_squared = 0.0;
    std::vector<std::pair<double, double>> points;  // (D, value)
};

// Least squares of ln(value) against ln(D). Needs >= 3 points, all positive.
ScalingFit fit_power_law(const std::vector<std::pair<double, double>>& points);

// Chebyshev bound min(1, variance / epsilon^2) on Pr(|V_k - mean| >= epsilon).
double chebyshev_tail(double mean, double variance, double epsilon);

enum class Term44Mode { Fixed, Averaged };

struct Term44Stats {
    double mean = 0.0;
    double variance = 0.0;
    double stderr_mean = 0.0;
    int n_trials = 0;
};

// Ensemble statistics of the dominant long-time term |C_kb|^4 |C_xb|^4 of the
// squared outcome probability. Fixed mode uses b = 0 and the smallest k != x;
// Averaged mode averages over all b (and all k != x) per trial.
Term44Stats term44_statistics(const EnsembleRunConfig& config, Term44Mode b_mode,
                              Term44Mode k_mode);

// The reduced per-trial term value, exposed for oracle tests against the
// explicit eight-fold tensor contraction at small D.
double term44_value(const Eigen::MatrixXcd& basis, int k, int x, int b);

}  // namespace ite
