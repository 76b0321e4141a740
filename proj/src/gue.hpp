#pragma once

#include <complex>
#include <vector>

#include "rng.hpp"

namespace ite {

// Analytic and Monte Carlo spectral form-factor statistics for the Gaussian
// unitary ensemble at sigma^2 = 1/2 (semicircle support [-sqrt(2D), sqrt(2D)]).

struct FormFactorCurve {
    int dim = 0;
    std::vector<double> times;
    std::vector<double> analytic;   // Gamma(t, D)
    std::vector<double> mc_mean;    // empty unless Monte Carlo was run
    std::vector<double> mc_stderr;
};

struct DeltaCurve {
    int dim = 0;
    std::vector<double> times;
    std::vector<std::complex<double>> mean;  // E[mu(t)^2 mu(-2t)]
    std::vector<double> stderr_mean;         // combined re/im standard error
};

// J_1, Bessel function of the first kind. Power series below the crossover,
// Hankel asymptotic expansion above; absolute error < 1e-10 on [0, 1e4].
double bessel_j1(double x);

// Large-D spectral form factor E[|tr exp(-iHt)|^2] for the Gaussian unitary
// ensemble with semicircle support [-sqrt(2D), sqrt(2D)]:
//   Gamma(t, D) = D + 2D J1(sqrt(2D) t)^2 / t^2 - I(t),
//   I(t) = (2D asin(w / sqrt(2D)) - t w / 2) / pi,  w = sqrt(2D - t^2 / 4),
// with I(t) = 0 once t >= 2 sqrt(2D) (plateau). The deficit I(t) is the
// sine-kernel level-repulsion correlation integrated over the semicircle;
// it makes the t = 0 value exactly D^2 and ramps linearly up to the plateau.
double gamma_analytic(double t, int dim);

// Below this time the large-D asymptotic is not trusted: 0.5 * D^(-1/6).
double asymptotic_validity_cutoff(int dim);

// Analytic curve over a grid.
FormFactorCurve gamma_curve(int dim, const std::vector<double>& times);

// E[|mu(t)|^2] over n_samples GUE spectra; also fills the analytic column.
// Consumes seed streams [stream_index, stream_index + n_samples).
FormFactorCurve gamma_monte_carlo(int dim, const std::vector<double>& times, int n_samples,
                                  SeedPath seed);

// Smallest grid time after which the oscillatory term 2D J1^2/t^2 stays at or
// below c*D (grid resolves the sqrt(2D)-frequency lobes; an amplitude
// envelope guarantees the tail beyond the grid).
double t_eq_gue(int dim, double c = 1.0);

// E[mu(t)^2 mu(-2t)] over GUE spectra with per-time standard errors.
DeltaCurve delta_monte_carlo(int dim, const std::vector<double>& times, int n_samples,
                             SeedPath seed);

// Mean level density sqrt(2D - E^2)/pi on the support, 0 outside; integrates
// to D.
double semicircle_density(double energy, int dim);

// Eigenvalues of n_samples independent GUE(dim, 1/2) draws, ascending, one
// vector per sample; deterministic in (seed, sample index).
std::vector<std::vector<double>> sample_gue_spectra(int dim, int n_samples, SeedPath seed);

}  // namespace ite
