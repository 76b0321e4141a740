#include "gue.hpp"

#include <algorithm>
#include <cmath>

#include "dynamics.hpp"
#include "errors.hpp"
#include "operators.hpp"
#include "parallel.hpp"

namespace ite {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Power series sum_k (-1)^k (x/2)^(2k+1) / (k! (k+1)!). Below the crossover
// the largest term is ~1e4, so cancellation keeps the absolute error under
// ~1e-11 in double precision.
double j1_series(double x) {
    const double h = x / 2.0;
    double term = h;
    double acc = h;
    for (int k = 1; k < 200; ++k) {
        term *= -h * h / (static_cast<double>(k) * (k + 1));
        acc += term;
        if (std::abs(term) < 1e-18 * (1.0 + std::abs(acc))) break;
    }
    return acc;
}

// Hankel expansion: J1(x) = sqrt(2/(pi x)) [cos(w) P - sin(w) Q],
// w = x - 3pi/4, with a_k(1) = a_{k-1} (4 - (2k-1)^2)/(8k). The series is
// asymptotic; terms shrink until k ~ 2x, far below 1e-16 at the crossover.
double j1_asymptotic(double x) {
    double p = 0.0, q = 0.0;
    double a = 1.0;           // a_k / x^k
    double prev = 1e300;
    for (int k = 0; k < 80; ++k) {
        if (k > 0) a *= (4.0 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
        const double mag = std::abs(a);
        if (mag > prev) break;  // asymptotic series started diverging
        prev = mag;
        const int m = k / 2;
        const double signed_term = (m % 2 == 0) ? a : -a;
        if (k % 2 == 0)
            p += signed_term;
        else
            q += signed_term;
        if (mag < 1e-18) break;
    }
    const double w = x - 0.75 * kPi;
    return std::sqrt(2.0 / (kPi * x)) * (std::cos(w) * p - std::sin(w) * q);
}

constexpr double kJ1Crossover = 12.0;

}  // namespace

double bessel_j1(double x) {
    if (x < 0) throw_invalid("bessel_j1 requires x >= 0");
    return x < kJ1Crossover ? j1_series(x) : j1_asymptotic(x);
}

double gamma_analytic(double t, int dim) {
    if (dim < 2) throw_invalid("gamma_analytic requires D >= 2");
    const double d = dim;
    const double r = std::sqrt(2.0 * d);
    if (t == 0.0) return d * d;
    // Level-repulsion deficit: the sine-kernel correlation integrated over a
    // semicircle density of width 2*sqrt(2D).  For t below the Heisenberg
    // scale 2*sqrt(2D) the deficit is
    //   I(t) = (1/pi) * (2D asin(w/r) - t w / 2),   w = sqrt(2D - t^2/4),
    // which interpolates from I(0) = D down to zero at the plateau.
    double deficit = 0.0;
    if (t < 2.0 * r) {
        const double w = std::sqrt(2.0 * d - t * t / 4.0);
        deficit = (2.0 * d * std::asin(w / r) - t * w / 2.0) / kPi;
    }
    const double j = bessel_j1(r * t);
    return d + 2.0 * d * j * j / (t * t) - deficit;
}

double asymptotic_validity_cutoff(int dim) {
    return 0.5 * std::pow(static_cast<double>(dim), -1.0 / 6.0);
}

FormFactorCurve gamma_curve(int dim, const std::vector<double>& times) {
    FormFactorCurve c;
    c.dim = dim;
    c.times = times;
    c.analytic.reserve(times.size());
    for (double t : times) c.analytic.push_back(gamma_analytic(t, dim));
    return c;
}

std::vector<std::vector<double>> sample_gue_spectra(int dim, int n_samples, SeedPath seed) {
    std::vector<std::vector<double>> spectra(n_samples);
    parallel_for_index(static_cast<std::size_t>(n_samples), [&](std::size_t s) {
        const DenseHermitian h =
            sample_gue(dim, 0.5, SeedPath{seed.master_seed, seed.stream_index + s});
        const Spectrum spec = diagonalize(h);
        spectra[s].assign(spec.energies.data(), spec.energies.data() + dim);
    });
    return spectra;
}

namespace {

std::complex<double> trace_phase(const std::vector<double>& energies, double t) {
    std::complex<double> acc = 0.0;
    for (double e : energies) acc += std::polar(1.0, -t * e);
    return acc;
}

}  // namespace

FormFactorCurve gamma_monte_carlo(int dim, const std::vector<double>& times, int n_samples,
                                  SeedPath seed) {
    if (n_samples < 2) throw_invalid("gamma_monte_carlo needs n_samples >= 2");
    const auto spectra = sample_gue_spectra(dim, n_samples, seed);
    FormFactorCurve c = gamma_curve(dim, times);
    c.mc_mean.resize(times.size());
    c.mc_stderr.resize(times.size());
    std::vector<double> values(n_samples);
    for (std::size_t i = 0; i < times.size(); ++i) {
        parallel_for_index(static_cast<std::size_t>(n_samples), [&](std::size_t s) {
            values[s] = std::norm(trace_phase(spectra[s], times[i]));
        });
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= n_samples;
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        c.mc_mean[i] = mean;
        c.mc_stderr[i] = std::sqrt(ss / (n_samples - 1.0) / n_samples);
    }
    return c;
}

double t_eq_gue(int dim, double c) {
    if (dim < 4) throw_invalid("t_eq_gue requires D >= 4");
    if (c <= 0) throw_invalid("t_eq_gue requires c > 0");
    const double d = dim;
    const double r = std::sqrt(2.0 * d);
    // |J1(x)|^2 <= 2/(pi x), so the oscillatory term is bounded by
    // (2 sqrt(2) sqrt(D) / pi) t^-3; beyond t_env it cannot exceed c*D.
    const double t_env = std::cbrt(2.0 * std::sqrt(2.0) / (kPi * c * std::sqrt(d)));
    const double step = kPi / (16.0 * r);  // 16 points per Bessel lobe
    const auto bessel_term = [&](double t) {
        const double j = bessel_j1(r * t);
        return 2.0 * d * j * j / (t * t);
    };
    double last_above = 0.0;
    for (double t = step; t <= t_env + step; t += step)
        if (bessel_term(t) > c * d) last_above = t;
    return last_above + step;
}

DeltaCurve delta_monte_carlo(int dim, const std::vector<double>& times, int n_samples,
                             SeedPath seed) {
    if (n_samples < 2) throw_invalid("delta_monte_carlo needs n_samples >= 2");
    const auto spectra = sample_gue_spectra(dim, n_samples, seed);
    DeltaCurve c;
    c.dim = dim;
    c.times = times;
    c.mean.resize(times.size());
    c.stderr_mean.resize(times.size());
    std::vector<std::complex<double>> values(n_samples);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        parallel_for_index(static_cast<std::size_t>(n_samples), [&](std::size_t s) {
            const std::complex<double> mu_t = trace_phase(spectra[s], t);
            const std::complex<double> mu_m2t = trace_phase(spectra[s], -2.0 * t);
            values[s] = mu_t * mu_t * mu_m2t;
        });
        std::complex<double> mean = 0.0;
        for (const auto& v : values) mean += v;
        mean /= static_cast<double>(n_samples);
        double ss = 0.0;
        for (const auto& v : values) ss += std::norm(v - mean);
        c.mean[i] = mean;
        c.stderr_mean[i] = std::sqrt(ss / (n_samples - 1.0) / n_samples);
    }
    return c;
}

double semicircle_density(double energy, int dim) {
    const double support = 2.0 * dim;
    const double e2 = energy * energy;
    if (e2 >= support) return 0.0;
    return std::sqrt(support - e2) / kPi;
}

}  // namespace ite
