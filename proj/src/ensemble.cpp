#include "ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "errors.hpp"
#include "parallel.hpp"

namespace ite {

namespace {

struct TrialOutcome {
    bool ok = false;
    std::vector<double> values;  // one per eval time (or single scalar uses [0])
};

// Samples trial `i`, diagonalizes once, and hands the (possibly energy-
// rescaled) spectrum to `eval`. Sampling always happens unnormalized so the
// spectral norm comes free from the one eigendecomposition.
template <typename Eval>
std::vector<TrialOutcome> run_trials(const EnsembleRunConfig& config, Eval eval) {
    if (config.n_trials < 2) throw_invalid("ensemble runs need n_trials >= 2");
    EnsembleSpec raw = config.spec;
    const bool rescale = raw.normalize;
    raw.normalize = false;
    std::vector<TrialOutcome> out(config.n_trials);
    parallel_for_index(static_cast<std::size_t>(config.n_trials), [&](std::size_t i) {
        try {
            const DenseHermitian h =
                sample_hamiltonian(raw, SeedPath{config.master_seed, i});
            Spectrum spec = diagonalize(h);
            if (rescale) spec = spec.scaled_to_unit_norm();
            out[i].values = eval(spec, i);
            out[i].ok = true;
        } catch (const Error&) {
            out[i].ok = false;
        }
    });
    int failed = 0;
    for (const auto& t : out)
        if (!t.ok) ++failed;
    if (failed * 100 > config.n_trials)
        throw_numeric("more than 1% of ensemble trials failed (" + std::to_string(failed) + "/" +
                      std::to_string(config.n_trials) + ")");
    return out;
}

void fill_moment_stats(MomentRow& row) {
    const auto& v = row.trial_values;
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double x : v) {
        const double d = x - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double s2 = m2 / (n - 1.0);
    row.mean = mean;
    row.variance = s2;
    row.stderr_mean = std::sqrt(s2 / n);
    // Var(s^2) ~ (m4/n - (n-3)/(n-1) s^4) / n, the distribution-free estimate.
    const double var_s2 = std::max(0.0, (m4 / n - (n - 3.0) / (n - 1.0) * s2 * s2) / n);
    row.stderr_var = std::sqrt(var_s2);
}

}  // namespace

EnsembleMoments ensemble_outcome_moments(const EnsembleRunConfig& config) {
    if (config.eval_times.empty()) throw_invalid("eval_times must be nonempty");
    const auto trials = run_trials(config, [&](const Spectrum& spec, std::size_t) {
        std::vector<double> values;
        values.reserve(config.eval_times.size());
        for (double t : config.eval_times)
            values.push_back(outcome_variance(evolve_probabilities(spec, config.x, t)));
        return values;
    });
    EnsembleMoments m;
    m.dim = config.spec.dimension();
    m.n_trials = config.n_trials;
    m.per_time.resize(config.eval_times.size());
    for (std::size_t i = 0; i < config.eval_times.size(); ++i) {
        MomentRow& row = m.per_time[i];
        row.time = config.eval_times[i];
        for (const auto& t : trials)
            if (t.ok) row.trial_values.push_back(t.values[i]);
        fill_moment_stats(row);
    }
    for (const auto& t : trials)
        if (!t.ok) ++m.n_failed;
    return m;
}

std::pair<TimeSeries, double> ensemble_escape_curve(const EnsembleRunConfig& config) {
    if (config.eval_times.size() < 16)
        throw_invalid("escape-curve estimation needs >= 16 eval times");
    const auto trials = run_trials(config, [&](const Spectrum& spec, std::size_t) {
        return escape_curve(spec, config.x, config.eval_times).values;
    });
    TimeSeries mean;
    mean.times = config.eval_times;
    mean.values.assign(config.eval_times.size(), 0.0);
    int kept = 0;
    for (const auto& t : trials) {
        if (!t.ok) continue;
        ++kept;
        for (std::size_t i = 0; i < t.values.size(); ++i) mean.values[i] += t.values[i];
    }
    for (double& v : mean.values) v /= kept;
    return {mean, estimate_t_eq(mean)};
}

ScalingFit fit_power_law(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw_invalid("power-law fit needs >= 3 points");
    ScalingFit fit;
    fit.points = points;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    const double n = static_cast<double>(points.size());
    for (const auto& [d, v] : points) {
        if (v <= 0 || d <= 0) throw_invalid("power-law fit needs positive coordinates");
        const double x = std::log(d), y = std::log(v);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        syy += y * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom <= 0) throw_invalid("power-law fit needs >= 2 distinct D values");
    fit.exponent = (n * sxy - sx * sy) / denom;
    fit.log_prefactor = (sy - fit.exponent * sx) / n;
    const double ss_tot = syy - sy * sy / n;
    double ss_res = 0;
    for (const auto& [d, v] : points) {
        const double r = std::log(v) - (fit.log_prefactor + fit.exponent * std::log(d));
        ss_res += r * r;
    }
    fit.r_squared = ss_tot > 0 ? std::max(0.0, 1.0 - ss_res / ss_tot) : 1.0;
    return fit;
}

double chebyshev_tail(double /*mean*/, double variance, double epsilon) {
    if (variance < 0) throw_invalid("variance must be nonnegative");
    if (epsilon <= 0) throw_invalid("epsilon must be positive");
    return std::min(1.0, variance / (epsilon * epsilon));
}

double term44_value(const Eigen::MatrixXcd& basis, int k, int x, int b) {
    const double ck = std::norm(basis(k, b));
    const double cx = std::norm(basis(x, b));
    return ck * ck * cx * cx;
}

Term44Stats term44_statistics(const EnsembleRunConfig& config, Term44Mode b_mode,
                              Term44Mode k_mode) {
    const int dim = config.spec.dimension();
    const int x = config.x;
    const auto trials = run_trials(config, [&](const Spectrum& spec, std::size_t) {
        double acc = 0.0;
        int count = 0;
        const int b_hi = (b_mode == Term44Mode::Fixed) ? 1 : dim;
        for (int b = 0; b < b_hi; ++b) {
            if (k_mode == Term44Mode::Fixed) {
                const int k = (x == 0) ? 1 : 0;
                acc += term44_value(spec.basis, k, x, b);
                ++count;
            } else {
                for (int k = 0; k < dim; ++k) {
                    if (k == x) continue;
                    acc += term44_value(spec.basis, k, x, b);
                    ++count;
                }
            }
        }
        return std::vector<double>{acc / count};
    });
    MomentRow row;
    for (const auto& t : trials)
        if (t.ok) row.trial_values.push_back(t.values[0]);
    fill_moment_stats(row);
    Term44Stats stats;
    stats.mean = row.mean;
    stats.variance = row.variance;
    stats.stderr_mean = row.stderr_mean;
    stats.n_trials = static_cast<int>(row.trial_values.size());
    return stats;
}

}  // namespace ite
