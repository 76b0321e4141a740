#include "distinguisher.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "errors.hpp"
#include "parallel.hpp"

namespace ite {

SampleSet sample_from(const OutcomeDistribution& dist, int n, SeedPath seed) {
    if (n < 1) throw_invalid("sample_from needs N >= 1");
    const int m = static_cast<int>(dist.probs.size());
    std::vector<double> cdf(m);
    double acc = 0.0;
    for (int k = 0; k < m; ++k) {
        acc += dist.probs[k];
        cdf[k] = acc;
    }
    cdf[m - 1] = 1.0;  // guard the top edge against rounding
    RngStream rng(seed.master_seed, seed.stream_index);
    SampleSet s;
    s.m = m;
    s.labels.resize(n);
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform01();
        s.labels[i] =
            static_cast<int>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    }
    return s;
}

SampleSet canonical_relabel(const SampleSet& s) {
    SampleSet out;
    out.m = s.m;
    out.labels.reserve(s.labels.size());
    std::unordered_map<int, int> rank;
    for (int label : s.labels) {
        auto [it, inserted] = rank.try_emplace(label, static_cast<int>(rank.size()));
        out.labels.push_back(it->second);
    }
    return out;
}

CollisionSummary summarize_collisions(const SampleSet& s) {
    CollisionSummary c;
    c.n = static_cast<int>(s.labels.size());
    std::unordered_map<int, int> counts;
    for (int label : s.labels) ++counts[label];
    c.n_distinct = static_cast<int>(counts.size());
    c.has_collision = c.n_distinct < c.n;
    c.multiplicities.reserve(counts.size());
    const SampleSet canon = canonical_relabel(s);
    std::vector<int> mult(c.n_distinct, 0);
    for (int label : canon.labels) ++mult[label];
    c.multiplicities = std::move(mult);
    return c;
}

int pair_collision_count(const SampleSet& s) {
    const CollisionSummary c = summarize_collisions(s);
    int pairs = 0;
    for (int mult : c.multiplicities) pairs += mult * (mult - 1) / 2;
    return pairs;
}

double p_no_collision_uniform(std::int64_t m, std::int64_t n) {
    if (m < 1 || n < 0) throw_invalid("p_no_collision_uniform needs M >= 1, N >= 0");
    if (n > m) return 0.0;
    double log_p = 0.0;
    for (std::int64_t j = 1; j < n; ++j)
        log_p += std::log1p(-static_cast<double>(j) / static_cast<double>(m));
    return std::exp(log_p);
}

Posterior posterior_after_no_collision(std::int64_t m, std::int64_t n, double prior_m1,
                                       double max_prob_m2) {
    if (prior_m1 < 0.0 || prior_m1 > 1.0) throw_invalid("prior must be a probability");
    if (max_prob_m2 <= 0.0 || max_prob_m2 > 1.0)
        throw_invalid("max_prob_m2 must be in (0, 1]");
    const double like_m1 = p_no_collision_uniform(m, n);
    // Lower bound on Pr(no collision | m2): each new sample misses the at most
    // j previously seen outcomes, each of probability <= max_prob_m2.
    double log_lb = 0.0;
    bool lb_zero = false;
    for (std::int64_t j = 1; j < n; ++j) {
        const double miss = 1.0 - static_cast<double>(j) * max_prob_m2;
        if (miss <= 0.0) {
            lb_zero = true;
            break;
        }
        log_lb += std::log(miss);
    }
    const double like_m2_lo = lb_zero ? 0.0 : std::exp(log_lb);
    const auto bayes = [&](double like_m2) {
        const double num = like_m1 * prior_m1;
        const double den = num + like_m2 * (1.0 - prior_m1);
        return den > 0.0 ? num / den : prior_m1;
    };
    Posterior p;
    p.lo = bayes(1.0);         // m2 likelihood at its trivial upper bound
    p.hi = bayes(like_m2_lo);  // and at the product lower bound
    // Point estimate: plug in the lower bound. When max_prob_m2 = 1/M the
    // bound is the exact uniform likelihood and the posterior is the prior.
    p.p_m1 = p.hi;
    return p;
}

bool classify_m2_by_collisions(const SampleSet& s, double s2_m2, RngStream& tie_break) {
    const int n = static_cast<int>(s.labels.size());
    const double pairs = n * (n - 1) / 2.0;
    const double lambda1 = pairs / s.m;
    const double lambda2 = pairs * s2_m2;
    const int c = pair_collision_count(s);
    // Poisson log likelihood ratio ln P(c|m2) - ln P(c|m1).
    double llr;
    if (lambda1 <= 0.0 || lambda2 <= 0.0) {
        llr = 0.0;  // N < 2 carries no collision information
    } else {
        llr = c * std::log(lambda2 / lambda1) - (lambda2 - lambda1);
    }
    if (llr > 0.0) return true;
    if (llr < 0.0) return false;
    return tie_break.coin();
}

namespace {

double sum_p_squared(const OutcomeDistribution& dist) {
    double acc = 0.0;
    for (double p : dist.probs) acc += p * p;
    return acc;
}

OutcomeDistribution uniform_distribution(int m) {
    OutcomeDistribution d;
    d.probs.assign(m, 1.0 / m);
    return d;
}

std::vector<AccuracyRow> run_classifier_trials(
    int m, const std::vector<int>& n_grid, int n_trials, SeedPath seed,
    const std::function<bool(int n_samples, std::size_t trial, bool truth_is_m2)>& classify) {
    std::vector<AccuracyRow> rows;
    rows.reserve(n_grid.size());
    for (int n_samples : n_grid) {
        std::vector<char> correct(n_trials);
        parallel_for_index(static_cast<std::size_t>(n_trials), [&](std::size_t trial) {
            RngStream coin(seed.master_seed, seed.stream_index + 4 * trial);
            const bool truth_is_m2 = coin.coin();
            correct[trial] = classify(n_samples, trial, truth_is_m2) == truth_is_m2;
        });
        AccuracyRow row;
        row.n_samples = n_samples;
        row.n_trials = n_trials;
        int hits = 0;
        for (char c : correct) hits += c;
        row.accuracy = static_cast<double>(hits) / n_trials;
        row.stderr_mean = std::sqrt(row.accuracy * (1.0 - row.accuracy) / n_trials);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

std::vector<AccuracyRow> advantage_experiment(int m, const std::vector<int>& n_grid,
                                              const M2Source& m2_source, int n_trials,
                                              SeedPath seed) {
    if (n_trials < 2) throw_invalid("advantage_experiment needs n_trials >= 2");
    // Calibrate the classifier's m2 collision rate from dedicated draws.
    const std::uint64_t calib_base = seed.stream_index + 4ull * n_trials;
    constexpr int kCalibDraws = 32;
    double s2_m2 = 0.0;
    for (int i = 0; i < kCalibDraws; ++i)
        s2_m2 += sum_p_squared(m2_source(SeedPath{seed.master_seed, calib_base + i}));
    s2_m2 /= kCalibDraws;
    const OutcomeDistribution uniform = uniform_distribution(m);
    return run_classifier_trials(
        m, n_grid, n_trials, seed, [&](int n_samples, std::size_t trial, bool truth_is_m2) {
            const std::uint64_t base = seed.stream_index + 4 * trial;
            OutcomeDistribution dist =
                truth_is_m2 ? m2_source(SeedPath{seed.master_seed, base + 1}) : uniform;
            const SampleSet s = sample_from(dist, n_samples, SeedPath{seed.master_seed, base + 2});
            RngStream ties(seed.master_seed, base + 3);
            return classify_m2_by_collisions(s, s2_m2, ties);
        });
}

std::vector<AccuracyRow> oracle_classifier_accuracy(int m, const std::vector<int>& n_grid,
                                                    const OutcomeDistribution& m2_dist,
                                                    int n_trials, SeedPath seed) {
    if (n_trials < 2) throw_invalid("oracle_classifier_accuracy needs n_trials >= 2");
    const OutcomeDistribution uniform = uniform_distribution(m);
    const double log_uniform = -std::log(static_cast<double>(m));
    return run_classifier_trials(
        m, n_grid, n_trials, seed, [&](int n_samples, std::size_t trial, bool truth_is_m2) {
            const std::uint64_t base = seed.stream_index + 4 * trial;
            const OutcomeDistribution& dist = truth_is_m2 ? m2_dist : uniform;
            const SampleSet s = sample_from(dist, n_samples, SeedPath{seed.master_seed, base + 2});
            double llr = 0.0;  // ln P(samples|m2) - ln P(samples|m1)
            for (int label : s.labels) {
                const double p = m2_dist.probs[label];
                if (p <= 0.0) return false;  // sample impossible under m2
                llr += std::log(p) - log_uniform;
            }
            if (llr > 0.0) return true;
            if (llr < 0.0) return false;
            RngStream ties(seed.master_seed, base + 3);
            return ties.coin();
        });
}

M2Source dirichlet_m2_generator(int m, double c) {
    if (m < 2) throw_invalid("dirichlet generator needs M >= 2");
    if (c <= 0.0 || c >= m - 1) throw_invalid("dirichlet generator needs 0 < c < M-1");
    // Symmetric Dirichlet(alpha) has Var(p_k) = (M-1)/(M^2 (M alpha + 1)); set
    // it equal to c/M^2.
    const double alpha = ((m - 1) / c - 1.0) / m;
    return [m, alpha](SeedPath seed) {
        RngStream rng(seed.master_seed, seed.stream_index);
        OutcomeDistribution d;
        d.probs.resize(m);
        double total = 0.0;
        for (int k = 0; k < m; ++k) {
            d.probs[k] = rng.gamma(alpha);
            total += d.probs[k];
        }
        for (double& p : d.probs) p /= total;
        return d;
    };
}

std::vector<OutcomeDistribution> quantum_plateau_pool(const EnsembleSpec& spec, double t,
                                                      int pool_size, std::uint64_t master_seed) {
    if (pool_size < 1) throw_invalid("pool_size must be >= 1");
    EnsembleSpec raw = spec;
    const bool rescale = raw.normalize;
    raw.normalize = false;
    std::vector<OutcomeDistribution> pool(pool_size);
    parallel_for_index(static_cast<std::size_t>(pool_size), [&](std::size_t i) {
        const DenseHermitian h = sample_hamiltonian(raw, SeedPath{master_seed, i});
        Spectrum s = diagonalize(h);
        if (rescale) s = s.scaled_to_unit_norm();
        pool[i] = evolve_probabilities(s, /*x=*/0, t);
    });
    return pool;
}

M2Source pool_m2_generator(std::vector<OutcomeDistribution> pool) {
    if (pool.empty()) throw_invalid("pool must be nonempty");
    return [pool = std::move(pool)](SeedPath seed) {
        RngStream rng(seed.master_seed, seed.stream_index);
        return pool[rng.uniform_below(pool.size())];
    };
}

}  // namespace ite
