#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "dynamics.hpp"
#include "operators.hpp"
#include "rng.hpp"

namespace ite {

// Hypothesis test between a uniform source (model m1) and a near-uniform
// source (model m2) from samples alone, where repeated outcomes (collisions)
// are the only label-invariant evidence.

struct SampleSet {
    int m = 0;  // outcome-space size
    std::vector<int> labels;
};

struct CollisionSummary {
    int n = 0;
    int n_distinct = 0;
    bool has_collision = false;
    std::vector<int> multiplicities;  // multiplicities[i] = count of the i-th distinct label
};

struct Posterior {
    double p_m1 = 0.5;  // plug-in point estimate (= hi)
    double lo = 0.0;    // posterior interval from the m2-likelihood bound
    double hi = 1.0;
    double p_m2() const { return 1.0 - p_m1; }
};

// N i.i.d. draws by inverse CDF on the cumulative array; deterministic per seed.
SampleSet sample_from(const OutcomeDistribution& dist, int n, SeedPath seed);

// First-occurrence-order relabeling: the first outcome becomes 0, the second
// distinct outcome 1, and so on. Idempotent; preserves collision structure.
SampleSet canonical_relabel(const SampleSet& s);

CollisionSummary summarize_collisions(const SampleSet& s);

// Number of colliding pairs: sum over labels of C(multiplicity, 2).
int pair_collision_count(const SampleSet& s);

// Exact probability that N uniform draws from M outcomes are all distinct,
// evaluated in the log domain; 0 for N > M.
double p_no_collision_uniform(std::int64_t m, std::int64_t n);

// Bayes update after observing "all N samples distinct". The m1 likelihood is
// exact; the m2 likelihood is only bounded below by prod_j (1 - j*max_prob_m2)
// (and above by 1), so the posterior is an interval [lo, hi]; the point
// estimate plugs in the lower bound, which reduces to the prior when
// max_prob_m2 = 1/M.
Posterior posterior_after_no_collision(std::int64_t m, std::int64_t n, double prior_m1,
                                       double max_prob_m2);

// Collision-count likelihood-ratio classifier: compares Poisson pair-collision
// rates lambda1 = C(N,2)/M against lambda2 = C(N,2)*s2_m2, where s2_m2 is the
// m2 source's mean collision probability sum_k p_k^2. Returns true for "m2".
// Ties are broken by a fair coin from `tie_break`.
bool classify_m2_by_collisions(const SampleSet& s, double s2_m2, RngStream& tie_break);

struct AccuracyRow {
    int n_samples = 0;
    double accuracy = 0.0;
    double stderr_mean = 0.0;
    int n_trials = 0;
};

using M2Source = std::function<OutcomeDistribution(SeedPath)>;

// Empirical distinguishing accuracy of the collision classifier. Per trial: a
// fair coin picks the true model, N samples are drawn, the classifier votes.
// The classifier's s2_m2 is calibrated once from 32 dedicated m2 draws.
// Stream layout: trial i uses streams base+4i (coin/ties), +1 (m2 draw),
// +2 (sampling); calibration uses streams past base+4*n_trials.
std::vector<AccuracyRow> advantage_experiment(int m, const std::vector<int>& n_grid,
                                              const M2Source& m2_source, int n_trials,
                                              SeedPath seed);

// Full-likelihood classifier that knows the m2 probability table: compares
// prod_i p(k_i) against M^-N in the log domain. This is the "pre-computation"
// route the sampling bound does not cover.
std::vector<AccuracyRow> oracle_classifier_accuracy(int m, const std::vector<int>& n_grid,
                                                    const OutcomeDistribution& m2_dist,
                                                    int n_trials, SeedPath seed);

// Symmetric-Dirichlet surrogate for m2 with outcome variance c/M^2: the
// concentration is alpha = ((M-1)/c - 1)/M per coordinate. Requires c < M-1.
M2Source dirichlet_m2_generator(int m, double c);

// Quantum m2 distributions: pool_size spectra of the given ensemble evolved to
// time t from basis state x = 0. Each generator call picks a pool entry by its
// stream index (cheap once the pool is built).
std::vector<OutcomeDistribution> quantum_plateau_pool(const EnsembleSpec& spec, double t,
                                                      int pool_size, std::uint64_t master_seed);

M2Source pool_m2_generator(std::vector<OutcomeDistribution> pool);

}  // namespace ite
