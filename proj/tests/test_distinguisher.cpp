#include <cmath>

#include "distinguisher.hpp"
#include "doctest.h"
#include "errors.hpp"

using namespace ite;

namespace {

OutcomeDistribution uniform_dist(int m) {
    OutcomeDistribution d;
    d.probs.assign(m, 1.0 / m);
    return d;
}

}  // namespace

TEST_CASE("sampling from a delta distribution") {
    OutcomeDistribution d;
    d.probs.assign(8, 0.0);
    d.probs[5] = 1.0;
    const SampleSet s = sample_from(d, 20, {1, 0});
    CHECK(s.m == 8);
    for (int label : s.labels) CHECK(label == 5);
    CHECK(pair_collision_count(s) == 20 * 19 / 2);
}

TEST_CASE("sampling is deterministic and roughly unbiased") {
    const auto d = uniform_dist(4);
    const SampleSet a = sample_from(d, 4000, {9, 3});
    const SampleSet b = sample_from(d, 4000, {9, 3});
    CHECK(a.labels == b.labels);
    int counts[4] = {0, 0, 0, 0};
    for (int label : a.labels) ++counts[label];
    for (int c : counts) CHECK(std::abs(c - 1000) < 160);  // ~5.8 sigma
}

TEST_CASE("canonical relabeling") {
    SampleSet s;
    s.m = 10;
    s.labels = {7, 7, 3};
    const SampleSet c = canonical_relabel(s);
    CHECK(c.labels == std::vector<int>{0, 0, 1});
    // Idempotent.
    CHECK(canonical_relabel(c).labels == c.labels);

    // Invariance: collision statistics survive any relabeling.
    SampleSet permuted;
    permuted.m = 10;
    permuted.labels = {2, 2, 9};
    CHECK(canonical_relabel(permuted).labels == c.labels);
    CHECK(pair_collision_count(permuted) == pair_collision_count(s));

    const CollisionSummary sum = summarize_collisions(c);
    CHECK(sum.n == 3);
    CHECK(sum.n_distinct == 2);
    CHECK(sum.has_collision);
    CHECK(sum.multiplicities == std::vector<int>{2, 1});
}

TEST_CASE("no-collision probability") {
    // The classic birthday value.
    CHECK(std::abs(p_no_collision_uniform(365, 23) - 0.4927) < 1e-4);
    CHECK(p_no_collision_uniform(100, 1) == 1.0);
    CHECK(p_no_collision_uniform(5, 6) == 0.0);
    CHECK(p_no_collision_uniform(5, 5) > 0.0);
    // Small-N expansion: 1 - C(N,2)/M to first order.
    const double p = p_no_collision_uniform(1'000'000, 10);
    CHECK(std::abs(p - (1 - 45.0 / 1'000'000)) < 1e-9);
}

TEST_CASE("posterior after observing all-distinct samples") {
    // One sample carries no evidence.
    const Posterior single = posterior_after_no_collision(100, 1, 0.5, 0.02);
    CHECK(single.p_m1 == doctest::Approx(0.5));
    CHECK(single.lo == doctest::Approx(0.5));
    CHECK(single.hi == doctest::Approx(0.5));

    // If m2's largest probability is 1/M it is indistinguishable from uniform:
    // the plug-in posterior equals the prior.
    const Posterior flat = posterior_after_no_collision(50, 10, 0.3, 1.0 / 50);
    CHECK(flat.hi == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(flat.p_m1 == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(flat.lo <= flat.hi);

    // A peaked m2 makes "no collision" evidence for m1: posterior above prior.
    // The lo end assumes the trivial m2 likelihood 1, so it sits below it.
    const Posterior peaked = posterior_after_no_collision(50, 10, 0.5, 0.5);
    CHECK(peaked.p_m1 > 0.5);
    CHECK(peaked.lo <= peaked.hi);
    CHECK(peaked.hi == doctest::Approx(peaked.p_m1));
}

TEST_CASE("collision classifier votes m2 when collisions are plentiful") {
    RngStream coin(1, 0);
    SampleSet collided;
    collided.m = 1000;
    collided.labels = {1, 1, 1, 1, 2, 3};
    SampleSet spread;
    spread.m = 1000;
    spread.labels = {1, 2, 3, 4, 5, 6};
    const double s2_m2 = 0.05;  // strongly non-uniform alternative
    CHECK(classify_m2_by_collisions(collided, s2_m2, coin));
    CHECK(!classify_m2_by_collisions(spread, s2_m2, coin));
}

TEST_CASE("dirichlet surrogate hits the requested outcome variance") {
    const int m = 256;
    const double c = 4.0;
    const M2Source gen = dirichlet_m2_generator(m, c);
    double total_var = 0;
    const int draws = 300;
    for (int i = 0; i < draws; ++i) {
        const OutcomeDistribution d = gen({11, std::uint64_t(i)});
        REQUIRE(static_cast<int>(d.probs.size()) == m);
        double sum = 0, sq = 0;
        for (double p : d.probs) {
            CHECK(p >= 0.0);
            sum += p;
            sq += (p - 1.0 / m) * (p - 1.0 / m);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
        total_var += sq / m;
    }
    total_var /= draws;
    CHECK(total_var == doctest::Approx(c / double(m) / m).epsilon(0.15));

    CHECK_THROWS_AS(dirichlet_m2_generator(4, 4.0), Error);  // needs c < M-1
}

TEST_CASE("advantage experiment endpoints") {
    const int m = 64;
    // Delta m2: two samples collide with certainty under m2, almost never
    // under m1, so accuracy should be essentially perfect at N = 2.
    const M2Source delta_gen = [](SeedPath) {
        OutcomeDistribution d;
        d.probs.assign(64, 0.0);
        d.probs[0] = 1.0;
        return d;
    };
    const auto rows = advantage_experiment(m, {1, 2}, delta_gen, 600, {21, 0});
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].n_samples == 1);
    // One sample: no pair statistics, classifier is a coin flip.
    CHECK(std::abs(rows[0].accuracy - 0.5) < 4 * rows[0].stderr_mean);
    CHECK(rows[1].accuracy > 0.95);
}

TEST_CASE("oracle classifier") {
    const int m = 256;
    // m2 identical to uniform: no classifier can beat chance.
    const auto chance = oracle_classifier_accuracy(m, {8}, uniform_dist(m), 800, {31, 0});
    CHECK(std::abs(chance[0].accuracy - 0.5) < 4 * chance[0].stderr_mean);

    // Half the mass on one outcome: the likelihood ratio sees it quickly.
    OutcomeDistribution peaked = uniform_dist(m);
    for (auto& p : peaked.probs) p *= 0.5;
    peaked.probs[0] += 0.5;
    const auto sharp = oracle_classifier_accuracy(m, {16}, peaked, 800, {31, 0});
    CHECK(sharp[0].accuracy > 0.9);
}

TEST_CASE("quantum plateau pool provides valid distributions") {
    const auto pool = quantum_plateau_pool(EnsembleSpec::rlh_complete(4), 10.0, 6, 13);
    REQUIRE(static_cast<int>(pool.size()) == 6);
    for (const auto& d : pool) {
        double sum = 0;
        for (double p : d.probs) {
            CHECK(p >= -1e-14);
            sum += p;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-10));
    }
    const M2Source gen = pool_m2_generator(pool);
    const OutcomeDistribution pick = gen({13, 2});
    CHECK(static_cast<int>(pick.probs.size()) == 16);
}
