#include <cmath>
#include <complex>
#include <set>

#include "doctest.h"
#include "errors.hpp"
#include "operators.hpp"

using namespace ite;
using Eigen::MatrixXcd;

TEST_CASE("single-site Z string") {
    const auto h = build_pauli_string(1, {{0, PauliAxis::Z}});
    CHECK(h.mat(0, 0) == std::complex<double>(1, 0));
    CHECK(h.mat(1, 1) == std::complex<double>(-1, 0));
    CHECK(h.mat(0, 1) == std::complex<double>(0, 0));
}

TEST_CASE("XX string is the anti-diagonal") {
    const auto h = build_pauli_string(2, {{0, PauliAxis::X}, {1, PauliAxis::X}});
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            CHECK(h.mat(r, c) == std::complex<double>(r + c == 3 ? 1 : 0, 0));
}

TEST_CASE("identity on site 0, Z on site 1") {
    const auto h = build_pauli_string(2, {{1, PauliAxis::Z}});
    // Independent oracle: I (x) Z computed by hand.
    const double expected[4] = {1, -1, 1, -1};
    for (int i = 0; i < 4; ++i) CHECK(h.mat(i, i).real() == expected[i]);
}

TEST_CASE("pauli strings are involutions and traceless") {
    const auto h = build_pauli_string(
        3, {{0, PauliAxis::Y}, {2, PauliAxis::X}});
    const MatrixXcd sq = h.mat * h.mat;
    CHECK((sq - MatrixXcd::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(h.mat.trace()) < 1e-12);
}

TEST_CASE("duplicate sites and oversized systems are rejected") {
    CHECK_THROWS_AS(build_pauli_string(2, {{0, PauliAxis::X}, {0, PauliAxis::Z}}), Error);
    CHECK_THROWS_AS(build_pauli_string(15, {{0, PauliAxis::X}}), Error);
}

TEST_CASE("GUE draws are Hermitian, deterministic, and have the right scale") {
    const auto a = sample_gue(8, 0.5, {123, 4});
    const auto b = sample_gue(8, 0.5, {123, 4});
    CHECK((a.mat - b.mat).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.mat - a.mat.adjoint()).cwiseAbs().maxCoeff() == 0.0);

    // mean |h_ab|^2 over off-diagonal entries and many draws ~ sigma2.
    const int draws = 4000, dim = 8;
    double s = 0, n = 0;
    for (int d = 0; d < draws; ++d) {
        const auto h = sample_gue(dim, 0.5, {99, static_cast<std::uint64_t>(d)});
        for (int r = 0; r < dim; ++r)
            for (int c = r + 1; c < dim; ++c) {
                s += std::norm(h.mat(r, c));
                n += 1;
            }
    }
    const double mean = s / n;
    // |h_ab|^2 is exponential with mean sigma2, so sd = sigma2; entries within
    // a draw are independent.
    CHECK(std::abs(mean - 0.5) < 5.0 * 0.5 / std::sqrt(n));
}

TEST_CASE("chain edge set has periodic closure") {
    const auto edges = rlh_edges(EnsembleSpec::rlh_chain(4));
    const std::set<std::pair<int, int>> expected = {{0, 1}, {0, 3}, {1, 2}, {2, 3}};
    CHECK(std::set<std::pair<int, int>>(edges.begin(), edges.end()) == expected);
}

TEST_CASE("lattice edges form a valid 4-neighbor torus") {
    const auto edges = rlh_edges(EnsembleSpec::rlh_lattice(3, 3));
    std::set<std::pair<int, int>> unique(edges.begin(), edges.end());
    CHECK(unique.size() == edges.size());
    CHECK(edges.size() == 18);  // 2 undirected edges per site on a 3x3 torus
    for (const auto& [a, b] : edges) {
        CHECK(a < b);
        CHECK(b < 9);
    }
}

TEST_CASE("complete-graph draw consumes coefficients in the documented order") {
    const int n = 3;
    const auto h = sample_rlh(EnsembleSpec::rlh_complete(n, /*normalize=*/false), {77, 2});
    // Reconstruct: single-site terms site-major then X,Y,Z, then lexicographic
    // edges with 9 coefficients each in (X,Y,Z) x (X,Y,Z) order.
    RngStream rng(77, 2);
    MatrixXcd manual = MatrixXcd::Zero(8, 8);
    const PauliAxis axes[3] = {PauliAxis::X, PauliAxis::Y, PauliAxis::Z};
    for (int site = 0; site < n; ++site)
        for (auto p : axes) {
            MatrixXcd term = MatrixXcd::Zero(8, 8);
            accumulate_pauli_string(term, rng.gaussian(), n, {{site, p}});
            manual += term;
        }
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (auto p : axes)
                for (auto q : axes) {
                    MatrixXcd term = MatrixXcd::Zero(8, 8);
                    accumulate_pauli_string(term, rng.gaussian(), n, {{i, p}, {j, q}});
                    manual += term;
                }
    CHECK((h.mat - manual).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("normalized draws have unit spectral norm") {
    const auto h = sample_rlh(EnsembleSpec::rlh_chain(5, /*normalize=*/true), {5, 0});
    CHECK(std::abs(spectral_norm(h.mat) - 1.0) < 1e-10);
}

TEST_CASE("two-field model structure") {
    const auto h4 = build_heisenberg_two_field(4, false);
    CHECK(h4.mat.imag().cwiseAbs().maxCoeff() == 0.0);
    CHECK((h4.mat - h4.mat.transpose()).cwiseAbs().maxCoeff() == 0.0);

    // Oracle: hand-assembled Z fields on sites 0,1 and X on 2,3 plus periodic
    // XX+YY+ZZ bonds.
    MatrixXcd manual = MatrixXcd::Zero(16, 16);
    accumulate_pauli_string(manual, 1.0, 4, {{0, PauliAxis::Z}});
    accumulate_pauli_string(manual, 1.0, 4, {{1, PauliAxis::Z}});
    accumulate_pauli_string(manual, 1.0, 4, {{2, PauliAxis::X}});
    accumulate_pauli_string(manual, 1.0, 4, {{3, PauliAxis::X}});
    for (int i = 0; i < 4; ++i) {
        const int j = (i + 1) % 4;
        for (auto p : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z})
            accumulate_pauli_string(manual, 1.0, 4, {{i, p}, {j, p}});
    }
    CHECK((h4.mat - manual).cwiseAbs().maxCoeff() < 1e-14);

    // Odd n: floor(n/2) longitudinal sites, the excess is transverse.
    const auto h3 = build_heisenberg_two_field(3, false);
    MatrixXcd manual3 = MatrixXcd::Zero(8, 8);
    accumulate_pauli_string(manual3, 1.0, 3, {{0, PauliAxis::Z}});
    accumulate_pauli_string(manual3, 1.0, 3, {{1, PauliAxis::X}});
    accumulate_pauli_string(manual3, 1.0, 3, {{2, PauliAxis::X}});
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        for (auto p : {PauliAxis::X, PauliAxis::Y, PauliAxis::Z})
            accumulate_pauli_string(manual3, 1.0, 3, {{i, p}, {j, p}});
    }
    CHECK((h3.mat - manual3).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("angular momentum operators") {
    const auto half = angular_momentum_ops(1);
    CHECK(half.jz.mat(0, 0).real() == doctest::Approx(0.5));
    CHECK(half.jz.mat(1, 1).real() == doctest::Approx(-0.5));
    CHECK(half.jx.mat(0, 1).real() == doctest::Approx(0.5));

    const auto one = angular_momentum_ops(2);
    CHECK(std::abs(one.jx.mat(0, 1)) == doctest::Approx(1.0 / std::sqrt(2.0)));

    const auto big = angular_momentum_ops(5);
    const MatrixXcd comm = big.jx.mat * big.jy.mat - big.jy.mat * big.jx.mat;
    const MatrixXcd expect = std::complex<double>(0, 1) * big.jz.mat;
    CHECK((comm - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("kicked-top generators") {
    auto spec = EnsembleSpec::kicked_top(4, {0, 0, 0}, {10, 0, 1});
    const auto gens = build_kicked_top_generators(spec);
    CHECK(gens.kick.mat.cwiseAbs().maxCoeff() == 0.0);

    auto casimir = EnsembleSpec::kicked_top(1, {0.3, 0.1, 0.2}, {1, 1, 1});
    const auto cg = build_kicked_top_generators(casimir);
    // Jx^2 + Jy^2 + Jz^2 = j(j+1) I at j = 1/2, with the 1/(2j+1) scale.
    const MatrixXcd expect = (0.75 / 2.0) * MatrixXcd::Identity(2, 2);
    CHECK((cg.torsion.mat - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("ensemble spec JSON round trip rejects junk") {
    const auto spec = EnsembleSpec::rlh_lattice(4, 3, false);
    const auto back = EnsembleSpec::from_json(spec.to_json());
    CHECK(back.kind == EnsembleKind::RlhLattice);
    CHECK(back.rows == 4);
    CHECK(back.cols == 3);
    CHECK_FALSE(back.normalize);
    CHECK_THROWS_AS(EnsembleSpec::from_json(R"({"variant":"gue","D":8,"bogus":1})"), Error);
    CHECK_THROWS_AS(EnsembleSpec::from_json("not json"), Error);
}

TEST_CASE("near-square lattice shapes") {
    CHECK(default_lattice_shape(12) == std::pair<int, int>(4, 3));
    CHECK(default_lattice_shape(8) == std::pair<int, int>(4, 2));
    CHECK(default_lattice_shape(14) == std::pair<int, int>(7, 2));
}
