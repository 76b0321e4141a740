#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "operators.hpp"

namespace ite {

// Eigendecomposition of a Hamiltonian in the measurement basis: ascending
// energies E_a and the basis-change unitary C whose column a is the
// eigenvector of E_a. U(t) = C diag(e^{-i t E_a}) C^dag.
struct Spectrum {
    Eigen::VectorXd energies;
    Eigen::MatrixXcd basis;

    int dim() const { return static_cast<int>(energies.size()); }

    // Same eigenvectors, energies divided by max |E_a|. Equivalent to
    // normalizing H by its spectral norm before diagonalizing.
    Spectrum scaled_to_unit_norm() const;
};

struct PureState {
    Eigen::VectorXcd amplitudes;
    int dim() const { return static_cast<int>(amplitudes.size()); }
};

// Length-M nonnegative vector summing to 1.
struct OutcomeDistribution {
    std::vector<double> probs;
    int size() const { return static_cast<int>(probs.size()); }
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> values;
};

// Dense Hermitian eigensolver (LAPACK divide and conquer). Eigenvector phases
// are fixed so each column's largest-magnitude entry is real positive, making
// the result deterministic for a fixed input.
Spectrum diagonalize(const DenseHermitian& h);

// Pr(k | rho(t)) for rho(0) = |x><x|: probs[k] = |sum_a C_ka e^{-i t E_a} conj(C_xa)|^2.
OutcomeDistribution evolve_probabilities(const Spectrum& spec, int x, double t);

// Return probability |<x|U(t)|x>|^2, O(D) per time.
double return_probability(const Spectrum& spec, int x, double t);

// V_k{p} = M^{-1} sum_k (p_k - 1/M)^2. Zero iff uniform.
double outcome_variance(const OutcomeDistribution& dist);

double l1_distance_to_uniform(const OutcomeDistribution& dist);

// Mean probability of landing on any outcome k != x: (1 - p_x(t)) / (D-1).
TimeSeries escape_curve(const Spectrum& spec, int x, const std::vector<double>& t_grid);

// Equilibration-time estimate: grid time maximizing the centered slope of a
// moving-average-smoothed curve (window 5), ties broken toward earlier time.
// Throws Numeric if the curve never rises (max slope below 1e-15).
double estimate_t_eq(const TimeSeries& curve, int smooth_window = 5);

// Infinite-time average of probs[x] for a nondegenerate spectrum: sum_a |C_xa|^4.
double dephasing_time_average(const Spectrum& spec, int x);

// Floquet map U_F = exp(-i H_torsion) exp(-i H_kick) applied n_kicks times to
// the Jz basis state |x>; returns |<m|psi>|^2 over the Jz basis.
OutcomeDistribution kicked_top_distribution(const EnsembleSpec& spec, int x, int n_kicks);

// One-period Floquet unitary, exposed for the unitarity property test.
Eigen::MatrixXcd kicked_top_floquet(const EnsembleSpec& spec);

// Largest-off-unitarity entry ||C^dag C - I||_max.
double unitarity_residual(const Eigen::MatrixXcd& u);

}  // namespace ite
