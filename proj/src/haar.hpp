#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "rng.hpp"

namespace ite {

// Element of S_k in one-line notation: mapping[a] is the (1-based) image of
// a+1. Used for the degree-(k,k) moment calculus of Haar unitaries.
struct Permutation {
    std::vector<int> mapping;

    int order() const { return static_cast<int>(mapping.size()); }
    int image(int a) const { return mapping[a - 1]; }  // 1-based
    Permutation inverse() const;
    Permutation compose(const Permutation& other) const;  // this o other
    bool operator==(const Permutation& other) const { return mapping == other.mapping; }
    std::string str() const;

    static Permutation identity(int k);
};

// Number of cycles including fixed points.
int cycle_count(const Permutation& p);

// All k! elements of S_k in lexicographic one-line order.
std::vector<Permutation> symmetric_group(int k);

// Gram matrix M_{pi,sigma} = D^{l(pi^{-1} sigma)} over S_k.
struct GramMatrix {
    int k = 0;
    int dim = 0;  // D
    bool approximate = false;
    Eigen::MatrixXd entries;
};

// Exact for k <= 4. k == 8 returns the large-D diagonal asymptotic I/D^8,
// flagged approximate (the exact 8!x8! matrix is out of scope).
GramMatrix gram_matrix(int k, int dim);

// Numeric inverse gated on ||M M^{-1} - I||_max < 1e-10 (requires D >= k).
Eigen::MatrixXd invert_gram(const GramMatrix& m);

// |Phi_pi> = (V_pi x 1) |phi>^{x k} as an explicit dense vector of length
// D^(2k), index = big-endian base-D digits (i_1..i_k, j_1..j_k). Guarded at
// D^(2k) <= 2^24.
Eigen::VectorXcd phi_vector(const Permutation& p, int dim);

// |R_k(t)>: k=2 gives sum_{b,b'} e^{it(E_b - E_b')} |b,b',b,b'>, k=4 the
// four-index analogue. Same indexing and capacity guard as phi_vector.
Eigen::VectorXcd r_vector(const Eigen::VectorXd& energies, double t, int k);

// <Phi_sigma | R_k(t)> without materializing either vector: O(D^k) loop over
// the delta constraints w_a = w_{sigma(a)}.
std::complex<double> phi_r_inner(const Permutation& sigma, const Eigen::VectorXd& energies,
                                 double t, int k);

// <L_4|Phi_pi> where <L_4| = <k,x,k,x,x,k,x,k|: 1 for four permutations,
// delta_xk otherwise. Returns the value for given (x == k) flag.
double l4_phi_inner(const Permutation& p, bool x_equals_k);

// mu(t) = Tr F(t) = sum_a e^{-i t E_a} (the spectral form factor).
std::complex<double> form_factor(const Eigen::VectorXd& energies, double t);

struct TableRow {
    Permutation sigma;
    std::complex<double> contracted;   // explicit-contraction value
    std::complex<double> closed_form;  // tabulated value in mu(t), mu(2t), D
    double deviation;                  // |contracted - closed_form|
};

struct TableReport {
    std::vector<TableRow> rows;
    double max_deviation = 0.0;
    bool pass = false;
};

// Verifies all 24 closed forms for <Phi_sigma|R_4(t)> against explicit
// contraction. Tolerance 1e-9 relative to D^4.
TableReport verify_inner_product_table(const Eigen::VectorXd& energies, double t, double tol = 1e-9);

// Haar-distributed unitary: complex Ginibre draw, QR, phases fixed so the
// triangular factor has positive real diagonal.
Eigen::MatrixXcd haar_sample_unitary(int dim, SeedPath seed);

// Closed-form Haar mean E_C[Pr].  x_equals_k selects the delta_{xk} terms.
double closed_form_mean_prob(int dim, bool x_equals_k, std::complex<double> mu_t);

// Exact Haar second moment E_C[Pr^2] (the unsimplified expression with
// denominator alpha = D^2 (D-1)(D+1)(D+2)(D+3)); no O(D^-5) truncation.
double closed_form_second_moment_exact(int dim, bool x_equals_k, std::complex<double> mu_t,
                                       std::complex<double> mu_2t);

// Exact Haar variance: second moment minus mean squared.
double closed_form_var_prob_exact(int dim, bool x_equals_k, std::complex<double> mu_t,
                                  std::complex<double> mu_2t);

// The truncated form quoted to O(D^-5).
double closed_form_var_prob(int dim, bool x_equals_k, std::complex<double> mu_t,
                            std::complex<double> mu_2t);

// E_C[Pr^2] via the Weingarten contraction sum_{pi,sigma} <L4|Phi_pi>
// (M^-1)_{pi,sigma} <Phi_sigma|R4(t)>. Independent of the closed forms.
double second_moment_weingarten(const Eigen::VectorXd& energies, double t, bool x_equals_k);

struct McMoment {
    double mean = 0.0;
    double stderr_mean = 0.0;
    int n_samples = 0;
};

// Monte Carlo E_C[Pr(k|rho(t))^power] over Haar-sampled C at a fixed spectrum.
McMoment mc_prob_moment(int dim, const Eigen::VectorXd& energies, double t, int x, int k,
                        int power, int n_samples, SeedPath seed);

// E_C[Pr(k|rho(t))^4] at x=0, k=1; used for the D^-4 scaling fit.
McMoment mc_fourth_moment(int dim, const Eigen::VectorXd& energies, double t, int n_samples,
                          SeedPath seed);

}  // namespace ite
