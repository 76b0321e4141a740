#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "rng.hpp"

namespace ite {

enum class PauliAxis { X, Y, Z };

struct PauliFactor {
    int site;
    PauliAxis axis;
};

// Where a matrix came from: enough to regenerate it exactly.
struct Provenance {
    std::string ensemble;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
    std::string params;
};

// D x D complex Hermitian matrix. Hermiticity is guaranteed by construction in
// every builder below (mirrored entries, never a post-hoc symmetrization).
struct DenseHermitian {
    Eigen::MatrixXcd mat;
    Provenance prov;

    int dim() const { return static_cast<int>(mat.rows()); }
};

enum class EnsembleKind {
    Gue,
    RlhComplete,
    RlhChain,
    RlhLattice,
    HeisenbergTwoField,
    KickedTop,
};

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::Gue;
    int n = 0;          // qubit count for spin models
    int dim = 0;        // D, for GUE
    double sigma2 = 0.5;
    int rows = 0, cols = 0;  // lattice shape, rows*cols == n
    int two_j = 1;           // kicked top: 2j (integer >= 1), D = two_j + 1
    std::array<double, 3> alpha{0.0, 0.0, 0.0};
    std::array<double, 3> tau{0.0, 0.0, 0.0};
    bool normalize = true;

    int dimension() const;
    std::string variant_name() const;
    std::string describe() const;

    std::string to_json() const;
    static EnsembleSpec from_json(const std::string& text);

    static EnsembleSpec gue(int dim, double sigma2 = 0.5);
    static EnsembleSpec rlh_complete(int n, bool normalize = true);
    static EnsembleSpec rlh_chain(int n, bool normalize = true);
    static EnsembleSpec rlh_lattice(int rows, int cols, bool normalize = true);
    static EnsembleSpec heisenberg_two_field(int n, bool normalize = true);
    static EnsembleSpec kicked_top(int two_j, std::array<double, 3> alpha, std::array<double, 3> tau);
};

// Guard against accidentally materializing astronomically large spin models.
inline constexpr int kMaxQubits = 14;

// Tensor product of single-site Paulis with identity on unlisted sites.
// Site 0 is the leftmost (most significant) factor. Sites must be distinct.
DenseHermitian build_pauli_string(int n, const std::vector<PauliFactor>& factors);

// Adds coeff * (Pauli string) into an existing dense matrix. Each Pauli string
// has one nonzero per column, so this is O(D) per term.
void accumulate_pauli_string(Eigen::MatrixXcd& target, double coeff, int n,
                             const std::vector<PauliFactor>& factors);

// GUE draw: diagonal ~ N(0, sigma2), off-diagonal re/im each ~ N(0, sigma2/2).
// Fill order: diagonal a = 0..D-1, then upper triangle row-major (re then im).
DenseHermitian sample_gue(int dim, double sigma2, SeedPath seed);

// Random local Hamiltonian on the spec's coupling graph. Coefficient stream:
// single-site terms in site order then axis order X,Y,Z; then undirected edges
// in lexicographic order, 9 coefficients each in (X,Y,Z) x (X,Y,Z) order.
DenseHermitian sample_rlh(const EnsembleSpec& spec, SeedPath seed);

// Undirected edge list used by sample_rlh, exposed for tests.
std::vector<std::pair<int, int>> rlh_edges(const EnsembleSpec& spec);

// Deterministic two-field Heisenberg chain with periodic closure: Z field on
// 1-based sites i <= floor(n/2), X field on the rest, XX+YY+ZZ bonds.
DenseHermitian build_heisenberg_two_field(int n, bool normalize);

struct AngularMomentumOps {
    DenseHermitian jx, jy, jz;
};

// Standard (2j+1)-dimensional spin-j operators in the |j,m> basis with m
// descending from j to -j; hbar = 1.
AngularMomentumOps angular_momentum_ops(int two_j);

struct KickedTopGenerators {
    DenseHermitian torsion;  // tau_xx Jx^2 + tau_yy Jy^2 + tau_zz Jz^2
    DenseHermitian kick;     // alpha . J
};

KickedTopGenerators build_kicked_top_generators(const EnsembleSpec& spec);

// Largest |eigenvalue|, computed by full diagonalization (values only).
double spectral_norm(const Eigen::MatrixXcd& mat);

// Samples the spec'd ensemble (or builds the fixed model) for one stream.
DenseHermitian sample_hamiltonian(const EnsembleSpec& spec, SeedPath seed);

// Near-square periodic lattice shapes used for the 2D scans.
std::pair<int, int> default_lattice_shape(int n);

}  // namespace ite
