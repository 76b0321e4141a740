#include "dynamics.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>

#include "errors.hpp"
#include "rng.hpp"

namespace ite {

using std::complex;

namespace {

// Deterministic phase convention: rotate each column so its largest-magnitude
// entry is real positive (first such entry on ties).
void fix_phases(Eigen::MatrixXcd& c) {
    const int dim = static_cast<int>(c.cols());
    for (int col = 0; col < dim; ++col) {
        int arg = 0;
        double best = -1.0;
        for (int row = 0; row < dim; ++row) {
            const double mag = std::norm(c(row, col));
            if (mag > best * (1.0 + 1e-12)) {
                best = mag;
                arg = row;
            }
        }
        const complex<double> z = c(arg, col);
        const double mag = std::abs(z);
        if (mag > 0) c.col(col) *= std::conj(z) / mag;
    }
}

// Cheap residual probe: ||(H C - C diag(E)) v||_inf over a few deterministic
// pseudo-random unit vectors. O(D^2), used as the eigensolver sanity gate.
double residual_probe(const Eigen::MatrixXcd& h, const Spectrum& s) {
    RngStream rng(0x9D67F3A55C2B1E04ULL, static_cast<std::uint64_t>(s.dim()));
    double worst = 0.0;
    for (int probe = 0; probe < 2; ++probe) {
        Eigen::VectorXcd v(s.dim());
        for (int i = 0; i < s.dim(); ++i) v[i] = complex<double>(rng.gaussian(), rng.gaussian());
        v /= v.norm();
        Eigen::VectorXcd cv = s.basis * v;
        Eigen::VectorXcd want = s.basis * (s.energies.asDiagonal() * v);
        worst = std::max(worst, (h * cv - want).cwiseAbs().maxCoeff());
    }
    return worst;
}

}  // namespace

double spectral_norm(const Eigen::MatrixXcd& mat) {
    const int dim = static_cast<int>(mat.rows());
    Eigen::MatrixXcd work = mat;
    Eigen::VectorXd evals(dim);
    const int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'U', dim,
                                    reinterpret_cast<lapack_complex_double*>(work.data()), dim,
                                    evals.data());
    if (info != 0) throw_numeric("zheevd (values) failed with info=" + std::to_string(info));
    return evals.cwiseAbs().maxCoeff();
}

Spectrum Spectrum::scaled_to_unit_norm() const {
    Spectrum out = *this;
    const double norm = energies.cwiseAbs().maxCoeff();
    if (norm > 0) out.energies /= norm;
    return out;
}

Spectrum diagonalize(const DenseHermitian& h) {
    const int dim = h.dim();
    if (dim < 1) throw_invalid("diagonalize: empty matrix");
    Spectrum s;
    s.basis = h.mat;  // column-major, overwritten with eigenvectors
    s.energies.resize(dim);
    const int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', dim,
                                    reinterpret_cast<lapack_complex_double*>(s.basis.data()), dim,
                                    s.energies.data());
    if (info != 0) throw_numeric("zheevd failed with info=" + std::to_string(info));
    fix_phases(s.basis);
    const double scale = std::max(1.0, h.mat.cwiseAbs().maxCoeff());
    const double res = residual_probe(h.mat, s);
    if (res > 1e-9 * scale * dim)
        throw_numeric("eigensolver residual " + std::to_string(res) + " above tolerance");
    return s;
}

OutcomeDistribution evolve_probabilities(const Spectrum& spec, int x, double t) {
    const int dim = spec.dim();
    if (x < 0 || x >= dim) throw_invalid("initial outcome index out of range");
    Eigen::VectorXcd w(dim);
    for (int a = 0; a < dim; ++a) {
        const double ph = -t * spec.energies[a];
        w[a] = std::polar(1.0, ph) * std::conj(spec.basis(x, a));
    }
    Eigen::VectorXcd amps = spec.basis * w;
    OutcomeDistribution dist;
    dist.probs.resize(dim);
    for (int k = 0; k < dim; ++k) dist.probs[k] = std::max(0.0, std::norm(amps[k]));
    return dist;
}

double return_probability(const Spectrum& spec, int x, double t) {
    const int dim = spec.dim();
    complex<double> amp = 0;
    for (int a = 0; a < dim; ++a)
        amp += std::norm(spec.basis(x, a)) * std::polar(1.0, -t * spec.energies[a]);
    return std::norm(amp);
}

double outcome_variance(const OutcomeDistribution& dist) {
    const int m = dist.size();
    if (m == 0) return 0.0;
    const double inv = 1.0 / m;
    double acc = 0.0;
    for (double p : dist.probs) {
        const double d = p - inv;
        acc += d * d;
    }
    return acc * inv;
}

double l1_distance_to_uniform(const OutcomeDistribution& dist) {
    const int m = dist.size();
    const double inv = m > 0 ? 1.0 / m : 0.0;
    double acc = 0.0;
    for (double p : dist.probs) acc += std::abs(p - inv);
    return acc;
}

TimeSeries escape_curve(const Spectrum& spec, int x, const std::vector<double>& t_grid) {
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1])) throw_invalid("time grid must be strictly increasing");
    TimeSeries ts;
    ts.times = t_grid;
    ts.values.reserve(t_grid.size());
    const double dm1 = spec.dim() - 1;
    for (double t : t_grid) ts.values.push_back((1.0 - return_probability(spec, x, t)) / dm1);
    return ts;
}

double estimate_t_eq(const TimeSeries& curve, int smooth_window) {
    const int n = static_cast<int>(curve.times.size());
    if (n < 16) throw_invalid("t_eq estimate needs at least 16 points");
    if (smooth_window < 1) smooth_window = 1;
    std::vector<double> smooth(n);
    const int half = smooth_window / 2;
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        double acc = 0.0;
        for (int k = lo; k <= hi; ++k) acc += curve.values[k];
        smooth[i] = acc / (hi - lo + 1);
    }
    double best_slope = -1.0;
    int best = -1;
    for (int i = 1; i + 1 < n; ++i) {
        const double slope = (smooth[i + 1] - smooth[i - 1]) / (curve.times[i + 1] - curve.times[i - 1]);
        if (slope > best_slope) {  // strict: ties keep the earlier time
            best_slope = slope;
            best = i;
        }
    }
    if (best < 0 || best_slope < 1e-15) throw_numeric("no equilibration signal: curve never rises");
    return curve.times[best];
}

double dephasing_time_average(const Spectrum& spec, int x) {
    double acc = 0.0;
    for (int a = 0; a < spec.dim(); ++a) {
        const double w = std::norm(spec.basis(x, a));
        acc += w * w;
    }
    return acc;
}

Eigen::MatrixXcd kicked_top_floquet(const EnsembleSpec& spec) {
    auto gen = build_kicked_top_generators(spec);
    auto expm_herm = [](const DenseHermitian& h) {
        Spectrum s = diagonalize(h);
        Eigen::VectorXcd phases(s.dim());
        for (int a = 0; a < s.dim(); ++a) phases[a] = std::polar(1.0, -s.energies[a]);
        return Eigen::MatrixXcd(s.basis * phases.asDiagonal() * s.basis.adjoint());
    };
    return expm_herm(gen.torsion) * expm_herm(gen.kick);
}

OutcomeDistribution kicked_top_distribution(const EnsembleSpec& spec, int x, int n_kicks) {
    if (n_kicks < 0) throw_invalid("n_kicks must be >= 0");
    const int dim = spec.dimension();
    if (x < 0 || x >= dim) throw_invalid("initial outcome index out of range");
    Eigen::MatrixXcd uf = kicked_top_floquet(spec);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    psi[x] = 1.0;
    for (int kick = 0; kick < n_kicks; ++kick) psi = uf * psi;
    OutcomeDistribution dist;
    dist.probs.resize(dim);
    for (int m = 0; m < dim; ++m) dist.probs[m] = std::norm(psi[m]);
    return dist;
}

double unitarity_residual(const Eigen::MatrixXcd& u) {
    Eigen::MatrixXcd g = u.adjoint() * u;
    g.diagonal().array() -= 1.0;
    return g.cwiseAbs().maxCoeff();
}

}  // namespace ite
