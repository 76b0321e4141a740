#include "haar.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "errors.hpp"
#include "parallel.hpp"

namespace ite {

using std::complex;

Permutation Permutation::identity(int k) {
    Permutation p;
    p.mapping.resize(k);
    std::iota(p.mapping.begin(), p.mapping.end(), 1);
    return p;
}

Permutation Permutation::inverse() const {
    Permutation q;
    q.mapping.resize(mapping.size());
    for (int a = 1; a <= order(); ++a) q.mapping[image(a) - 1] = a;
    return q;
}

Permutation Permutation::compose(const Permutation& other) const {
    Permutation q;
    q.mapping.resize(mapping.size());
    for (int a = 1; a <= order(); ++a) q.mapping[a - 1] = image(other.image(a));
    return q;
}

std::string Permutation::str() const {
    std::ostringstream os;
    os << "(";
    for (int a = 1; a <= order(); ++a) os << image(a) << (a < order() ? "," : ")");
    return os.str();
}

int cycle_count(const Permutation& p) {
    const int k = p.order();
    std::vector<bool> seen(k, false);
    int cycles = 0;
    for (int a = 1; a <= k; ++a) {
        if (seen[a - 1]) continue;
        ++cycles;
        int b = a;
        while (!seen[b - 1]) {
            seen[b - 1] = true;
            b = p.image(b);
        }
    }
    return cycles;
}

std::vector<Permutation> symmetric_group(int k) {
    if (k < 1 || k > 8) throw_invalid("symmetric_group supports 1 <= k <= 8");
    std::vector<int> line(k);
    std::iota(line.begin(), line.end(), 1);
    std::vector<Permutation> out;
    do {
        out.push_back(Permutation{line});
    } while (std::next_permutation(line.begin(), line.end()));
    return out;
}

GramMatrix gram_matrix(int k, int dim) {
    if (dim < 2) throw_invalid("gram matrix requires D >= 2");
    GramMatrix g;
    g.k = k;
    g.dim = dim;
    if (k == 8) {
        // Large-D asymptotic only: M^{-1} = I/D^8 + O(D^-9); we return the
        // leading diagonal D^8 I and flag it.
        g.approximate = true;
        const double d8 = std::pow(static_cast<double>(dim), 8);
        g.entries = d8 * Eigen::MatrixXd::Identity(40320, 40320);
        return g;
    }
    if (k < 1 || k > 4) throw_invalid("gram matrix is exact only for k <= 4 (or asymptotic k=8)");
    const auto perms = symmetric_group(k);
    const int n = static_cast<int>(perms.size());
    g.entries.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g.entries(i, j) = std::pow(static_cast<double>(dim),
                                       cycle_count(perms[i].inverse().compose(perms[j])));
    return g;
}

Eigen::MatrixXd invert_gram(const GramMatrix& m) {
    if (m.approximate) {
        const int n = static_cast<int>(m.entries.rows());
        return Eigen::MatrixXd::Identity(n, n) / std::pow(static_cast<double>(m.dim), 8);
    }
    if (m.dim < m.k) throw_numeric("gram matrix is singular for D < k");
    Eigen::MatrixXd inv = m.entries.inverse();
    const double residual =
        (m.entries * inv - Eigen::MatrixXd::Identity(m.entries.rows(), m.entries.cols()))
            .cwiseAbs()
            .maxCoeff();
    if (residual > 1e-10)
        throw_numeric("gram inversion residual " + std::to_string(residual) +
                      " above tolerance (D too small or ill conditioned)");
    return inv;
}

namespace {

std::size_t checked_tensor_length(int dim, int k) {
    double len = std::pow(static_cast<double>(dim), 2 * k);
    if (len > static_cast<double>(1 << 24))
        throw_capacity("tensor vector of length D^(2k) exceeds the 2^24 guard");
    return static_cast<std::size_t>(len + 0.5);
}

}  // namespace

Eigen::VectorXcd phi_vector(const Permutation& p, int dim) {
    const int k = p.order();
    const std::size_t len = checked_tensor_length(dim, k);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(len));
    // Component at (i_1..i_k, j_1..j_k) is prod_a delta(i_a, j_{p(a)}).
    // Enumerate j and set the single matching i for each.
    std::vector<int> j(k, 0);
    const std::size_t jcount = static_cast<std::size_t>(std::pow(static_cast<double>(dim), k) + 0.5);
    for (std::size_t flat = 0; flat < jcount; ++flat) {
        std::size_t rem = flat;
        for (int a = k - 1; a >= 0; --a) {
            j[a] = static_cast<int>(rem % dim);
            rem /= dim;
        }
        std::size_t idx = 0;
        for (int a = 1; a <= k; ++a) idx = idx * dim + j[p.image(a) - 1];  // i_a = j_{p(a)}
        for (int a = 0; a < k; ++a) idx = idx * dim + j[a];
        v[static_cast<Eigen::Index>(idx)] = 1.0;
    }
    return v;
}

Eigen::VectorXcd r_vector(const Eigen::VectorXd& energies, double t, int k) {
    if (k != 2 && k != 4) throw_invalid("r_vector supports k in {2, 4}");
    const int dim = static_cast<int>(energies.size());
    const std::size_t len = checked_tensor_length(dim, k);
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(len));
    // |R_k(t)> = sum_w e^{it sum_a s_a E_{w_a}} |w, w>, s = (+1,-1,+1,-1).
    std::vector<int> w(k, 0);
    const std::size_t wcount = static_cast<std::size_t>(std::pow(static_cast<double>(dim), k) + 0.5);
    for (std::size_t flat = 0; flat < wcount; ++flat) {
        std::size_t rem = flat;
        double phase = 0.0;
        for (int a = k - 1; a >= 0; --a) {
            w[a] = static_cast<int>(rem % dim);
            rem /= dim;
            phase += ((a % 2 == 0) ? 1.0 : -1.0) * energies[w[a]];
        }
        std::size_t idx = 0;
        for (int a = 0; a < k; ++a) idx = idx * dim + w[a];
        for (int a = 0; a < k; ++a) idx = idx * dim + w[a];
        v[static_cast<Eigen::Index>(idx)] = std::polar(1.0, t * phase);
    }
    return v;
}

complex<double> phi_r_inner(const Permutation& sigma, const Eigen::VectorXd& energies, double t,
                            int k) {
    if (k != 2 && k != 4) throw_invalid("phi_r_inner supports k in {2, 4}");
    if (sigma.order() != k) throw_invalid("permutation order mismatch");
    const int dim = static_cast<int>(energies.size());
    // <Phi_sigma|(w;w)> = prod_a delta(w_a, w_{sigma(a)}), so the sum runs over
    // w constant on the cycles of sigma; each cycle contributes the summed
    // slot weights s_a.
    std::vector<int> w(k, 0);
    const std::size_t wcount = static_cast<std::size_t>(std::pow(static_cast<double>(dim), k) + 0.5);
    complex<double> acc = 0.0;
    for (std::size_t flat = 0; flat < wcount; ++flat) {
        std::size_t rem = flat;
        for (int a = k - 1; a >= 0; --a) {
            w[a] = static_cast<int>(rem % dim);
            rem /= dim;
        }
        bool match = true;
        for (int a = 1; a <= k && match; ++a) match = (w[a - 1] == w[sigma.image(a) - 1]);
        if (!match) continue;
        double phase = 0.0;
        for (int a = 0; a < k; ++a) phase += ((a % 2 == 0) ? 1.0 : -1.0) * energies[w[a]];
        acc += std::polar(1.0, t * phase);
    }
    return acc;
}

double l4_phi_inner(const Permutation& p, bool x_equals_k) {
    if (p.order() != 4) throw_invalid("l4_phi_inner needs S_4");
    if (x_equals_k) return 1.0;
    // <L_4| = <k,x,k,x, x,k,x,k|: labels K,X,K,X on the bra side and X,K,X,K
    // on the conjugate side; nonzero iff p maps {1,3} onto {2,4}.
    static const int bra[4] = {0, 1, 0, 1};  // 0 = K, 1 = X
    static const int ket[4] = {1, 0, 1, 0};
    for (int a = 1; a <= 4; ++a)
        if (bra[a - 1] != ket[p.image(a) - 1]) return 0.0;
    return 1.0;
}

complex<double> form_factor(const Eigen::VectorXd& energies, double t) {
    complex<double> acc = 0.0;
    for (int a = 0; a < energies.size(); ++a) acc += std::polar(1.0, -t * energies[a]);
    return acc;
}

namespace {

// Closed forms for <Phi_sigma|R_4(t)>, keyed by one-line notation. The table
// holds with the opposite form-factor sign convention nu(t) = conj(mu(t)) =
// sum_a e^{+i t E_a}; every downstream formula uses only |mu|^2 and
// Re[mu(t)^2 mu(-2t)], which are invariant under that conjugation.
enum class RowForm { Mu4, DMu2, Mu2, Mu2t2, NuSqNu2Conj, Nu2NuConjSq, D2, D1 };

const std::map<std::string, RowForm>& table_forms() {
    static const std::map<std::string, RowForm> forms = {
        {"(1,2,3,4)", RowForm::Mu4},
        {"(1,2,4,3)", RowForm::DMu2},   {"(1,3,2,4)", RowForm::DMu2},
        {"(2,1,3,4)", RowForm::DMu2},   {"(4,2,3,1)", RowForm::DMu2},
        {"(1,3,4,2)", RowForm::Mu2},    {"(1,4,2,3)", RowForm::Mu2},
        {"(2,3,1,4)", RowForm::Mu2},    {"(2,4,3,1)", RowForm::Mu2},
        {"(3,1,2,4)", RowForm::Mu2},    {"(3,2,4,1)", RowForm::Mu2},
        {"(4,1,3,2)", RowForm::Mu2},    {"(4,2,1,3)", RowForm::Mu2},
        {"(3,4,1,2)", RowForm::Mu2t2},
        {"(1,4,3,2)", RowForm::NuSqNu2Conj},
        {"(3,2,1,4)", RowForm::Nu2NuConjSq},
        {"(2,1,4,3)", RowForm::D2},     {"(4,3,2,1)", RowForm::D2},
        {"(2,3,4,1)", RowForm::D1},     {"(3,4,2,1)", RowForm::D1},
        {"(2,4,1,3)", RowForm::D1},     {"(3,1,4,2)", RowForm::D1},
        {"(4,1,2,3)", RowForm::D1},     {"(4,3,1,2)", RowForm::D1},
    };
    return forms;
}

complex<double> eval_row_form(RowForm form, int dim, complex<double> mu_t, complex<double> mu_2t) {
    const complex<double> nu = std::conj(mu_t);
    const complex<double> nu2 = std::conj(mu_2t);
    const double d = dim;
    switch (form) {
        case RowForm::Mu4: return std::pow(std::abs(mu_t), 4);
        case RowForm::DMu2: return d * std::norm(mu_t);
        case RowForm::Mu2: return std::norm(mu_t);
        case RowForm::Mu2t2: return std::norm(mu_2t);
        case RowForm::NuSqNu2Conj: return nu * nu * std::conj(nu2);
        case RowForm::Nu2NuConjSq: return nu2 * std::conj(nu) * std::conj(nu);
        case RowForm::D2: return d * d;
        case RowForm::D1: return d;
    }
    return 0.0;
}

}  // namespace

TableReport verify_inner_product_table(const Eigen::VectorXd& energies, double t, double tol) {
    const int dim = static_cast<int>(energies.size());
    const complex<double> mu_t = form_factor(energies, t);
    const complex<double> mu_2t = form_factor(energies, 2 * t);
    TableReport report;
    const bool materialize = std::pow(static_cast<double>(dim), 8) <= static_cast<double>(1 << 24);
    Eigen::VectorXcd r4;
    if (materialize) r4 = r_vector(energies, t, 4);
    for (const auto& sigma : symmetric_group(4)) {
        TableRow row;
        row.sigma = sigma;
        row.contracted = materialize ? complex<double>(phi_vector(sigma, dim).dot(r4))
                                     : phi_r_inner(sigma, energies, t, 4);
        row.closed_form = eval_row_form(table_forms().at(sigma.str()), dim, mu_t, mu_2t);
        row.deviation = std::abs(row.contracted - row.closed_form);
        report.max_deviation = std::max(report.max_deviation, row.deviation);
        report.rows.push_back(std::move(row));
    }
    report.pass = report.max_deviation <= tol * std::pow(static_cast<double>(dim), 4);
    return report;
}

Eigen::MatrixXcd haar_sample_unitary(int dim, SeedPath seed) {
    if (dim < 1) throw_invalid("haar_sample_unitary requires D >= 1");
    RngStream rng(seed.master_seed, seed.stream_index);
    Eigen::MatrixXcd ginibre(dim, dim);
    for (int col = 0; col < dim; ++col)
        for (int row = 0; row < dim; ++row)
            ginibre(row, col) = complex<double>(rng.gaussian(), rng.gaussian());
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR();
    // Fix phases so the triangular factor has positive real diagonal.
    for (int col = 0; col < dim; ++col) {
        const complex<double> rd = r(col, col);
        const double mag = std::abs(rd);
        if (mag > 0) q.col(col) *= rd / mag;
    }
    return q;
}

double closed_form_mean_prob(int dim, bool x_equals_k, complex<double> mu_t) {
    if (dim < 2) throw_invalid("closed_form_mean_prob requires D >= 2");
    const double d = dim;
    const double delta = x_equals_k ? 1.0 : 0.0;
    const double a = std::norm(mu_t);
    return (d - delta + a * (delta - 1.0 / d)) / (d * d - 1.0);
}

double closed_form_second_moment_exact(int dim, bool x_equals_k, complex<double> mu_t,
                                       complex<double> mu_2t) {
    const double d = dim;
    const double a = std::norm(mu_t);                                // |mu(t)|^2
    const double b = std::norm(mu_2t);                               // |mu(2t)|^2
    const double r = 2.0 * std::real(mu_t * mu_t * std::conj(mu_2t));  // 2 Re[mu(t)^2 mu(-2t)]
    if (x_equals_k) {
        const double num = 2 * d * d + 6 * d + (4 * d + 8) * a + a * a + r + b;
        return num / (d * (d + 1) * (d + 2) * (d + 3));
    }
    const double num =
        2 * d * d * d * d + 8 * d * d * d + 6 * d * d - (4 * d * d + 12 * d + 8) * a + 2 * a * a +
        2 * r + 2 * b;
    return num / (d * d * (d - 1) * (d + 1) * (d + 2) * (d + 3));
}

double closed_form_var_prob_exact(int dim, bool x_equals_k, complex<double> mu_t,
                                  complex<double> mu_2t) {
    const double mean = closed_form_mean_prob(dim, x_equals_k, mu_t);
    return closed_form_second_moment_exact(dim, x_equals_k, mu_t, mu_2t) - mean * mean;
}

double closed_form_var_prob(int dim, bool x_equals_k, complex<double> mu_t,
                            complex<double> mu_2t) {
    const double d = dim;
    const double delta = x_equals_k ? 1.0 : 0.0;
    const double a = std::norm(mu_t);
    const double b = std::norm(mu_2t);
    const double r = 2.0 * std::real(mu_t * mu_t * std::conj(mu_2t));
    return (d * d - 2 * d + 4 + (7 - 2 * d) * delta + a * (2 * d * delta - 10 * delta - 2) +
            delta * b + delta * r) /
           (d * d * d * d);
}

double second_moment_weingarten(const Eigen::VectorXd& energies, double t, bool x_equals_k) {
    const int dim = static_cast<int>(energies.size());
    const auto perms = symmetric_group(4);
    const Eigen::MatrixXd minv = invert_gram(gram_matrix(4, dim));
    const int n = static_cast<int>(perms.size());
    Eigen::VectorXd left(n);
    Eigen::VectorXcd right(n);
    for (int i = 0; i < n; ++i) {
        left[i] = l4_phi_inner(perms[i], x_equals_k);
        right[i] = phi_r_inner(perms[i], energies, t, 4);
    }
    const Eigen::VectorXcd weighted = minv.cast<complex<double>>() * right;
    complex<double> value = 0.0;
    for (int i = 0; i < n; ++i) value += left[i] * weighted[i];
    return std::real(value);
}

McMoment mc_prob_moment(int dim, const Eigen::VectorXd& energies, double t, int x, int k,
                        int power, int n_samples, SeedPath seed) {
    if (n_samples < 2) throw_invalid("mc_prob_moment needs n_samples >= 2");
    if (x < 0 || x >= dim || k < 0 || k >= dim) throw_invalid("outcome index out of range");
    std::vector<double> values(n_samples);
    parallel_for_index(static_cast<std::size_t>(n_samples), [&](std::size_t s) {
        Eigen::MatrixXcd c = haar_sample_unitary(
            dim, SeedPath{seed.master_seed, seed.stream_index * 0x10000 + s});
        complex<double> amp = 0.0;
        for (int a = 0; a < dim; ++a)
            amp += c(k, a) * std::polar(1.0, -t * energies[a]) * std::conj(c(x, a));
        values[s] = std::pow(std::norm(amp), power);
    });
    McMoment m;
    m.n_samples = n_samples;
    double acc = 0.0;
    for (double v : values) acc += v;
    m.mean = acc / n_samples;
    double ss = 0.0;
    for (double v : values) ss += (v - m.mean) * (v - m.mean);
    m.stderr_mean = std::sqrt(ss / (n_samples - 1.0) / n_samples);
    return m;
}

McMoment mc_fourth_moment(int dim, const Eigen::VectorXd& energies, double t, int n_samples,
                          SeedPath seed) {
    return mc_prob_moment(dim, energies, t, /*x=*/0, /*k=*/1, /*power=*/4, n_samples, seed);
}

}  // namespace ite
