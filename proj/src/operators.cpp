#include "operators.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "errors.hpp"
#include "json.hpp"

namespace ite {

using std::complex;
using json = nlohmann::json;

int EnsembleSpec::dimension() const {
    switch (kind) {
        case EnsembleKind::Gue:
            return dim;
        case EnsembleKind::KickedTop:
            return two_j + 1;
        default:
            return 1 << n;
    }
}

std::string EnsembleSpec::variant_name() const {
    switch (kind) {
        case EnsembleKind::Gue: return "gue";
        case EnsembleKind::RlhComplete: return "rlh_complete";
        case EnsembleKind::RlhChain: return "rlh_chain";
        case EnsembleKind::RlhLattice: return "rlh_lattice";
        case EnsembleKind::HeisenbergTwoField: return "heisenberg_two_field";
        case EnsembleKind::KickedTop: return "kicked_top";
    }
    return "?";
}

std::string EnsembleSpec::describe() const {
    std::ostringstream os;
    os << variant_name();
    switch (kind) {
        case EnsembleKind::Gue: os << " D=" << dim << " sigma2=" << sigma2; break;
        case EnsembleKind::RlhLattice: os << " " << rows << "x" << cols; break;
        case EnsembleKind::KickedTop: os << " 2j=" << two_j; break;
        default: os << " n=" << n; break;
    }
    if (normalize) os << " normalized";
    return os.str();
}

namespace {

void validate_spec(const EnsembleSpec& s) {
    switch (s.kind) {
        case EnsembleKind::Gue:
            if (s.dim < 2) throw_invalid("GUE requires D >= 2");
            if (!(s.sigma2 > 0)) throw_invalid("GUE requires sigma2 > 0");
            break;
        case EnsembleKind::RlhComplete:
        case EnsembleKind::RlhChain:
            if (s.n < 2) throw_invalid("RLH requires n >= 2");
            if (s.n > kMaxQubits) throw_capacity("n exceeds qubit guard");
            break;
        case EnsembleKind::RlhLattice:
            if (s.rows < 1 || s.cols < 1 || s.rows * s.cols != s.n)
                throw_invalid("lattice rows*cols must equal n");
            if (s.n < 2) throw_invalid("RLH requires n >= 2");
            if (s.n > kMaxQubits) throw_capacity("n exceeds qubit guard");
            break;
        case EnsembleKind::HeisenbergTwoField:
            if (s.n < 3) throw_invalid("two-field Heisenberg requires n >= 3");
            if (s.n > kMaxQubits) throw_capacity("n exceeds qubit guard");
            break;
        case EnsembleKind::KickedTop:
            if (s.two_j < 1) throw_invalid("kicked top requires 2j >= 1");
            break;
    }
}

}  // namespace

EnsembleSpec EnsembleSpec::gue(int dim, double sigma2) {
    EnsembleSpec s;
    s.kind = EnsembleKind::Gue;
    s.dim = dim;
    s.sigma2 = sigma2;
    s.normalize = false;
    validate_spec(s);
    return s;
}

EnsembleSpec EnsembleSpec::rlh_complete(int n, bool normalize) {
    EnsembleSpec s;
    s.kind = EnsembleKind::RlhComplete;
    s.n = n;
    s.normalize = normalize;
    validate_spec(s);
    return s;
}

EnsembleSpec EnsembleSpec::rlh_chain(int n, bool normalize) {
    EnsembleSpec s;
    s.kind = EnsembleKind::RlhChain;
    s.n = n;
    s.normalize = normalize;
    validate_spec(s);
    return s;
}

EnsembleSpec EnsembleSpec::rlh_lattice(int rows, int cols, bool normalize) {
    EnsembleSpec s;
    s.kind = EnsembleKind::RlhLattice;
    s.rows = rows;
    s.cols = cols;
    s.n = rows * cols;
    s.normalize = normalize;
    validate_spec(s);
    return s;
}

EnsembleSpec EnsembleSpec::heisenberg_two_field(int n, bool normalize) {
    EnsembleSpec s;
    s.kind = EnsembleKind::HeisenbergTwoField;
    s.n = n;
    s.normalize = normalize;
    validate_spec(s);
    return s;
}

EnsembleSpec EnsembleSpec::kicked_top(int two_j, std::array<double, 3> alpha, std::array<double, 3> tau) {
    EnsembleSpec s;
    s.kind = EnsembleKind::KickedTop;
    s.two_j = two_j;
    s.alpha = alpha;
    s.tau = tau;
    s.normalize = false;
    validate_spec(s);
    return s;
}

std::string EnsembleSpec::to_json() const {
    json j;
    j["variant"] = variant_name();
    j["normalize"] = normalize;
    switch (kind) {
        case EnsembleKind::Gue:
            j["D"] = dim;
            j["sigma2"] = sigma2;
            break;
        case EnsembleKind::RlhLattice:
            j["rows"] = rows;
            j["cols"] = cols;
            break;
        case EnsembleKind::KickedTop:
            j["two_j"] = two_j;
            j["alpha"] = alpha;
            j["tau"] = tau;
            break;
        default:
            j["n"] = n;
            break;
    }
    return j.dump();
}

EnsembleSpec spec_from_parsed_json(const json& j) {
    if (!j.is_object()) throw_invalid("ensemble spec must be a JSON object");
    static const std::set<std::string> allowed = {"variant", "n", "D", "sigma2", "rows",
                                                  "cols", "two_j", "alpha", "tau", "normalize"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!allowed.count(it.key())) throw_invalid("unknown ensemble spec key: " + it.key());
    }
    if (!j.contains("variant")) throw_invalid("ensemble spec missing 'variant'");
    const std::string variant = j.at("variant").get<std::string>();
    const bool normalize = j.value("normalize", true);
    if (variant == "gue") {
        auto s = EnsembleSpec::gue(j.value("D", 0), j.value("sigma2", 0.5));
        s.normalize = j.value("normalize", false);
        return s;
    }
    if (variant == "rlh_complete") return EnsembleSpec::rlh_complete(j.value("n", 0), normalize);
    if (variant == "rlh_chain") return EnsembleSpec::rlh_chain(j.value("n", 0), normalize);
    if (variant == "rlh_lattice") {
        if (j.contains("rows") && j.contains("cols"))
            return EnsembleSpec::rlh_lattice(j.at("rows").get<int>(), j.at("cols").get<int>(), normalize);
        auto shape = default_lattice_shape(j.value("n", 0));
        return EnsembleSpec::rlh_lattice(shape.first, shape.second, normalize);
    }
    if (variant == "heisenberg_two_field")
        return EnsembleSpec::heisenberg_two_field(j.value("n", 0), normalize);
    if (variant == "kicked_top") {
        std::array<double, 3> alpha{0, 0, 0}, tau{0, 0, 0};
        if (j.contains("alpha")) alpha = j.at("alpha").get<std::array<double, 3>>();
        if (j.contains("tau")) tau = j.at("tau").get<std::array<double, 3>>();
        return EnsembleSpec::kicked_top(j.value("two_j", 0), alpha, tau);
    }
    throw_invalid("unknown ensemble variant: " + variant);
}

EnsembleSpec EnsembleSpec::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw_invalid("ensemble spec is not valid JSON");
    return spec_from_parsed_json(j);
}

void accumulate_pauli_string(Eigen::MatrixXcd& target, double coeff, int n,
                             const std::vector<PauliFactor>& factors) {
    const int dim = 1 << n;
    // Bit position of a site: site 0 is the most significant bit.
    std::uint32_t xmask = 0, zmask = 0, ymask = 0;
    for (const auto& f : factors) {
        if (f.site < 0 || f.site >= n) throw_invalid("pauli factor site out of range");
        const std::uint32_t bit = 1u << (n - 1 - f.site);
        if ((xmask | zmask) & bit) throw_invalid("duplicate site in pauli string");
        switch (f.axis) {
            case PauliAxis::X: xmask |= bit; break;
            case PauliAxis::Y: xmask |= bit; zmask |= bit; ymask |= bit; break;
            case PauliAxis::Z: zmask |= bit; break;
        }
    }
    const int y_count = __builtin_popcount(ymask);
    // Global i^y phase from Y = i * (sign flip) * (bit flip) acting on |0>.
    static const complex<double> i_pow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    const complex<double> base = coeff * i_pow[y_count & 3];
    for (int col = 0; col < dim; ++col) {
        const int row = col ^ static_cast<int>(xmask);
        // (-1) for each Z or Y factor that sees a set bit.
        const int sign_bits = __builtin_popcount(static_cast<std::uint32_t>(col) & zmask);
        target(row, col) += (sign_bits & 1) ? -base : base;
    }
}

DenseHermitian build_pauli_string(int n, const std::vector<PauliFactor>& factors) {
    if (n < 1) throw_invalid("n must be >= 1");
    if (n > kMaxQubits) throw_capacity("n exceeds qubit guard");
    DenseHermitian h;
    h.mat = Eigen::MatrixXcd::Zero(1 << n, 1 << n);
    accumulate_pauli_string(h.mat, 1.0, n, factors);
    h.prov.ensemble = "pauli_string";
    return h;
}

DenseHermitian sample_gue(int dim, double sigma2, SeedPath seed) {
    if (dim < 2) throw_invalid("GUE requires D >= 2");
    if (!(sigma2 > 0)) throw_invalid("GUE requires sigma2 > 0");
    RngStream rng(seed.master_seed, seed.stream_index);
    DenseHermitian h;
    h.mat.resize(dim, dim);
    const double sd = std::sqrt(sigma2);
    const double so = std::sqrt(sigma2 / 2.0);
    for (int a = 0; a < dim; ++a) h.mat(a, a) = sd * rng.gaussian();
    for (int a = 0; a < dim; ++a) {
        for (int b = a + 1; b < dim; ++b) {
            const double re = so * rng.gaussian();
            const double im = so * rng.gaussian();
            h.mat(a, b) = complex<double>(re, im);
            h.mat(b, a) = complex<double>(re, -im);
        }
    }
    h.prov = {"gue", seed.master_seed, seed.stream_index, "D=" + std::to_string(dim)};
    return h;
}

std::vector<std::pair<int, int>> rlh_edges(const EnsembleSpec& spec) {
    std::set<std::pair<int, int>> edges;
    auto add = [&edges](int i, int j) {
        if (i == j) return;
        edges.insert({std::min(i, j), std::max(i, j)});
    };
    switch (spec.kind) {
        case EnsembleKind::RlhComplete:
            for (int i = 0; i < spec.n; ++i)
                for (int j = i + 1; j < spec.n; ++j) add(i, j);
            break;
        case EnsembleKind::RlhChain:
            for (int i = 0; i < spec.n; ++i) add(i, (i + 1) % spec.n);
            break;
        case EnsembleKind::RlhLattice:
            for (int r = 0; r < spec.rows; ++r) {
                for (int c = 0; c < spec.cols; ++c) {
                    const int site = r * spec.cols + c;
                    add(site, r * spec.cols + (c + 1) % spec.cols);
                    add(site, ((r + 1) % spec.rows) * spec.cols + c);
                }
            }
            break;
        default:
            throw_invalid("rlh_edges: not an RLH variant");
    }
    return {edges.begin(), edges.end()};
}

namespace {

DenseHermitian normalized(DenseHermitian h, bool flag) {
    if (flag) {
        const double norm = spectral_norm(h.mat);
        if (norm > 0) h.mat /= norm;
    }
    return h;
}

constexpr PauliAxis kAxes[3] = {PauliAxis::X, PauliAxis::Y, PauliAxis::Z};

}  // namespace

DenseHermitian sample_rlh(const EnsembleSpec& spec, SeedPath seed) {
    if (spec.kind != EnsembleKind::RlhComplete && spec.kind != EnsembleKind::RlhChain &&
        spec.kind != EnsembleKind::RlhLattice)
        throw_invalid("sample_rlh: spec is not an RLH variant");
    if (spec.n < 2) throw_invalid("RLH requires n >= 2");
    if (spec.n > kMaxQubits) throw_capacity("n exceeds qubit guard");
    if (spec.kind == EnsembleKind::RlhLattice && spec.rows * spec.cols != spec.n)
        throw_invalid("lattice rows*cols must equal n");

    RngStream rng(seed.master_seed, seed.stream_index);
    const int dim = 1 << spec.n;
    DenseHermitian h;
    h.mat = Eigen::MatrixXcd::Zero(dim, dim);
    for (int site = 0; site < spec.n; ++site)
        for (PauliAxis p : kAxes)
            accumulate_pauli_string(h.mat, rng.gaussian(), spec.n, {{site, p}});
    for (const auto& [i, j] : rlh_edges(spec))
        for (PauliAxis p : kAxes)
            for (PauliAxis q : kAxes)
                accumulate_pauli_string(h.mat, rng.gaussian(), spec.n, {{i, p}, {j, q}});
    h.prov = {spec.variant_name(), seed.master_seed, seed.stream_index, spec.describe()};
    return normalized(std::move(h), spec.normalize);
}

DenseHermitian build_heisenberg_two_field(int n, bool normalize) {
    if (n < 3) throw_invalid("two-field Heisenberg requires n >= 3");
    if (n > kMaxQubits) throw_capacity("n exceeds qubit guard");
    const int dim = 1 << n;
    DenseHermitian h;
    h.mat = Eigen::MatrixXcd::Zero(dim, dim);
    // 1-based site i gets a Z field for i <= floor(n/2), X field otherwise.
    for (int site = 0; site < n; ++site) {
        const PauliAxis axis = (site + 1 <= n / 2) ? PauliAxis::Z : PauliAxis::X;
        accumulate_pauli_string(h.mat, 1.0, n, {{site, axis}});
    }
    for (int site = 0; site < n; ++site) {
        const int next = (site + 1) % n;
        for (PauliAxis p : kAxes) accumulate_pauli_string(h.mat, 1.0, n, {{site, p}, {next, p}});
    }
    h.prov.ensemble = "heisenberg_two_field";
    h.prov.params = "n=" + std::to_string(n);
    return normalized(std::move(h), normalize);
}

AngularMomentumOps angular_momentum_ops(int two_j) {
    if (two_j < 1) throw_invalid("angular momentum requires 2j >= 1");
    const int dim = two_j + 1;
    const double j = two_j / 2.0;
    AngularMomentumOps ops;
    ops.jx.mat = Eigen::MatrixXcd::Zero(dim, dim);
    ops.jy.mat = Eigen::MatrixXcd::Zero(dim, dim);
    ops.jz.mat = Eigen::MatrixXcd::Zero(dim, dim);
    // Basis index a corresponds to m = j - a (m descending).
    for (int a = 0; a < dim; ++a) ops.jz.mat(a, a) = j - a;
    for (int a = 1; a < dim; ++a) {
        const double m = j - a;  // J+ raises m -> m+1, i.e. index a -> a-1
        const double c = std::sqrt(j * (j + 1) - m * (m + 1));
        ops.jx.mat(a - 1, a) += 0.5 * c;
        ops.jx.mat(a, a - 1) += 0.5 * c;
        ops.jy.mat(a - 1, a) += complex<double>(0, -0.5) * c;
        ops.jy.mat(a, a - 1) += complex<double>(0, 0.5) * c;
    }
    ops.jx.prov.ensemble = ops.jy.prov.ensemble = ops.jz.prov.ensemble = "angular_momentum";
    return ops;
}

KickedTopGenerators build_kicked_top_generators(const EnsembleSpec& spec) {
    if (spec.kind != EnsembleKind::KickedTop) throw_invalid("spec is not a kicked top");
    auto ops = angular_momentum_ops(spec.two_j);
    KickedTopGenerators g;
    // The quadratic torsion carries the customary 1/(2j+1) so that the
    // classical kick strength, and with it the chaotic phase-space structure,
    // stays fixed as the representation dimension grows.
    const double scale = 1.0 / (spec.two_j + 1.0);
    g.torsion.mat = scale * (spec.tau[0] * (ops.jx.mat * ops.jx.mat) +
                             spec.tau[1] * (ops.jy.mat * ops.jy.mat) +
                             spec.tau[2] * (ops.jz.mat * ops.jz.mat));
    g.kick.mat = spec.alpha[0] * ops.jx.mat + spec.alpha[1] * ops.jy.mat + spec.alpha[2] * ops.jz.mat;
    g.torsion.prov.ensemble = g.kick.prov.ensemble = "kicked_top";
    g.torsion.prov.params = g.kick.prov.params = spec.describe();
    return g;
}

DenseHermitian sample_hamiltonian(const EnsembleSpec& spec, SeedPath seed) {
    validate_spec(spec);
    switch (spec.kind) {
        case EnsembleKind::Gue: {
            auto h = sample_gue(spec.dim, spec.sigma2, seed);
            return normalized(std::move(h), spec.normalize);
        }
        case EnsembleKind::RlhComplete:
        case EnsembleKind::RlhChain:
        case EnsembleKind::RlhLattice:
            return sample_rlh(spec, seed);
        case EnsembleKind::HeisenbergTwoField:
            return build_heisenberg_two_field(spec.n, spec.normalize);
        case EnsembleKind::KickedTop:
            throw_invalid("kicked top has no single Hamiltonian; use build_kicked_top_generators");
    }
    throw_invalid("unreachable ensemble kind");
}

std::pair<int, int> default_lattice_shape(int n) {
    switch (n) {
        case 4: return {2, 2};
        case 6: return {3, 2};
        case 8: return {4, 2};
        case 9: return {3, 3};
        case 10: return {5, 2};
        case 12: return {4, 3};
        case 14: return {7, 2};
        default: throw_invalid("no default lattice shape for n=" + std::to_string(n));
    }
}

}  // namespace ite
