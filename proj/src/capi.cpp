#include "itelab/itelab.h"

#include <cstring>
#include <map>
#include <mutex>
#include <string>

#include "dynamics.hpp"
#include "errors.hpp"
#include "experiments.hpp"
#include "io.hpp"
#include "operators.hpp"

struct ite_hamiltonian {
    ite::DenseHermitian value;
};

struct ite_spectrum {
    ite::Spectrum value;
};

namespace {

thread_local std::string g_last_error;

ite_status to_status(const ite::Error& e) {
    switch (e.code()) {
        case ite::ErrorCode::InvalidInput:
        case ite::ErrorCode::Capacity:
            return ITE_INVALID_INPUT;
        case ite::ErrorCode::CheckFailed:
            return ITE_CHECK_FAILED;
        case ite::ErrorCode::Numeric:
        default:
            return ITE_NUMERIC;
    }
}

template <typename Fn>
ite_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return ITE_OK;
    } catch (const ite::Error& e) {
        g_last_error = e.what();
        return to_status(e);
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return ITE_NUMERIC;
    }
}

ite_status require(bool ok, const char* message) {
    if (ok) return ITE_OK;
    g_last_error = message;
    return ITE_INVALID_INPUT;
}

}  // namespace

extern "C" {

const char* ite_version(void) {
    static const std::string version = ite::code_version();
    return version.c_str();
}

const char* ite_last_error(void) { return g_last_error.c_str(); }

ite_status ite_hamiltonian_create(const char* spec_json, uint64_t master_seed,
                                  uint64_t stream_index, ite_hamiltonian** out) {
    if (auto s = require(spec_json && out, "null argument"); s != ITE_OK) return s;
    *out = nullptr;
    return guarded([&] {
        const ite::EnsembleSpec spec = ite::EnsembleSpec::from_json(spec_json);
        *out = new ite_hamiltonian{
            ite::sample_hamiltonian(spec, ite::SeedPath{master_seed, stream_index})};
    });
}

ite_status ite_hamiltonian_dim(const ite_hamiltonian* h, int* out_dim) {
    if (auto s = require(h && out_dim, "null argument"); s != ITE_OK) return s;
    *out_dim = h->value.dim();
    return ITE_OK;
}

ite_status ite_hamiltonian_entries(const ite_hamiltonian* h, double* out) {
    if (auto s = require(h && out, "null argument"); s != ITE_OK) return s;
    const int dim = h->value.dim();
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c) {
            const std::complex<double> v = h->value.mat(r, c);
            out[2 * (r * dim + c)] = v.real();
            out[2 * (r * dim + c) + 1] = v.imag();
        }
    return ITE_OK;
}

ite_status ite_hamiltonian_dump(const ite_hamiltonian* h, const char* path) {
    if (auto s = require(h && path, "null argument"); s != ITE_OK) return s;
    return guarded([&] { ite::dump_hermitian_binary(path, h->value); });
}

void ite_hamiltonian_free(ite_hamiltonian* h) { delete h; }

ite_status ite_diagonalize(const ite_hamiltonian* h, ite_spectrum** out) {
    if (auto s = require(h && out, "null argument"); s != ITE_OK) return s;
    *out = nullptr;
    return guarded([&] { *out = new ite_spectrum{ite::diagonalize(h->value)}; });
}

ite_status ite_spectrum_dim(const ite_spectrum* s, int* out_dim) {
    if (auto st = require(s && out_dim, "null argument"); st != ITE_OK) return st;
    *out_dim = static_cast<int>(s->value.energies.size());
    return ITE_OK;
}

ite_status ite_spectrum_energies(const ite_spectrum* s, double* out) {
    if (auto st = require(s && out, "null argument"); st != ITE_OK) return st;
    const int dim = static_cast<int>(s->value.energies.size());
    std::memcpy(out, s->value.energies.data(), sizeof(double) * dim);
    return ITE_OK;
}

ite_status ite_evolve_probabilities(const ite_spectrum* s, int x, double t, double* out) {
    if (auto st = require(s && out, "null argument"); st != ITE_OK) return st;
    return guarded([&] {
        const ite::OutcomeDistribution dist = ite::evolve_probabilities(s->value, x, t);
        std::memcpy(out, dist.probs.data(), sizeof(double) * dist.probs.size());
    });
}

void ite_spectrum_free(ite_spectrum* s) { delete s; }

ite_status ite_outcome_variance(const double* probs, int dim, double* out) {
    if (auto s = require(probs && out && dim > 0, "null argument or bad dim"); s != ITE_OK)
        return s;
    return guarded([&] {
        ite::OutcomeDistribution dist;
        dist.probs.assign(probs, probs + dim);
        *out = ite::outcome_variance(dist);
    });
}

ite_status ite_l1_distance_to_uniform(const double* probs, int dim, double* out) {
    if (auto s = require(probs && out && dim > 0, "null argument or bad dim"); s != ITE_OK)
        return s;
    return guarded([&] {
        ite::OutcomeDistribution dist;
        dist.probs.assign(probs, probs + dim);
        *out = ite::l1_distance_to_uniform(dist);
    });
}

ite_status ite_run_command(const char* name, const char* config_json, const char* out_dir,
                           uint64_t master_seed, int threads, int no_plot, int check_mode) {
    if (auto s = require(name && out_dir, "null argument"); s != ITE_OK) return s;
    ite::RunOptions opt;
    opt.out_dir = out_dir;
    opt.master_seed = master_seed;
    opt.threads = threads;
    opt.no_plot = no_plot != 0;
    opt.check = check_mode != 0;
    const int code = ite::run_command(name, config_json ? config_json : "", opt);
    return static_cast<ite_status>(code);
}

const char* ite_default_config(const char* name) {
    if (!name) return nullptr;
    static std::mutex mu;
    static std::map<std::string, std::string> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(name);
    if (it == cache.end()) {
        try {
            it = cache.emplace(name, ite::default_config(name)).first;
        } catch (const ite::Error&) {
            it = cache.emplace(name, "").first;
        }
    }
    return it->second.empty() ? nullptr : it->second.c_str();
}

}  // extern "C"
