// Exercises the shared-library C interface only: no internal headers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "itelab/itelab.h"

namespace {

const char* kGueSpec = R"({"variant":"gue","D":8,"sigma2":0.5,"normalize":true})";

}  // namespace

TEST_CASE("version and default configs are exposed") {
    REQUIRE(ite_version() != nullptr);
    CHECK(std::string(ite_version()).find("itelab") != std::string::npos);
    const char* cfg = ite_default_config("scaling");
    REQUIRE(cfg != nullptr);
    CHECK(std::string(cfg).find("family") != std::string::npos);
    CHECK(ite_default_config("nonsense") == nullptr);
}

TEST_CASE("hamiltonian lifecycle") {
    ite_hamiltonian* h = nullptr;
    REQUIRE(ite_hamiltonian_create(kGueSpec, 123, 0, &h) == ITE_OK);
    REQUIRE(h != nullptr);
    int dim = 0;
    REQUIRE(ite_hamiltonian_dim(h, &dim) == ITE_OK);
    CHECK(dim == 8);

    std::vector<double> entries(2 * 8 * 8);
    REQUIRE(ite_hamiltonian_entries(h, entries.data()) == ITE_OK);
    // Hermiticity through the flat view: entry (a,b) == conj(entry (b,a)).
    for (int a = 0; a < 8; ++a)
        for (int b = 0; b < 8; ++b) {
            CHECK(entries[2 * (a * 8 + b)] == entries[2 * (b * 8 + a)]);
            CHECK(entries[2 * (a * 8 + b) + 1] == -entries[2 * (b * 8 + a) + 1]);
        }

    ite_spectrum* s = nullptr;
    REQUIRE(ite_diagonalize(h, &s) == ITE_OK);
    REQUIRE(s != nullptr);
    int sdim = 0;
    REQUIRE(ite_spectrum_dim(s, &sdim) == ITE_OK);
    CHECK(sdim == 8);
    std::vector<double> energies(8);
    REQUIRE(ite_spectrum_energies(s, energies.data()) == ITE_OK);
    for (int i = 1; i < 8; ++i) CHECK(energies[i] >= energies[i - 1]);

    // t = 0 leaves the initial outcome certain.
    std::vector<double> probs(8);
    REQUIRE(ite_evolve_probabilities(s, 3, 0.0, probs.data()) == ITE_OK);
    CHECK(std::abs(probs[3] - 1.0) < 1e-12);

    double var = 0.0;
    REQUIRE(ite_outcome_variance(probs.data(), 8, &var) == ITE_OK);
    CHECK(std::abs(var - 7.0 / 64) < 1e-10);
    double l1 = 0.0;
    REQUIRE(ite_l1_distance_to_uniform(probs.data(), 8, &l1) == ITE_OK);
    CHECK(std::abs(l1 - 2.0 * 7 / 8) < 1e-10);

    ite_spectrum_free(s);
    ite_hamiltonian_free(h);
}

TEST_CASE("invalid input surfaces as an error code with a message") {
    ite_hamiltonian* h = nullptr;
    CHECK(ite_hamiltonian_create("{not json", 0, 0, &h) == ITE_INVALID_INPUT);
    CHECK(h == nullptr);
    REQUIRE(ite_last_error() != nullptr);
    CHECK(std::strlen(ite_last_error()) > 0);

    CHECK(ite_hamiltonian_create(R"({"variant":"gue","D":8,"bogus":1})", 0, 0, &h) ==
          ITE_INVALID_INPUT);
    CHECK(ite_hamiltonian_create(nullptr, 0, 0, &h) == ITE_INVALID_INPUT);
}

TEST_CASE("running a command through the C surface") {
    const std::filesystem::path out =
        std::filesystem::temp_directory_path() / "itelab_capi_run";
    std::filesystem::create_directories(out);

    const char* cfg = R"({"D":4,"t":1.3,"mc_samples":0,"tolerance":1e-9})";
    CHECK(ite_run_command("haar-verify", cfg, out.string().c_str(), 7, 1, 1, 0) == ITE_OK);
    CHECK(std::filesystem::exists(out / "haar_table.csv"));
    CHECK(std::filesystem::exists(out / "manifest.json"));

    CHECK(ite_run_command("no-such-command", nullptr, out.string().c_str(), 7, 1, 1, 0) ==
          ITE_INVALID_INPUT);
    CHECK(ite_run_command("haar-verify", "{\"D\":-3}", out.string().c_str(), 7, 1, 1, 0) ==
          ITE_INVALID_INPUT);
}
