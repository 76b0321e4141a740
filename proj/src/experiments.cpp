#include "experiments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "distinguisher.hpp"
#include "dynamics.hpp"
#include "ensemble.hpp"
#include "errors.hpp"
#include "gue.hpp"
#include "haar.hpp"
#include "io.hpp"
#include "json.hpp"
#include "operators.hpp"
#include "parallel.hpp"

namespace ite {

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& config, const std::set<std::string>& allowed,
                         const std::string& where) {
    if (!config.is_object()) throw_invalid(where + ": config must be a JSON object");
    for (const auto& [key, value] : config.items())
        if (!allowed.count(key)) throw_invalid(where + ": unknown config key '" + key + "'");
}

std::vector<double> linspace(double lo, double hi, int n) {
    if (n < 2 || hi <= lo) throw_invalid("bad time grid");
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
    return out;
}

const char* kPalette[] = {"#1f6fb2", "#d1495b", "#66a182", "#edae49",
                          "#775bb5", "#2e4057", "#8d6a4b", "#00798c"};

struct CheckFailure {
    std::string message;
};

void check_assert(bool ok, const std::string& message) {
    if (!ok) throw CheckFailure{message};
}

// ---------------------------------------------------------------- spread ---

void cmd_spread(const json& config, const RunOptions& opt, RunManifest& manifest) {
    reject_unknown_keys(config, {"ensembles", "n_trials", "x", "t_max", "n_times"}, "spread");
    if (!config.contains("ensembles") || !config["ensembles"].is_array() ||
        config["ensembles"].empty())
        throw_invalid("spread: 'ensembles' must be a nonempty array of ensemble specs");
    const int n_trials = config.value("n_trials", 50);
    const int x = config.value("x", 0);
    const double t_max = config.value("t_max", 10.0);
    const int n_times = config.value("n_times", 96);
    const std::vector<double> times = linspace(0.0, t_max, n_times);

    CsvTable curves;
    curves.columns = {"time"};
    CsvTable teq;
    teq.columns = {"D", "t_eq"};
    std::vector<std::vector<double>> series_values;
    std::vector<std::string> series_names;
    for (const auto& espec : config["ensembles"]) {
        const EnsembleSpec spec = EnsembleSpec::from_json(espec.dump());
        TimeSeries mean;
        double t_eq = 0.0;
        if (spec.kind == EnsembleKind::HeisenbergTwoField) {
            // Deterministic model: one diagonalization, no ensemble averaging.
            const Spectrum s = diagonalize(build_heisenberg_two_field(spec.n, spec.normalize));
            mean = escape_curve(s, x, times);
            t_eq = estimate_t_eq(mean);
        } else {
            EnsembleRunConfig run;
            run.spec = spec;
            run.n_trials = n_trials;
            run.x = x;
            run.eval_times = times;
            run.master_seed = opt.master_seed;
            std::tie(mean, t_eq) = ensemble_escape_curve(run);
        }
        series_values.push_back(mean.values);
        series_names.push_back(spec.variant_name() + "_D" + std::to_string(spec.dimension()));
        curves.columns.push_back(series_names.back());
        teq.rows.push_back({static_cast<double>(spec.dimension()), t_eq});
        if (opt.check) check_assert(t_eq > 0.0, "spread: no equilibration signal");
    }
    for (std::size_t i = 0; i < times.size(); ++i) {
        std::vector<double> row{times[i]};
        for (const auto& v : series_values) row.push_back(v[i]);
        curves.rows.push_back(row);
    }
    write_csv(opt.out_dir + "/spread_curves.csv", curves);
    write_csv(opt.out_dir + "/spread_teq.csv", teq);
    manifest.files.push_back({"spread_curves.csv", ""});
    manifest.files.push_back({"spread_teq.csv", ""});
    if (!opt.no_plot) {
        PlotSpec plot;
        plot.title = "Escape from the initial outcome";
        plot.xlabel = "time";
        plot.ylabel = "mean Pr(k != x)";
        for (std::size_t s = 0; s < series_values.size(); ++s) {
            PlotSeries ps;
            ps.label = series_names[s];
            ps.x = times;
            ps.y = series_values[s];
            ps.color = kPalette[s % 8];
            plot.series.push_back(std::move(ps));
        }
        write_svg_plot(opt.out_dir + "/spread.svg", plot);
        manifest.files.push_back({"spread.svg", ""});
    }
}

// --------------------------------------------------------------- scaling ---

EnsembleSpec family_spec(const std::string& family, int size, const json& config) {
    if (family == "rlh_complete") return EnsembleSpec::rlh_complete(size);
    if (family == "rlh_chain") return EnsembleSpec::rlh_chain(size);
    if (family == "rlh_lattice") {
        const auto [rows, cols] = default_lattice_shape(size);
        return EnsembleSpec::rlh_lattice(rows, cols);
    }
    if (family == "heisenberg") return EnsembleSpec::heisenberg_two_field(size);
    if (family == "kicked_top") {
        std::array<double, 3> alpha{1.1, 1.0, 1.0};
        std::array<double, 3> tau{10.0, 0.0, 1.0};
        if (config.contains("alpha"))
            for (int i = 0; i < 3; ++i) alpha[i] = config["alpha"].at(i).get<double>();
        if (config.contains("tau"))
            for (int i = 0; i < 3; ++i) tau[i] = config["tau"].at(i).get<double>();
        // size is the dimension D = 2j + 1 here.
        return EnsembleSpec::kicked_top(size - 1, alpha, tau);
    }
    throw_invalid("scaling: unknown family '" + family + "'");
}

void cmd_scaling(const json& config, const RunOptions& opt, RunManifest& manifest) {
    reject_unknown_keys(config,
                        {"family", "sizes", "n_trials", "t", "n_kicks", "x", "alpha", "tau"},
                        "scaling");
    const std::string family = config.value("family", "rlh_complete");
    if (!config.contains("sizes")) throw_invalid("scaling: 'sizes' is required");
    const std::vector<int> sizes = config["sizes"].get<std::vector<int>>();
    if (sizes.size() < 3) throw_invalid("scaling: need >= 3 sizes for a fit");
    const int n_trials = config.value("n_trials", 50);
    const double t = config.value("t", 10.0);
    const int n_kicks = config.value("n_kicks", 10);
    const int x = config.value("x", 0);

    CsvTable table;
    table.columns = {"D", "t", "mean", "var", "stderr_mean", "stderr_var", "n_trials"};
    std::vector<std::pair<double, double>> mean_points, var_points;
    for (int size : sizes) {
        const EnsembleSpec spec = family_spec(family, size, config);
        const double dim = spec.dimension();
        if (spec.kind == EnsembleKind::HeisenbergTwoField) {
            const Spectrum s = diagonalize(build_heisenberg_two_field(spec.n, spec.normalize));
            const double vk = outcome_variance(evolve_probabilities(s, x, t));
            table.rows.push_back({dim, t, vk, 0.0, 0.0, 0.0, 1});
            mean_points.push_back({dim, vk});
        } else if (spec.kind == EnsembleKind::KickedTop) {
            const double vk = outcome_variance(kicked_top_distribution(spec, x, n_kicks));
            table.rows.push_back({dim, static_cast<double>(n_kicks), vk, 0.0, 0.0, 0.0, 1});
            mean_points.push_back({dim, vk});
        } else {
            EnsembleRunConfig run;
            run.spec = spec;
            run.n_trials = n_trials;
            run.x = x;
            run.eval_times = {t};
            run.master_seed = opt.master_seed;
            const EnsembleMoments m = ensemble_outcome_moments(run);
            const MomentRow& row = m.per_time[0];
            table.rows.push_back({dim, t, row.mean, row.variance, row.stderr_mean, row.stderr_var,
                                  static_cast<double>(row.trial_values.size())});
            mean_points.push_back({dim, row.mean});
            if (row.variance > 0) var_points.push_back({dim, row.variance});
        }
    }
    write_csv(opt.out_dir + "/scaling_points.csv", table);
    manifest.files.push_back({"scaling_points.csv", ""});

    CsvTable fits;
    fits.columns = {"is_variance", "exponent", "prefactor", "r_squared"};
    const ScalingFit mean_fit = fit_power_law(mean_points);
    fits.rows.push_back({0.0, mean_fit.exponent, std::exp(mean_fit.log_prefactor),
                         mean_fit.r_squared});
    if (var_points.size() >= 3) {
        const ScalingFit var_fit = fit_power_law(var_points);
        fits.rows.push_back({1.0, var_fit.exponent, std::exp(var_fit.log_prefactor),
                             var_fit.r_squared});
    }
    write_csv(opt.out_dir + "/scaling_fits.csv", fits);
    manifest.files.push_back({"scaling_fits.csv", ""});
    if (opt.check)
        check_assert(mean_fit.r_squared > 0.8,
                     "scaling: mean power-law fit r^2 <= 0.8 (no clean scaling)");

    if (!opt.no_plot) {
        PlotSpec plot;
        plot.title = "Outcome-variance scaling (" + family + ")";
        plot.xlabel = "D";
        plot.ylabel = "outcome variance moments";
        plot.log_x = true;
        plot.log_y = true;
        PlotSeries mean_series;
        mean_series.label = "ensemble mean";
        for (const auto& [d, v] : mean_points) {
            mean_series.x.push_back(d);
            mean_series.y.push_back(v);
        }
        plot.series.push_back(mean_series);
        if (var_points.size() >= 3) {
            PlotSeries var_series;
            var_series.label = "ensemble variance";
            var_series.color = kPalette[1];
            for (const auto& [d, v] : var_points) {
                var_series.x.push_back(d);
                var_series.y.push_back(v);
            }
            plot.series.push_back(var_series);
        }
        write_svg_plot(opt.out_dir + "/scaling.svg", plot);
        manifest.files.push_back({"scaling.svg", ""});
    }
}

// ------------------------------------------------------------ formfactor ---

void cmd_formfactor(const json& config, const RunOptions& opt, RunManifest& manifest) {
    reject_unknown_keys(
        config, {"D", "n_samples", "t_min", "t_max", "n_times", "delta", "teq_fit", "teq_c"},
        "formfactor");
    const int dim = config.value("D", 64);
    const int n_samples = config.value("n_samples", 500);
    const double t_min = config.value("t_min", 0.02);
    const double t_max = config.value("t_max", 4.0);
    const int n_times = config.value("n_times", 60);
    const std::vector<double> times = linspace(t_min, t_max, n_times);

    const FormFactorCurve curve = gamma_monte_carlo(dim, times, n_samples,
                                                    SeedPath{opt.master_seed, 0});
    CsvTable table;
    table.columns = {"t", "analytic", "mc_mean", "mc_stderr"};
    const double cutoff = asymptotic_validity_cutoff(dim);
    for (std::size_t i = 0; i < times.size(); ++i) {
        table.rows.push_back({times[i], curve.analytic[i], curve.mc_mean[i], curve.mc_stderr[i]});
        if (opt.check && times[i] >= cutoff)
            check_assert(std::abs(curve.mc_mean[i] - curve.analytic[i]) <=
                             4.0 * curve.mc_stderr[i],
                         "formfactor: Monte Carlo deviates from the analytic curve by > 4 sigma "
                         "at t = " + std::to_string(times[i]));
    }
    write_csv(opt.out_dir + "/formfactor.csv", table);
    manifest.files.push_back({"formfactor.csv", ""});

    if (config.value("teq_fit", true)) {
        const double c = config.value("teq_c", 1.0);
        CsvTable teq;
        teq.columns = {"D", "t_eq"};
        std::vector<std::pair<double, double>> points;
        for (int e = 4; e <= 14; ++e) {
            const int d = 1 << e;
            const double v = t_eq_gue(d, c);
            teq.rows.push_back({static_cast<double>(d), v});
            points.push_back({static_cast<double>(d), v});
        }
        const ScalingFit fit = fit_power_law(points);
        teq.rows.push_back({0.0, fit.exponent});  // sentinel row: D=0 carries the exponent
        write_csv(opt.out_dir + "/formfactor_teq.csv", teq);
        manifest.files.push_back({"formfactor_teq.csv", ""});
        if (opt.check)
            check_assert(std::abs(fit.exponent + 1.0 / 6.0) < 0.05,
                         "formfactor: equilibration-time exponent off the -1/6 law");
    }

    if (config.value("delta", false)) {
        const DeltaCurve delta = delta_monte_carlo(dim, times, n_samples,
                                                   SeedPath{opt.master_seed, 1u << 20});
        CsvTable dt;
        dt.columns = {"t", "re", "im", "abs", "stderr"};
        for (std::size_t i = 0; i < times.size(); ++i)
            dt.rows.push_back({times[i], delta.mean[i].real(), delta.mean[i].imag(),
                               std::abs(delta.mean[i]), delta.stderr_mean[i]});
        write_csv(opt.out_dir + "/formfactor_delta.csv", dt);
        manifest.files.push_back({"formfactor_delta.csv", ""});
    }

    if (!opt.no_plot) {
        PlotSpec plot;
        plot.title = "Spectral form factor, D = " + std::to_string(dim);
        plot.xlabel = "t";
        plot.ylabel = "E[|tr exp(-iHt)|^2]";
        plot.log_y = true;
        PlotSeries analytic{"analytic", times, curve.analytic, {}, kPalette[0]};
        PlotSeries mc{"Monte Carlo", times, curve.mc_mean, curve.mc_stderr, kPalette[1]};
        plot.series = {analytic, mc};
        write_svg_plot(opt.out_dir + "/formfactor.svg", plot);
        manifest.files.push_back({"formfactor.svg", ""});
    }
}

// ----------------------------------------------------------- haar-verify ---

void cmd_haar_verify(const json& config, const RunOptions& opt, RunManifest& manifest) {
    reject_unknown_keys(config, {"D", "t", "mc_samples", "tolerance"}, "haar-verify");
    const int dim = config.value("D", 4);
    const double t = config.value("t", 1.3);
    const int mc_samples = config.value("mc_samples", 0);
    const double tol = config.value("tolerance", 1e-10);
    if (dim < 4) throw_invalid("haar-verify needs D >= 4");
    if (mc_samples < 0) throw_invalid("mc_samples must be >= 0");

    // A fixed nondegenerate probe spectrum keeps the run deterministic.
    Eigen::VectorXd energies(dim);
    RngStream rng(opt.master_seed, 0);
    for (int a = 0; a < dim; ++a) energies[a] = rng.gaussian();
    std::sort(energies.data(), energies.data() + dim);

    const TableReport report = verify_inner_product_table(energies, t, tol);
    CsvTable table;
    table.columns = {"row", "re_contracted", "im_contracted", "re_closed", "im_closed",
                     "deviation"};
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const TableRow& r = report.rows[i];
        table.rows.push_back({static_cast<double>(i), r.contracted.real(), r.contracted.imag(),
                              r.closed_form.real(), r.closed_form.imag(), r.deviation});
    }
    write_csv(opt.out_dir + "/haar_table.csv", table);
    manifest.files.push_back({"haar_table.csv", ""});

    json summary;
    summary["D"] = dim;
    summary["t"] = t;
    summary["max_deviation"] = report.max_deviation;
    summary["tolerance"] = tol;
    summary["pass"] = report.pass;

    const std::complex<double> mu_t = form_factor(energies, t);
    const std::complex<double> mu_2t = form_factor(energies, 2 * t);
    const double exact = closed_form_second_moment_exact(dim, false, mu_t, mu_2t);
    const double contracted = second_moment_weingarten(energies, t, false);
    summary["second_moment_closed_form"] = exact;
    summary["second_moment_contracted"] = contracted;
    const double route_dev = std::abs(exact - contracted);
    summary["second_moment_deviation"] = route_dev;

    if (mc_samples > 0) {
        const McMoment mc =
            mc_prob_moment(dim, energies, t, 0, 1, 1, mc_samples, SeedPath{opt.master_seed, 1});
        const double closed_mean = closed_form_mean_prob(dim, false, mu_t);
        summary["mc_mean"] = mc.mean;
        summary["mc_stderr"] = mc.stderr_mean;
        summary["closed_form_mean"] = closed_mean;
        if (opt.check)
            check_assert(std::abs(mc.mean - closed_mean) <= 4.0 * mc.stderr_mean,
                         "haar-verify: Monte Carlo mean deviates from closed form by > 4 sigma");
    }
    std::ofstream(opt.out_dir + "/haar_report.json") << summary.dump(2) << "\n";
    manifest.files.push_back({"haar_report.json", ""});
    if (opt.check) {
        check_assert(report.pass, "haar-verify: inner-product table mismatch, max deviation " +
                                      std::to_string(report.max_deviation));
        check_assert(route_dev <= 1e-9 * std::pow(static_cast<double>(dim), 4),
                     "haar-verify: contraction and closed-form second moments disagree");
    }
}

// ----------------------------------------------------------- distinguish ---

void cmd_distinguish(const json& config, const RunOptions& opt, RunManifest& manifest) {
    reject_unknown_keys(config, {"M", "N_grid", "n_trials", "m2", "oracle"}, "distinguish");
    const int m = config.value("M", 1024);
    std::vector<int> n_grid = config.value("N_grid", std::vector<int>{1, 2, 4, 8, 16, 32, 64});
    const int n_trials = config.value("n_trials", 2000);

    M2Source source;
    json m2 = config.value("m2", json{{"type", "dirichlet"}, {"c", 1.0}});
    reject_unknown_keys(m2, {"type", "c", "ensemble", "t", "pool"}, "distinguish.m2");
    const std::string type = m2.value("type", "dirichlet");
    if (type == "dirichlet") {
        source = dirichlet_m2_generator(m, m2.value("c", 1.0));
    } else if (type == "quantum") {
        if (!m2.contains("ensemble")) throw_invalid("distinguish: quantum m2 needs 'ensemble'");
        const EnsembleSpec spec = EnsembleSpec::from_json(m2["ensemble"].dump());
        if (spec.dimension() != m)
            throw_invalid("distinguish: quantum m2 dimension does not match M");
        const auto pool = quantum_plateau_pool(spec, m2.value("t", 10.0), m2.value("pool", 24),
                                               opt.master_seed + 0x9e37);
        source = pool_m2_generator(pool);
    } else {
        throw_invalid("distinguish: unknown m2 type '" + type + "'");
    }

    const auto rows = advantage_experiment(m, n_grid, source, n_trials,
                                           SeedPath{opt.master_seed, 0});
    CsvTable table;
    table.columns = {"N", "accuracy", "stderr", "n_trials", "collapse_x"};
    for (const auto& r : rows)
        table.rows.push_back({static_cast<double>(r.n_samples), r.accuracy, r.stderr_mean,
                              static_cast<double>(r.n_trials),
                              r.n_samples * static_cast<double>(r.n_samples) / std::sqrt(m)});
    write_csv(opt.out_dir + "/distinguish_accuracy.csv", table);
    manifest.files.push_back({"distinguish_accuracy.csv", ""});
    if (opt.check && rows.front().n_samples == 1)
        check_assert(std::abs(rows.front().accuracy - 0.5) <= 5.0 * rows.front().stderr_mean,
                     "distinguish: single-sample accuracy should be chance level");

    if (config.value("oracle", false)) {
        const OutcomeDistribution m2_dist = source(SeedPath{opt.master_seed, 0xabcd});
        const auto oracle = oracle_classifier_accuracy(m, n_grid, m2_dist, n_trials,
                                                       SeedPath{opt.master_seed, 1u << 24});
        CsvTable ot;
        ot.columns = {"N", "accuracy", "stderr", "n_trials"};
        for (const auto& r : oracle)
            ot.rows.push_back({static_cast<double>(r.n_samples), r.accuracy, r.stderr_mean,
                               static_cast<double>(r.n_trials)});
        write_csv(opt.out_dir + "/distinguish_oracle.csv", ot);
        manifest.files.push_back({"distinguish_oracle.csv", ""});
    }

    if (!opt.no_plot) {
        PlotSpec plot;
        plot.title = "Distinguishing advantage, M = " + std::to_string(m);
        plot.xlabel = "N";
        plot.ylabel = "accuracy";
        plot.log_x = true;
        PlotSeries s;
        s.label = "collision classifier";
        for (const auto& r : rows) {
            s.x.push_back(r.n_samples);
            s.y.push_back(r.accuracy);
            s.yerr.push_back(r.stderr_mean);
        }
        plot.series.push_back(std::move(s));
        write_svg_plot(opt.out_dir + "/distinguish.svg", plot);
        manifest.files.push_back({"distinguish.svg", ""});
    }
}

// ------------------------------------------------------- dump-hamiltonian ---

void cmd_dump_hamiltonian(const json& config, const RunOptions& opt, RunManifest& manifest) {
    reject_unknown_keys(config, {"ensemble", "stream_index", "filename"}, "dump-hamiltonian");
    if (!config.contains("ensemble")) throw_invalid("dump-hamiltonian: 'ensemble' is required");
    const EnsembleSpec spec = EnsembleSpec::from_json(config["ensemble"].dump());
    const std::uint64_t stream = config.value("stream_index", 0);
    const std::string filename = config.value("filename", "hamiltonian.bin");
    const DenseHermitian h = sample_hamiltonian(spec, SeedPath{opt.master_seed, stream});
    dump_hermitian_binary(opt.out_dir + "/" + filename, h);
    manifest.files.push_back({filename, ""});
    manifest.files.push_back({filename + ".json", ""});
}

}  // namespace

std::string default_config(const std::string& name) {
    if (name == "spread")
        return R"({"ensembles": [{"variant": "rlh_complete", "n": 6}], "n_trials": 50,
                   "x": 0, "t_max": 10.0, "n_times": 96})";
    if (name == "scaling")
        return R"({"family": "rlh_complete", "sizes": [5, 6, 7, 8], "n_trials": 50, "t": 10.0})";
    if (name == "formfactor")
        return R"({"D": 64, "n_samples": 500, "t_min": 0.02, "t_max": 4.0, "n_times": 60})";
    if (name == "haar-verify") return R"({"D": 4, "t": 1.3, "mc_samples": 0})";
    if (name == "distinguish")
        return R"({"M": 1024, "N_grid": [1, 2, 4, 8, 16, 32, 64], "n_trials": 2000,
                   "m2": {"type": "dirichlet", "c": 1.0}})";
    if (name == "dump-hamiltonian")
        return R"({"ensemble": {"variant": "gue", "D": 8}, "stream_index": 0})";
    throw_invalid("unknown command: " + name);
}

int run_command(const std::string& name, const std::string& config_text,
                const RunOptions& options) {
    try {
        set_thread_cap(options.threads);
        std::filesystem::create_directories(options.out_dir);
        json config;
        try {
            config = json::parse(config_text.empty() ? default_config(name) : config_text);
        } catch (const json::exception& e) {
            throw_invalid(std::string("config is not valid JSON: ") + e.what());
        }
        RunManifest manifest;
        manifest.command = name;
        manifest.config_json = config.dump();
        manifest.master_seed = options.master_seed;
        manifest.started = utc_timestamp();
        if (name == "spread")
            cmd_spread(config, options, manifest);
        else if (name == "scaling")
            cmd_scaling(config, options, manifest);
        else if (name == "formfactor")
            cmd_formfactor(config, options, manifest);
        else if (name == "haar-verify")
            cmd_haar_verify(config, options, manifest);
        else if (name == "distinguish")
            cmd_distinguish(config, options, manifest);
        else if (name == "dump-hamiltonian")
            cmd_dump_hamiltonian(config, options, manifest);
        else
            throw_invalid("unknown command: " + name);
        write_manifest(options.out_dir, std::move(manifest));
        return 0;
    } catch (const CheckFailure& f) {
        std::fprintf(stderr, "check failed: %s\n", f.message.c_str());
        return 4;
    } catch (const Error& e) {
        const bool config_error =
            e.code() == ErrorCode::InvalidInput || e.code() == ErrorCode::Capacity;
        std::fprintf(stderr, "%s: %s\n", config_error ? "config error" : "numeric failure",
                     e.what());
        return config_error ? 2 : 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

}  // namespace ite
