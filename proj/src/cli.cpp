#include "fdcov/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <optional>
#include <stdexcept>

#include "fdcov/bootstrap.hpp"
#include "fdcov/config.hpp"
#include "fdcov/dcov.hpp"
#include "fdcov/harness.hpp"
#include "fdcov/io.hpp"

namespace fdcov {

namespace {

struct SampleSource {
    std::string input;
    std::string x_file;
    std::string y_file;

    PairedSample load() const {
        if (!input.empty()) {
            if (!x_file.empty() || !y_file.empty()) {
                throw CLI::ValidationError("--input cannot be combined with --x/--y");
            }
            return read_paired_sample_file(input);
        }
        if (x_file.empty() || y_file.empty()) {
            throw CLI::ValidationError("give --input PAIR.csv or both --x and --y");
        }
        return pair_tables(read_paths_file(x_file), read_paths_file(y_file));
    }

    void attach(CLI::App* cmd) {
        cmd->add_option("--input", input, "paired trajectory CSV (ids x<k>, y<k>)");
        cmd->add_option("--x", x_file, "trajectory CSV with the X paths");
        cmd->add_option("--y", y_file, "trajectory CSV with the Y paths");
    }
};

// Writes to --out, or to `out` when the path is empty or "-".
template <class Fn>
void with_output(const std::string& path, std::ostream& out, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(out);
        return;
    }
    std::ofstream file(path);
    if (!file) throw std::runtime_error("cannot write '" + path + "'");
    fn(file);
    if (!file) throw std::runtime_error("write to '" + path + "' failed");
}

// Bad flag or config values are usage errors, not runtime failures.
template <class Fn>
auto flag_value(Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::invalid_argument& e) {
        throw CLI::ValidationError(e.what());
    } catch (const std::out_of_range& e) {
        throw CLI::ValidationError(e.what());
    }
}

std::string one_line(std::string s) {
    for (char& c : s)
        if (c == '\n' || c == '\r') c = ' ';
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Independence tests for discretized stochastic processes", "fdcov"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate a paired sample and write trajectory CSV");
    std::string sim_process;
    std::optional<std::size_t> sim_n, sim_p;
    std::optional<double> sim_shape, sim_rho;
    std::optional<std::uint64_t> sim_seed;
    std::string sim_out, sim_config;
    sim->add_option("--process", sim_process,
                    "fbm, bm, gbm_gbm, stable_stable, gbm_stable, pareto_joint, pareto_separate");
    sim->add_option("--n", sim_n, "number of pairs");
    sim->add_option("--p", sim_p, "grid size");
    sim->add_option("--shape", sim_shape, "Hurst index (fbm) or Pareto tail index");
    sim->add_option("--rho", sim_rho, "cross-correlation");
    sim->add_option("--seed", sim_seed, "master seed");
    sim->add_option("--out", sim_out, "output CSV (default stdout)");
    sim->add_option("--config", sim_config, "key = value file; keys read from [simulate]");

    // stat
    auto* stat = app.add_subcommand("stat", "print T_n and R_n of a paired sample");
    SampleSource stat_src;
    stat_src.attach(stat);
    double stat_beta = 1.0;
    stat->add_option("--beta", stat_beta, "distance exponent in (0, 2)");

    // test
    auto* test = app.add_subcommand("test", "run an independence test and print JSON");
    SampleSource test_src;
    test_src.attach(test);
    double test_beta = 1.0;
    std::size_t test_B = 200;
    std::string test_method = "bootstrap_paired";
    std::uint64_t test_seed = 0;
    unsigned test_threads = 1;
    bool test_reference = false;
    test->add_option("--beta", test_beta, "distance exponent in (0, 2)");
    test->add_option("--B", test_B, "number of reference replicates");
    test->add_option("--method", test_method, "bootstrap_paired, bootstrap_product or permutation");
    test->add_option("--seed", test_seed, "master seed");
    test->add_option("--threads", test_threads, "worker threads (0 = all cores)");
    test->add_flag("--reference", test_reference, "include the reference sample in the JSON");

    // experiment
    auto* exp = app.add_subcommand("experiment", "run a simulation study and write ResultRow CSV");
    std::string exp_id, exp_out, exp_config, exp_n, exp_p, exp_shapes, exp_method;
    std::optional<std::size_t> exp_reps, exp_B;
    std::optional<double> exp_beta, exp_rho;
    std::optional<std::uint64_t> exp_seed;
    unsigned exp_threads = 1;
    exp->add_option("--id", exp_id, "fig1_top, fig1_bottom, fig2, fig3, fig4_top, fig4_bottom, fig5")
        ->required();
    exp->add_option("--out", exp_out, "output CSV (default stdout)");
    exp->add_option("--config", exp_config, "key = value file; section named after the id");
    exp->add_option("--n", exp_n, "comma-separated sample sizes");
    exp->add_option("--p", exp_p, "comma-separated grid sizes");
    exp->add_option("--shapes", exp_shapes, "comma-separated Hurst or tail indices");
    exp->add_option("--rho", exp_rho, "cross-correlation");
    exp->add_option("--reps", exp_reps, "replications per combination");
    exp->add_option("--beta", exp_beta, "distance exponent in (0, 2)");
    exp->add_option("--seed", exp_seed, "master seed");
    exp->add_option("--B", exp_B, "bootstrap replicates (fig5)");
    exp->add_option("--method", exp_method, "bootstrap method (fig5)");
    exp->add_option("--threads", exp_threads, "worker threads (0 = all cores)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "fdcov: " << one_line(e.what()) << '\n';
        return kExitUsage;
    }

    try {
        if (*sim) {
            ProcessSpec spec;
            std::size_t n = 100, p = 100;
            std::uint64_t seed = 0;
            flag_value([&] {
            if (!sim_config.empty()) {
                const auto cfg = Config::load(sim_config);
                auto get = [&](const char* k) { return cfg.lookup("simulate", k); };
                if (auto v = get("process")) spec.kind = parse_process_kind(*v);
                if (auto v = get("n")) n = parse_size_list(*v).front();
                if (auto v = get("p")) p = parse_size_list(*v).front();
                if (auto v = get("shape")) spec.shape = parse_double_list(*v).front();
                if (auto v = get("rho")) spec.rho = parse_double_list(*v).front();
                if (auto v = get("seed")) seed = std::stoull(*v);
                if (auto v = get("gbm_mu")) spec.gbm_mu = parse_double_list(*v).front();
                if (auto v = get("gbm_sigma")) spec.gbm_sigma = parse_double_list(*v).front();
                if (auto v = get("stable_alpha")) spec.stable.alpha = parse_double_list(*v).front();
                if (auto v = get("stable_skew")) spec.stable.skew = parse_double_list(*v).front();
                if (auto v = get("stable_mu")) spec.stable.mu = parse_double_list(*v).front();
                if (auto v = get("stable_sigma")) spec.stable.sigma = parse_double_list(*v).front();
            }
            if (!sim_process.empty()) spec.kind = parse_process_kind(sim_process);
            if (sim_n) n = *sim_n;
            if (sim_p) p = *sim_p;
            if (sim_shape) spec.shape = *sim_shape;
            if (sim_rho) spec.rho = *sim_rho;
            if (sim_seed) seed = *sim_seed;
            if (n == 0 || p == 0) throw std::invalid_argument("--n and --p must be positive");
            spec.validate();
            });
            auto rng = make_stream({seed, hash_tag("simulate")});
            const auto sample = simulate_sample(spec, n, p, rng);
            with_output(sim_out, out, [&](std::ostream& os) { write_paired_sample(os, sample); });
            return kExitOk;
        }

        if (*stat) {
            const DcovParams params{stat_beta};
            flag_value([&] { params.validate(); });
            const auto sample = stat_src.load();
            const auto a = dist_matrix(sample.x(), params);
            const auto b = dist_matrix(sample.y(), params);
            const auto r = sample_dcor(a, b);
            nlohmann::json j{{"n", sample.size()},
                             {"p", sample.partition().size()},
                             {"beta", stat_beta},
                             {"T_n", sample_dcov(a, b)},
                             {"R_n", r ? nlohmann::json(*r) : nlohmann::json(nullptr)}};
            out << j.dump() << '\n';
            return kExitOk;
        }

        if (*test) {
            const DcovParams params{test_beta};
            flag_value([&] {
                params.validate();
                if (test_B == 0) throw std::invalid_argument("--B must be >= 1");
            });
            const auto method = flag_value([&] { return parse_test_method(test_method); });
            const auto sample = test_src.load();
            const auto a = dist_matrix(sample.x(), params, test_threads);
            const auto b = dist_matrix(sample.y(), params, test_threads);
            const auto result = run_test(a, b, test_B, RngSpec{test_seed}, method, test_threads);
            out << result.to_json(test_reference).dump() << '\n';
            return kExitOk;
        }

        if (*exp) {
            const auto id = flag_value([&] { return parse_experiment_id(exp_id); });
            auto spec = default_experiment(id);
            flag_value([&] {
                if (!exp_config.empty()) {
                    const auto cfg = Config::load(exp_config);
                    apply_overrides(spec, overrides_from_config(cfg, id));
                }
                ExperimentOverrides o;
                if (!exp_n.empty()) o.n_values = parse_size_list(exp_n);
                if (!exp_p.empty()) o.p_values = parse_size_list(exp_p);
                if (!exp_shapes.empty()) o.shapes = parse_double_list(exp_shapes);
                o.rho = exp_rho;
                o.replications = exp_reps;
                o.beta = exp_beta;
                o.seed = exp_seed;
                o.bootstrap_B = exp_B;
                if (!exp_method.empty()) o.bootstrap_method = parse_test_method(exp_method);
                apply_overrides(spec, o);
                spec.validate();
            });
            const auto rows = run_experiment(spec, exp_threads);
            with_output(exp_out, out, [&](std::ostream& os) { write_rows_csv(os, rows); });
            return kExitOk;
        }
    } catch (const CLI::ValidationError& e) {
        err << "fdcov: " << one_line(e.what()) << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "fdcov: " << one_line(e.what()) << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace fdcov
