#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fdcov/bootstrap.hpp"
#include "fdcov/config.hpp"
#include "fdcov/grid.hpp"
#include "fdcov/simulate.hpp"

namespace fdcov {

enum class ProcessKind {
    fbm,              // correlated fBM pair, shape = H
    bm,               // Brownian motions with correlation rho
    gbm_gbm,          // independent geometric BMs
    stable_stable,    // independent alpha-stable Levy motions
    gbm_stable,       // geometric BM X, independent stable Levy motion Y
    pareto_joint,     // A^{1/2} (B1, B2), shape = Pareto alpha
    pareto_separate,  // (A1^{1/2} B1, A2^{1/2} B2), corr(B1, B2) = rho
};

std::string_view to_string(ProcessKind k) noexcept;
ProcessKind parse_process_kind(std::string_view name);

/// Everything needed to draw one paired sample.
struct ProcessSpec {
    ProcessKind kind = ProcessKind::bm;
    double shape = 0.5;  // H for fbm, tail index for pareto_*; unused otherwise
    double rho = 0.0;
    double gbm_mu = 1.0;
    double gbm_sigma = 0.7;
    StableSpec stable{};

    void validate() const;
};

/// n iid pairs on the uniform grid with p intervals, drawn from one stream.
PairedSample simulate_sample(const ProcessSpec& spec, std::size_t n, std::size_t p, Stream& rng);

enum class ExperimentId { fig1_top, fig1_bottom, fig2, fig3, fig4_top, fig4_bottom, fig5 };

std::string_view to_string(ExperimentId id) noexcept;
ExperimentId parse_experiment_id(std::string_view name);

/// A block of combinations sharing one process family: every
/// (shape, p, n) triple is run `replications` times.
struct Panel {
    std::string name;
    ProcessKind process = ProcessKind::bm;
    std::vector<double> shapes{0.5};
    double rho = 0.0;
    std::vector<std::size_t> n_values;
    std::vector<std::size_t> p_values;
    std::size_t replications = 1;
};

struct ExperimentSpec {
    ExperimentId id = ExperimentId::fig1_top;
    std::vector<Panel> panels;
    double beta = 1.0;
    std::uint64_t seed = 0;
    /// Bootstrap replicates drawn from one sample per combination (fig5 only).
    std::size_t bootstrap_B = 200;
    TestMethod bootstrap_method = TestMethod::bootstrap_paired;
    double gbm_mu = 1.0;
    double gbm_sigma = 0.7;
    StableSpec stable{};

    void validate() const;
};

/// Settings of the simulation study, panel by panel.
ExperimentSpec default_experiment(ExperimentId id);

/// Overrides applied to every panel of an experiment.
struct ExperimentOverrides {
    std::optional<std::vector<std::size_t>> n_values;
    std::optional<std::vector<std::size_t>> p_values;
    std::optional<std::vector<double>> shapes;
    std::optional<double> rho;
    std::optional<std::size_t> replications;
    std::optional<double> beta;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> bootstrap_B;
    std::optional<TestMethod> bootstrap_method;
};

void apply_overrides(ExperimentSpec& spec, const ExperimentOverrides& o);

/// Reads overrides from the section named after the experiment id (keys n,
/// p, shapes, rho, reps, beta, seed, B, method), falling back to the global
/// section.
ExperimentOverrides overrides_from_config(const Config& cfg, ExperimentId id);

struct ResultRow {
    std::string experiment;
    std::string panel;
    std::size_t replicate = 0;
    std::size_t n = 0;
    std::size_t p = 0;
    std::optional<double> shape;
    double rho = 0.0;
    std::string statistic;  // R_n, nR_n or bootstrap_ref
    double value = 0.0;     // NaN when R_n is undefined
};

/// Runs every (combination, replicate) on up to `threads` workers. Rows are
/// ordered by panel, shape, p, n, statistic block, replicate and do not depend
/// on the thread count. fig5 adds nR_n per replicate and bootstrap_B
/// bootstrap_ref rows (in nR_n units) from one extra sample per combination.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, unsigned threads = 1);

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows);

inline constexpr std::string_view kResultCsvHeader =
    "experiment,panel,replicate,n,p,shape,rho,statistic,value";

}  // namespace fdcov
