#include "fdcov/harness.hpp"

#include <bit>
#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>
#include <string>

#include "fdcov/dcov.hpp"
#include "fdcov/parallel.hpp"

namespace fdcov {

namespace {

constexpr std::pair<ProcessKind, std::string_view> kProcessNames[] = {
    {ProcessKind::fbm, "fbm"},
    {ProcessKind::bm, "bm"},
    {ProcessKind::gbm_gbm, "gbm_gbm"},
    {ProcessKind::stable_stable, "stable_stable"},
    {ProcessKind::gbm_stable, "gbm_stable"},
    {ProcessKind::pareto_joint, "pareto_joint"},
    {ProcessKind::pareto_separate, "pareto_separate"},
};

constexpr std::pair<ExperimentId, std::string_view> kExperimentNames[] = {
    {ExperimentId::fig1_top, "fig1_top"},       {ExperimentId::fig1_bottom, "fig1_bottom"},
    {ExperimentId::fig2, "fig2"},               {ExperimentId::fig3, "fig3"},
    {ExperimentId::fig4_top, "fig4_top"},       {ExperimentId::fig4_bottom, "fig4_bottom"},
    {ExperimentId::fig5, "fig5"},
};

bool uses_shape(ProcessKind k) {
    return k == ProcessKind::fbm || k == ProcessKind::pareto_joint ||
           k == ProcessKind::pareto_separate;
}

}  // namespace

std::string_view to_string(ProcessKind k) noexcept {
    for (const auto& [kind, name] : kProcessNames)
        if (kind == k) return name;
    return "unknown";
}

ProcessKind parse_process_kind(std::string_view name) {
    for (const auto& [kind, n] : kProcessNames)
        if (n == name) return kind;
    throw std::invalid_argument("unknown process '" + std::string(name) + "'");
}

std::string_view to_string(ExperimentId id) noexcept {
    for (const auto& [e, name] : kExperimentNames)
        if (e == id) return name;
    return "unknown";
}

ExperimentId parse_experiment_id(std::string_view name) {
    for (const auto& [e, n] : kExperimentNames)
        if (n == name) return e;
    throw std::invalid_argument("unknown experiment id '" + std::string(name) + "'");
}

void ProcessSpec::validate() const {
    switch (kind) {
        case ProcessKind::fbm:
            FbmPairSpec{shape, rho, 1}.validate();
            break;
        case ProcessKind::pareto_joint:
        case ProcessKind::pareto_separate:
            ParetoShockSpec{shape, ShockModel::joint_shock, rho}.validate();
            break;
        case ProcessKind::gbm_gbm:
        case ProcessKind::gbm_stable:
            if (!(gbm_sigma > 0.0)) throw std::invalid_argument("GBM volatility must be positive");
            if (kind == ProcessKind::gbm_stable) stable.validate();
            break;
        case ProcessKind::stable_stable:
            stable.validate();
            break;
        case ProcessKind::bm:
            if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("rho must lie in [-1, 1]");
            break;
    }
}

PairedSample simulate_sample(const ProcessSpec& spec, std::size_t n, std::size_t p, Stream& rng) {
    spec.validate();
    if (n == 0) throw std::invalid_argument("sample size must be positive");
    const auto partition = cached_uniform_partition(p);
    std::vector<Trajectory> xs;
    std::vector<Trajectory> ys;
    xs.reserve(n);
    ys.reserve(n);

    switch (spec.kind) {
        case ProcessKind::fbm: {
            const auto sampler = cached_fbm_sampler(FbmPairSpec{spec.shape, spec.rho, p});
            for (std::size_t i = 0; i < n; ++i) {
                auto [x, y] = sampler->draw(rng);
                xs.push_back(std::move(x));
                ys.push_back(std::move(y));
            }
            break;
        }
        case ProcessKind::bm: {
            const double c = std::sqrt(std::max(0.0, 1.0 - spec.rho * spec.rho));
            for (std::size_t i = 0; i < n; ++i) {
                auto x = brownian_path(partition, rng);
                const auto w = brownian_path(partition, rng);
                std::vector<double> y(p);
                for (std::size_t j = 0; j < p; ++j) y[j] = spec.rho * x.values()[j] + c * w.values()[j];
                xs.push_back(std::move(x));
                ys.emplace_back(partition, std::move(y));
            }
            break;
        }
        case ProcessKind::gbm_gbm:
            for (std::size_t i = 0; i < n; ++i) {
                xs.push_back(gbm_path(spec.gbm_mu, spec.gbm_sigma, partition, rng));
                ys.push_back(gbm_path(spec.gbm_mu, spec.gbm_sigma, partition, rng));
            }
            break;
        case ProcessKind::stable_stable:
            for (std::size_t i = 0; i < n; ++i) {
                xs.push_back(stable_levy_path(spec.stable, partition, rng));
                ys.push_back(stable_levy_path(spec.stable, partition, rng));
            }
            break;
        case ProcessKind::gbm_stable:
            for (std::size_t i = 0; i < n; ++i) {
                xs.push_back(gbm_path(spec.gbm_mu, spec.gbm_sigma, partition, rng));
                ys.push_back(stable_levy_path(spec.stable, partition, rng));
            }
            break;
        case ProcessKind::pareto_joint:
        case ProcessKind::pareto_separate: {
            const ParetoShockSpec ps{spec.shape,
                                     spec.kind == ProcessKind::pareto_joint
                                         ? ShockModel::joint_shock
                                         : ShockModel::separate_shocks,
                                     spec.rho};
            for (std::size_t i = 0; i < n; ++i) {
                auto [x, y] = pareto_shock_pair(ps, partition, rng);
                xs.push_back(std::move(x));
                ys.push_back(std::move(y));
            }
            break;
        }
    }
    return PairedSample(std::move(xs), std::move(ys));
}

void ExperimentSpec::validate() const {
    DcovParams{beta}.validate();
    if (panels.empty()) throw std::invalid_argument("experiment has no panels");
    for (const auto& panel : panels) {
        if (panel.replications == 0) throw std::invalid_argument("replications must be >= 1");
        if (panel.n_values.empty() || panel.p_values.empty() || panel.shapes.empty()) {
            throw std::invalid_argument("panel '" + panel.name + "' has an empty parameter list");
        }
        for (std::size_t n : panel.n_values)
            if (n < 2) throw std::invalid_argument("sample sizes must be >= 2");
        for (std::size_t p : panel.p_values)
            if (p == 0) throw std::invalid_argument("grid sizes must be >= 1");
        for (double s : panel.shapes) {
            ProcessSpec ps{panel.process, s, panel.rho, gbm_mu, gbm_sigma, stable};
            ps.validate();
        }
    }
    if (id == ExperimentId::fig5) {
        if (bootstrap_B == 0) throw std::invalid_argument("bootstrap B must be >= 1");
        if (bootstrap_method == TestMethod::permutation) {
            throw std::invalid_argument("fig5 needs a bootstrap method");
        }
        for (const auto& panel : panels)
            for (std::size_t n : panel.n_values)
                if (n < 4) throw std::invalid_argument("fig5 needs n >= 4");
    }
}

ExperimentSpec default_experiment(ExperimentId id) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ExperimentSpec spec;
    spec.id = id;
    const std::vector<double> hursts{0.25, 0.5, 0.75};
    const std::vector<double> tails{0.5, 1.0, 1.5};
    switch (id) {
        case ExperimentId::fig1_top:
            spec.panels = {{"fbm", ProcessKind::fbm, hursts, 0.0, {100, 200, 300, 400}, {100}, 500}};
            break;
        case ExperimentId::fig1_bottom:
            spec.panels = {{"fbm", ProcessKind::fbm, hursts, 0.5, {100, 200, 300}, {100}, 300}};
            break;
        case ExperimentId::fig2:
            spec.panels = {
                {"gbm_gbm", ProcessKind::gbm_gbm, {nan}, 0.0, {100, 200, 300}, {100}, 500},
                {"stable_stable", ProcessKind::stable_stable, {nan}, 0.0, {100, 200, 300}, {100}, 500},
                {"gbm_stable", ProcessKind::gbm_stable, {nan}, 0.0, {100, 200, 300}, {100}, 500},
            };
            break;
        case ExperimentId::fig3:
            spec.panels = {
                {"bm", ProcessKind::bm, {0.5}, 0.0, {100, 200, 300}, {100, 1000}, 300},
                {"stable_stable", ProcessKind::stable_stable, {nan}, 0.0, {100}, {100, 500, 1000}, 500},
            };
            break;
        case ExperimentId::fig4_top:
            spec.panels = {{"pareto_joint", ProcessKind::pareto_joint, tails, 0.0, {100, 200, 300}, {100}, 500}};
            break;
        case ExperimentId::fig4_bottom:
            spec.panels = {
                {"pareto_separate", ProcessKind::pareto_separate, tails, 0.5, {100, 200, 300}, {100}, 500}};
            break;
        case ExperimentId::fig5:
            spec.panels = {{"fbm", ProcessKind::fbm, hursts, 0.0, {100, 300}, {100}, 500}};
            spec.bootstrap_B = 200;
            break;
    }
    return spec;
}

void apply_overrides(ExperimentSpec& spec, const ExperimentOverrides& o) {
    for (auto& panel : spec.panels) {
        if (o.n_values) panel.n_values = *o.n_values;
        if (o.p_values) panel.p_values = *o.p_values;
        if (o.shapes && uses_shape(panel.process)) panel.shapes = *o.shapes;
        if (o.rho) panel.rho = *o.rho;
        if (o.replications) panel.replications = *o.replications;
    }
    if (o.beta) spec.beta = *o.beta;
    if (o.seed) spec.seed = *o.seed;
    if (o.bootstrap_B) spec.bootstrap_B = *o.bootstrap_B;
    if (o.bootstrap_method) spec.bootstrap_method = *o.bootstrap_method;
}

ExperimentOverrides overrides_from_config(const Config& cfg, ExperimentId id) {
    const std::string section(to_string(id));
    ExperimentOverrides o;
    auto get = [&](const char* key) { return cfg.lookup(section, key); };
    if (auto v = get("n")) o.n_values = parse_size_list(*v);
    if (auto v = get("p")) o.p_values = parse_size_list(*v);
    if (auto v = get("shapes")) o.shapes = parse_double_list(*v);
    if (auto v = get("rho")) o.rho = parse_double_list(*v).front();
    if (auto v = get("reps")) o.replications = parse_size_list(*v).front();
    if (auto v = get("beta")) o.beta = parse_double_list(*v).front();
    if (auto v = get("seed")) o.seed = static_cast<std::uint64_t>(std::stoull(*v));
    if (auto v = get("B")) o.bootstrap_B = parse_size_list(*v).front();
    if (auto v = get("method")) o.bootstrap_method = parse_test_method(*v);
    return o;
}

namespace {

struct Combination {
    const Panel* panel;
    double shape;
    std::size_t p;
    std::size_t n;
    std::uint64_t key;
    std::size_t row_offset;
};

std::uint64_t combination_key(const Panel& panel, double shape, std::size_t p, std::size_t n) {
    std::uint64_t h = hash_tag(panel.name.c_str());
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(shape));
    h = splitmix64(h ^ std::bit_cast<std::uint64_t>(panel.rho));
    h = splitmix64(h ^ p);
    return splitmix64(h ^ n);
}

std::string coordinates(const Combination& c, std::size_t rep) {
    std::string s = "panel " + c.panel->name + ", n=" + std::to_string(c.n) +
                    ", p=" + std::to_string(c.p);
    if (!std::isnan(c.shape)) s += ", shape=" + std::to_string(c.shape);
    return s + ", replicate " + std::to_string(rep);
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec, unsigned threads) {
    spec.validate();
    const bool fig5 = spec.id == ExperimentId::fig5;
    const std::size_t stats_per_rep = fig5 ? 2 : 1;
    const DcovParams params{spec.beta};
    const std::string exp_name(to_string(spec.id));
    const std::uint64_t exp_key = hash_tag(exp_name.c_str());

    std::vector<Combination> combos;
    std::size_t total_rows = 0;
    for (const auto& panel : spec.panels)
        for (double shape : panel.shapes)
            for (std::size_t p : panel.p_values)
                for (std::size_t n : panel.n_values) {
                    combos.push_back({&panel, shape, p, n, combination_key(panel, shape, p, n), total_rows});
                    total_rows += panel.replications * stats_per_rep + (fig5 ? spec.bootstrap_B : 0);
                }

    std::vector<ResultRow> rows(total_rows);
    auto fill = [&](const Combination& c, std::size_t slot, std::size_t rep, const char* stat,
                    double value) {
        ResultRow& r = rows[slot];
        r.experiment = exp_name;
        r.panel = c.panel->name;
        r.replicate = rep;
        r.n = c.n;
        r.p = c.p;
        if (!std::isnan(c.shape)) r.shape = c.shape;
        r.rho = c.panel->rho;
        r.statistic = stat;
        r.value = value;
    };
    auto process_for = [&](const Combination& c) {
        return ProcessSpec{c.panel->process, c.shape, c.panel->rho, spec.gbm_mu, spec.gbm_sigma,
                           spec.stable};
    };

    struct Job {
        std::size_t combo;
        std::size_t rep;  // == replications marks the bootstrap job
    };
    std::vector<Job> jobs;
    for (std::size_t ci = 0; ci < combos.size(); ++ci) {
        const std::size_t reps = combos[ci].panel->replications;
        for (std::size_t r = 0; r < reps; ++r) jobs.push_back({ci, r});
        if (fig5) jobs.push_back({ci, reps});
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    parallel_for(jobs.size(), threads, [&](std::size_t j) {
        const auto [ci, rep] = jobs[j];
        const Combination& c = combos[ci];
        const std::size_t reps = c.panel->replications;
        try {
            if (rep < reps) {
                auto rng = make_stream({spec.seed, exp_key, c.key, rep});
                const auto sample = simulate_sample(process_for(c), c.n, c.p, rng);
                const auto a = dist_matrix(sample.x(), params);
                const auto b = dist_matrix(sample.y(), params);
                const auto r = sample_dcor(a, b);
                const double value = r ? *r : nan;
                fill(c, c.row_offset + rep, rep, "R_n", value);
                if (fig5) {
                    fill(c, c.row_offset + reps + rep, rep, "nR_n",
                         static_cast<double>(c.n) * value);
                }
                return;
            }
            auto rng = make_stream({spec.seed, exp_key, c.key, hash_tag("bootstrap")});
            const auto sample = simulate_sample(process_for(c), c.n, c.p, rng);
            const auto a = dist_matrix(sample.x(), params);
            const auto b = dist_matrix(sample.y(), params);
            const double denom = std::sqrt(sample_dcov(a, a) * sample_dcov(b, b));
            const RngSpec boot{splitmix64(rng())};
            const auto u = bootstrap_null(a, b, spec.bootstrap_B, boot, spec.bootstrap_method);
            const double shift = a.grand_mean() * b.grand_mean();
            const std::size_t base = c.row_offset + 2 * reps;
            for (std::size_t k = 0; k < u.size(); ++k) {
                const double ref = kBootstrapScale * u[k] + shift;
                fill(c, base + k, k, "bootstrap_ref", denom > 0.0 ? ref / denom : nan);
            }
        } catch (const std::exception& e) {
            throw std::runtime_error(exp_name + " (" +
                                     coordinates(c, rep < reps ? rep : 0) +
                                     (rep < reps ? "" : ", bootstrap") + "): " + e.what());
        }
    });
    return rows;
}

void write_rows_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
    const auto old = os.precision(17);
    os << kResultCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.experiment << ',' << r.panel << ',' << r.replicate << ',' << r.n << ',' << r.p << ',';
        if (r.shape) os << *r.shape;
        os << ',' << r.rho << ',' << r.statistic << ',';
        if (std::isnan(r.value)) {
            os << "nan";
        } else {
            os << r.value;
        }
        os << '\n';
    }
    os.precision(old);
}

}  // namespace fdcov
