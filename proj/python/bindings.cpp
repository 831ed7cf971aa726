#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "fdcov/bootstrap.hpp"
#include "fdcov/dcov.hpp"
#include "fdcov/harness.hpp"

namespace py = pybind11;
using namespace fdcov;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

PartitionPtr partition_for(std::size_t p, const std::optional<Array>& points) {
    if (!points) return cached_uniform_partition(p);
    auto v = points->unchecked<1>();
    std::vector<double> pts(v.shape(0));
    for (py::ssize_t i = 0; i < v.shape(0); ++i) pts[i] = v(i);
    auto part = std::make_shared<const Partition>(std::move(pts));
    if (part->size() != p) throw py::value_error("grid must have p + 1 points");
    return part;
}

// Rows of an (n, p) array become trajectories on a shared partition.
std::vector<Trajectory> to_paths(const Array& a, const PartitionPtr& part) {
    if (a.ndim() != 2) throw py::value_error("paths must be a 2-d array (n, p)");
    auto v = a.unchecked<2>();
    std::vector<Trajectory> out;
    out.reserve(v.shape(0));
    for (py::ssize_t k = 0; k < v.shape(0); ++k) {
        std::vector<double> row(v.shape(1));
        for (py::ssize_t i = 0; i < v.shape(1); ++i) row[i] = v(k, i);
        out.emplace_back(part, std::move(row));
    }
    return out;
}

Array to_array(const std::vector<Trajectory>& paths) {
    const std::size_t n = paths.size(), p = n ? paths[0].size() : 0;
    Array out({n, p});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < p; ++i) w(k, i) = paths[k].values()[i];
    return out;
}

std::pair<DistMatrix, DistMatrix> matrices(const Array& x, const Array& y, double beta,
                                           const std::optional<Array>& grid, unsigned threads) {
    if (x.ndim() != 2 || y.ndim() != 2 || x.shape(1) != y.shape(1))
        throw py::value_error("x and y must be (n, p) arrays with equal p");
    const auto part = partition_for(x.shape(1), grid);
    const PairedSample s(to_paths(x, part), to_paths(y, part));
    const DcovParams params{beta};
    return {dist_matrix(s.x(), params, threads), dist_matrix(s.y(), params, threads)};
}

py::dict result_dict(const TestResult& r) {
    py::dict d;
    d["statistic"] = r.statistic;
    d["p_value"] = r.p_value;
    d["method"] = std::string(to_string(r.method));
    d["B"] = r.replicates;
    d["seed"] = r.seed;
    d["shift"] = r.shift_estimate;
    d["scale"] = r.scale_factor;
    d["degenerate"] = r.degenerate;
    d["warnings"] = r.warnings;
    d["reference"] = py::array_t<double>(r.reference_sample.size(), r.reference_sample.data());
    return d;
}

}  // namespace

PYBIND11_MODULE(_fdcov, m) {
    m.doc() = "Distance covariance tests for discretized stochastic processes";

    m.def(
        "dist_matrix",
        [](const Array& paths, double beta, std::optional<Array> grid) {
            if (paths.ndim() != 2) throw py::value_error("paths must be a 2-d array (n, p)");
            const auto d = dist_matrix(to_paths(paths, partition_for(paths.shape(1), grid)), DcovParams{beta});
            Array out({d.size(), d.size()});
            std::copy(d.data().begin(), d.data().end(), out.mutable_data());
            return out;
        },
        py::arg("paths"), py::arg("beta") = 1.0, py::arg("grid") = py::none());

    m.def(
        "dcov",
        [](const Array& x, const Array& y, double beta, std::optional<Array> grid) {
            auto [a, b] = matrices(x, y, beta, grid, 1);
            return sample_dcov(a, b);
        },
        py::arg("x"), py::arg("y"), py::arg("beta") = 1.0, py::arg("grid") = py::none());

    m.def(
        "dcor",
        [](const Array& x, const Array& y, double beta, std::optional<Array> grid) {
            auto [a, b] = matrices(x, y, beta, grid, 1);
            return sample_dcor(a, b);
        },
        py::arg("x"), py::arg("y"), py::arg("beta") = 1.0, py::arg("grid") = py::none(),
        "Distance correlation, or None when a marginal sample is constant.");

    m.def(
        "u_stat",
        [](const Array& x, const Array& y, double beta, std::optional<Array> grid) {
            auto [a, b] = matrices(x, y, beta, grid, 1);
            return u_stat_T(a, b);
        },
        py::arg("x"), py::arg("y"), py::arg("beta") = 1.0, py::arg("grid") = py::none());

    m.def("c0", [](double beta) { return c0_constant(DcovParams{beta}); }, py::arg("beta") = 1.0);

    m.def(
        "independence_test",
        [](const Array& x, const Array& y, std::size_t B, const std::string& method, std::uint64_t seed,
           double beta, unsigned threads, std::optional<Array> grid) {
            auto [a, b] = matrices(x, y, beta, grid, threads);
            const auto m = parse_test_method(method);
            TestResult r;
            {
                py::gil_scoped_release release;
                r = run_test(a, b, B, RngSpec{seed}, m, threads);
            }
            return result_dict(r);
        },
        py::arg("x"), py::arg("y"), py::arg("B") = 200, py::arg("method") = "bootstrap_paired",
        py::arg("seed") = 0, py::arg("beta") = 1.0, py::arg("threads") = 1, py::arg("grid") = py::none());

    m.def(
        "simulate",
        [](const std::string& process, std::size_t n, std::size_t p, double shape, double rho,
           std::uint64_t seed) {
            ProcessSpec spec;
            spec.kind = parse_process_kind(process);
            spec.shape = shape;
            spec.rho = rho;
            auto rng = make_stream({seed, hash_tag("simulate")});
            const auto s = simulate_sample(spec, n, p, rng);
            return py::make_tuple(to_array({s.x().begin(), s.x().end()}), to_array({s.y().begin(), s.y().end()}));
        },
        py::arg("process"), py::arg("n"), py::arg("p"), py::arg("shape") = 0.5, py::arg("rho") = 0.0,
        py::arg("seed") = 0, "Paired sample as two (n, p) arrays; same draws as `fdcov simulate`.");

    m.def(
        "run_experiment",
        [](const std::string& id, std::optional<std::vector<std::size_t>> n,
           std::optional<std::vector<std::size_t>> p, std::optional<std::size_t> reps,
           std::optional<std::uint64_t> seed, std::optional<std::size_t> B, unsigned threads) {
            auto spec = default_experiment(parse_experiment_id(id));
            ExperimentOverrides o;
            o.n_values = n;
            o.p_values = p;
            o.replications = reps;
            o.seed = seed;
            o.bootstrap_B = B;
            apply_overrides(spec, o);
            spec.validate();
            std::vector<ResultRow> rows;
            {
                py::gil_scoped_release release;
                rows = run_experiment(spec, threads);
            }
            py::list out;
            for (const auto& r : rows) {
                py::dict d;
                d["experiment"] = r.experiment;
                d["panel"] = r.panel;
                d["replicate"] = r.replicate;
                d["n"] = r.n;
                d["p"] = r.p;
                d["shape"] = r.shape;
                d["rho"] = r.rho;
                d["statistic"] = r.statistic;
                d["value"] = r.value;
                out.append(std::move(d));
            }
            return out;
        },
        py::arg("id"), py::arg("n") = py::none(), py::arg("p") = py::none(), py::arg("reps") = py::none(),
        py::arg("seed") = py::none(), py::arg("B") = py::none(), py::arg("threads") = 1);
}
