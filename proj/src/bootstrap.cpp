#include "fdcov/bootstrap.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

#include "fdcov/parallel.hpp"

namespace fdcov {

std::string_view to_string(TestMethod m) noexcept {
    switch (m) {
        case TestMethod::bootstrap_paired: return "bootstrap_paired";
        case TestMethod::bootstrap_product: return "bootstrap_product";
        case TestMethod::permutation: return "permutation";
    }
    return "unknown";
}

TestMethod parse_test_method(std::string_view name) {
    if (name == "bootstrap_paired" || name == "bootstrap") return TestMethod::bootstrap_paired;
    if (name == "bootstrap_product") return TestMethod::bootstrap_product;
    if (name == "permutation") return TestMethod::permutation;
    throw std::invalid_argument("unknown test method '" + std::string(name) + "'");
}

nlohmann::json TestResult::to_json(bool include_reference) const {
    nlohmann::json j{
        {"statistic", statistic},
        {"p_value", p_value},
        {"method", std::string(to_string(method))},
        {"B", replicates},
        {"seed", seed},
        {"shift", shift_estimate},
        {"scale", scale_factor},
        {"degenerate", degenerate},
        {"warnings", warnings},
    };
    if (include_reference) j["reference"] = reference_sample;
    return j;
}

double monte_carlo_p_value(double statistic, std::span<const double> reference) {
    std::size_t hits = 0;
    for (double r : reference) hits += r >= statistic;
    return static_cast<double>(1 + hits) / static_cast<double>(reference.size() + 1);
}

namespace {

void check_index_vector(std::span<const std::size_t> idx, std::size_t n) {
    if (idx.size() != n) {
        throw std::invalid_argument("bootstrap index vector has length " +
                                    std::to_string(idx.size()) + ", expected " +
                                    std::to_string(n));
    }
    for (std::size_t i : idx) {
        if (i >= n) throw std::invalid_argument("bootstrap index out of range");
    }
}

std::vector<std::size_t> draw_indices(Stream& rng, std::size_t n) {
    std::vector<std::size_t> idx(n);
    for (auto& i : idx) i = uniform_index(rng, n);
    return idx;
}

}  // namespace

double u_boot(const H2Matrix& h2, std::span<const std::size_t> indices) {
    const std::size_t n = h2.size();
    check_index_vector(indices, n);
    // sum_{i != j} H(I_i, I_j) = sum_{k,l} c_k c_l H(k, l) - sum_k c_k H(k, k)
    std::vector<double> counts(n, 0.0);
    for (std::size_t i : indices) counts[i] += 1.0;
    CompensatedSum s;
    for (std::size_t k = 0; k < n; ++k) {
        if (counts[k] == 0.0) continue;
        const auto row = h2.row(k);
        double inner = 0.0;
        for (std::size_t l = 0; l < n; ++l) inner += counts[l] * row[l];
        s += counts[k] * (inner - row[k]);
    }
    return s.value() / static_cast<double>(n);
}

double u_boot_product(std::span<const double> ca, std::span<const double> cb, std::size_t n,
                      std::span<const std::size_t> idx_x, std::span<const std::size_t> idx_y) {
    check_index_vector(idx_x, n);
    check_index_vector(idx_y, n);
    if (ca.size() != n * n || cb.size() != n * n) {
        throw std::invalid_argument("u_boot_product: matrices must be n x n");
    }
    CompensatedSum s;
    for (std::size_t i = 0; i < n; ++i) {
        const double* ra = ca.data() + idx_x[i] * n;
        const double* rb = cb.data() + idx_y[i] * n;
        double row = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) row += ra[idx_x[j]] * rb[idx_y[j]];
        }
        s += row;
    }
    return s.value() / (6.0 * static_cast<double>(n));
}

std::vector<double> bootstrap_null(const H2Matrix& h2, std::size_t B, const RngSpec& rng,
                                   unsigned threads) {
    if (B == 0) throw std::invalid_argument("bootstrap needs B >= 1");
    const std::size_t n = h2.size();
    std::vector<double> out(B);
    parallel_for(B, threads, [&](std::size_t b) {
        auto stream = rng.stream(b + 1);
        out[b] = u_boot(h2, draw_indices(stream, n));
    });
    return out;
}

std::vector<double> bootstrap_null(const DistMatrix& a, const DistMatrix& b, std::size_t B,
                                   const RngSpec& rng, TestMethod method, unsigned threads) {
    if (a.size() != b.size()) throw std::invalid_argument("bootstrap_null: sizes differ");
    if (a.size() < 4) throw std::invalid_argument("bootstrap_null requires n >= 4");
    if (B == 0) throw std::invalid_argument("bootstrap needs B >= 1");
    switch (method) {
        case TestMethod::bootstrap_paired: {
            const KernelContext ctx(a, b, threads);
            return bootstrap_null(h2_matrix(ctx, threads), B, rng, threads);
        }
        case TestMethod::bootstrap_product: {
            const std::size_t n = a.size();
            const auto ca = double_centered(a);
            const auto cb = double_centered(b);
            std::vector<double> out(B);
            parallel_for(B, threads, [&](std::size_t rep) {
                auto stream = rng.stream(rep + 1);
                const auto ix = draw_indices(stream, n);
                const auto iy = draw_indices(stream, n);
                out[rep] = u_boot_product(ca, cb, n, ix, iy);
            });
            return out;
        }
        case TestMethod::permutation: break;
    }
    throw std::invalid_argument("bootstrap_null: permutation is not a bootstrap method");
}

std::vector<double> bootstrap_null(const PairedSample& sample, const DcovParams& params,
                                   std::size_t B, const RngSpec& rng, TestMethod method,
                                   unsigned threads) {
    const auto a = dist_matrix(sample.x(), params, threads);
    const auto b = dist_matrix(sample.y(), params, threads);
    return bootstrap_null(a, b, B, rng, method, threads);
}

namespace {

TestResult prepare(const DistMatrix& a, const DistMatrix& b, std::size_t B, const RngSpec& rng,
                   TestMethod method) {
    if (a.size() != b.size()) throw std::invalid_argument("test: sizes differ");
    if (a.size() < 4) throw std::invalid_argument("test requires n >= 4");
    if (B == 0) throw std::invalid_argument("test needs B >= 1");
    TestResult r;
    r.method = method;
    r.replicates = B;
    r.seed = rng.master_seed;
    r.statistic = static_cast<double>(a.size()) * sample_dcov(a, b);
    if (a.size() < 8) r.warnings.push_back("n < 8: reference distribution is unreliable");
    if (B < 99) r.warnings.push_back("B < 99: p-value resolution is coarse");
    r.degenerate = a.grand_mean() == 0.0 || b.grand_mean() == 0.0;
    return r;
}

void finish_degenerate(TestResult& r) {
    r.reference_sample.assign(r.replicates, 0.0);
    r.statistic = 0.0;
    r.p_value = 1.0;
    r.warnings.push_back("degenerate sample: all X or all Y paths identical");
}

}  // namespace

TestResult independence_test(const DistMatrix& a, const DistMatrix& b, std::size_t B,
                             const RngSpec& rng, TestMethod method, unsigned threads) {
    if (method == TestMethod::permutation) {
        throw std::invalid_argument("independence_test: use permutation_test for permutation");
    }
    TestResult r = prepare(a, b, B, rng, method);
    r.scale_factor = kBootstrapScale;
    r.shift_estimate = a.grand_mean() * b.grand_mean();
    if (r.degenerate) {
        finish_degenerate(r);
        return r;
    }
    r.reference_sample = bootstrap_null(a, b, B, rng, method, threads);
    for (double& v : r.reference_sample) v = r.scale_factor * v + r.shift_estimate;
    r.p_value = monte_carlo_p_value(r.statistic, r.reference_sample);
    return r;
}

TestResult independence_test(const PairedSample& sample, const DcovParams& params,
                             std::size_t B, const RngSpec& rng, TestMethod method,
                             unsigned threads) {
    const auto a = dist_matrix(sample.x(), params, threads);
    const auto b = dist_matrix(sample.y(), params, threads);
    return independence_test(a, b, B, rng, method, threads);
}

TestResult permutation_test(const DistMatrix& a, const DistMatrix& b, std::size_t B,
                            const RngSpec& rng, unsigned threads) {
    TestResult r = prepare(a, b, B, rng, TestMethod::permutation);
    if (r.degenerate) {
        finish_degenerate(r);
        return r;
    }
    const std::size_t n = a.size();
    const double nn = static_cast<double>(n);
    r.reference_sample.resize(B);
    parallel_for(B, threads, [&](std::size_t rep) {
        auto stream = rng.stream(rep + 1);
        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[uniform_index(stream, i + 1)]);
        r.reference_sample[rep] = nn * sample_dcov_permuted(a, b, perm);
    });
    r.p_value = monte_carlo_p_value(r.statistic, r.reference_sample);
    return r;
}

TestResult permutation_test(const PairedSample& sample, const DcovParams& params,
                            std::size_t B, const RngSpec& rng, unsigned threads) {
    const auto a = dist_matrix(sample.x(), params, threads);
    const auto b = dist_matrix(sample.y(), params, threads);
    return permutation_test(a, b, B, rng, threads);
}

TestResult run_test(const DistMatrix& a, const DistMatrix& b, std::size_t B, const RngSpec& rng,
                    TestMethod method, unsigned threads) {
    if (method == TestMethod::permutation) return permutation_test(a, b, B, rng, threads);
    return independence_test(a, b, B, rng, method, threads);
}

}  // namespace fdcov
