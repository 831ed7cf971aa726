#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fdcov/dcov.hpp"
#include "fdcov/grid.hpp"
#include "fdcov/kernels.hpp"
#include "fdcov/rng.hpp"

namespace fdcov {

enum class TestMethod { bootstrap_paired, bootstrap_product, permutation };

std::string_view to_string(TestMethod m) noexcept;
/// Throws std::invalid_argument for unknown names.
TestMethod parse_test_method(std::string_view name);

/// Scale between the bootstrap U-statistic and n T_n: C(4, 2) for an order-4,
/// 1-degenerate kernel.
inline constexpr double kBootstrapScale = 6.0;

struct TestResult {
    double statistic = 0.0;  // n * T_n
    double p_value = 1.0;
    TestMethod method = TestMethod::bootstrap_paired;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    std::vector<double> reference_sample;
    double shift_estimate = 0.0;
    double scale_factor = 1.0;
    bool degenerate = false;
    std::vector<std::string> warnings;

    nlohmann::json to_json(bool include_reference = false) const;
};

/// (1 + #{reference >= statistic}) / (B + 1).
double monte_carlo_p_value(double statistic, std::span<const double> reference);

/// (1/n) sum_{i != j} H2(idx[i], idx[j]).
double u_boot(const H2Matrix& h2, std::span<const std::size_t> indices);

/// U_n(Z*) for a resample that takes X from idx_x and Y from idx_y, with the
/// product-law projection (1/6) ca(i, j) cb(i, j) of double-centred matrices.
double u_boot_product(std::span<const double> ca, std::span<const double> cb, std::size_t n,
                      std::span<const std::size_t> idx_x, std::span<const std::size_t> idx_y);

/// Bootstrap replicates U_n(Z*) drawn with streams (seed, b), b = 1..B.
/// bootstrap_paired resamples pairs from the paired empirical law and uses
/// h2_matrix; bootstrap_product resamples X and Y indices independently and
/// uses the product-law projection.
std::vector<double> bootstrap_null(const PairedSample& sample, const DcovParams& params,
                                   std::size_t B, const RngSpec& rng,
                                   TestMethod method = TestMethod::bootstrap_paired,
                                   unsigned threads = 1);
std::vector<double> bootstrap_null(const DistMatrix& a, const DistMatrix& b, std::size_t B,
                                   const RngSpec& rng, TestMethod method, unsigned threads = 1);
std::vector<double> bootstrap_null(const H2Matrix& h2, std::size_t B, const RngSpec& rng,
                                   unsigned threads = 1);

/// Bootstrap-calibrated test of n T_n. Reference values are
/// 6 U* + mean(a) mean(b).
TestResult independence_test(const PairedSample& sample, const DcovParams& params,
                             std::size_t B, const RngSpec& rng,
                             TestMethod method = TestMethod::bootstrap_paired,
                             unsigned threads = 1);
TestResult independence_test(const DistMatrix& a, const DistMatrix& b, std::size_t B,
                             const RngSpec& rng, TestMethod method, unsigned threads = 1);

/// Permutation test: reference values n T_n(a, b re-paired by a uniform
/// permutation drawn from stream (seed, b)).
TestResult permutation_test(const PairedSample& sample, const DcovParams& params,
                            std::size_t B, const RngSpec& rng, unsigned threads = 1);
TestResult permutation_test(const DistMatrix& a, const DistMatrix& b, std::size_t B,
                            const RngSpec& rng, unsigned threads = 1);

/// Dispatches on `method`.
TestResult run_test(const DistMatrix& a, const DistMatrix& b, std::size_t B, const RngSpec& rng,
                    TestMethod method, unsigned threads = 1);

}  // namespace fdcov
