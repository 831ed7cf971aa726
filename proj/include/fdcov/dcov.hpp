#pragma once

#include <cstddef>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "fdcov/grid.hpp"

namespace fdcov {

/// Exponent of the distance kernel |x - x'|^beta, 0 < beta < 2.
struct DcovParams {
    double beta = 1.0;

    /// Throws std::invalid_argument when beta is outside (0, 2).
    void validate() const;
};

/// Symmetric n x n matrix of beta-powered step-L2 distances with zero
/// diagonal. Row means and the grand mean are cached on construction.
class DistMatrix {
public:
    /// Row-major entries. Throws std::invalid_argument if the data is not a
    /// symmetric, nonnegative matrix with zero diagonal.
    DistMatrix(std::size_t n, double beta, std::vector<double> entries);

    std::size_t size() const noexcept { return n_; }
    double beta() const noexcept { return beta_; }
    double operator()(std::size_t k, std::size_t l) const noexcept { return data_[k * n_ + l]; }
    std::span<const double> row(std::size_t k) const noexcept {
        return std::span<const double>(data_).subspan(k * n_, n_);
    }
    std::span<const double> data() const noexcept { return data_; }

    std::span<const double> row_means() const noexcept { return row_means_; }
    double grand_mean() const noexcept { return grand_mean_; }

    /// Copy with every entry multiplied by c >= 0.
    DistMatrix scaled(double c) const;

private:
    std::size_t n_;
    double beta_;
    std::vector<double> data_;
    std::vector<double> row_means_;
    double grand_mean_ = 0.0;
};

/// entry(k, l) = step_l2_distance(paths[k], paths[l])^beta. Rows are split
/// across `threads` workers (0 = all cores); the result does not depend on
/// the thread count.
DistMatrix dist_matrix(std::span<const Trajectory> paths, const DcovParams& params,
                       unsigned threads = 1);

/// Sample distance covariance I1 + I3 - 2 I2 of two distance matrices in
/// O(n^2), with compensated accumulation.
double sample_dcov(const DistMatrix& a, const DistMatrix& b);

/// sample_dcov(a, b o perm), i.e. Y re-paired by Y_k -> Y_{perm[k]}.
double sample_dcov_permuted(const DistMatrix& a, const DistMatrix& b,
                            std::span<const std::size_t> perm);

/// Sample distance correlation. std::nullopt ("undefined") when either
/// self-covariance is at or below 1e-14 * mean(a) * mean(b).
std::optional<double> sample_dcor(const DistMatrix& ax, const DistMatrix& ay);

/// The U-statistic over mutually distinct index tuples (n >= 4). Below
/// kUStatEnumerationCutoff the tuples are enumerated; above it the
/// inclusion-exclusion closed form is used.
double u_stat_T(const DistMatrix& a, const DistMatrix& b);

inline constexpr std::size_t kUStatEnumerationCutoff = 12;

namespace detail {
double u_stat_enumerated(const DistMatrix& a, const DistMatrix& b);
double u_stat_closed_form(const DistMatrix& a, const DistMatrix& b);
}  // namespace detail

/// c0 = integral over R of (1 - exp(-s^2/2)) / |s|^{1 + beta/2} ds, by
/// adaptive double-exponential quadrature (absolute error <= 1e-8).
double c0_constant(const DcovParams& params);

/// Debug dump: "# n=<n> beta=<beta>" then n comma-separated rows.
void write_csv(std::ostream& os, const DistMatrix& m);

}  // namespace fdcov
