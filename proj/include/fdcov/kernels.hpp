#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fdcov/dcov.hpp"

namespace fdcov {

/// Distance matrices of one paired sample together with every aggregate the
/// order-4 kernel needs, computed once.
///
/// With a = X-distances, b = Y-distances and row means ra, rb:
///   cross(c, d) = mean_j a(c, j) b(d, j)
///   a_weighted_b(c) = mean_j ra(j) b(j, c)
///   b_weighted_a(c) = mean_j rb(j) a(j, c)
///   mean_product = mean_{j,k} a(j, k) b(j, k)
/// The cross matrix is a matrix product and costs O(n^3) to build; every
/// other aggregate is O(n^2).
class KernelContext {
public:
    KernelContext(DistMatrix a, DistMatrix b, unsigned threads = 1);

    std::size_t size() const noexcept { return a_.size(); }
    const DistMatrix& a() const noexcept { return a_; }
    const DistMatrix& b() const noexcept { return b_; }

    double cross(std::size_t c, std::size_t d) const noexcept { return cross_[c * size() + d]; }
    std::span<const double> a_weighted_b() const noexcept { return a_weighted_b_; }
    std::span<const double> b_weighted_a() const noexcept { return b_weighted_a_; }
    double mean_product() const noexcept { return mean_product_; }

private:
    DistMatrix a_;
    DistMatrix b_;
    std::vector<double> cross_;
    std::vector<double> a_weighted_b_;
    std::vector<double> b_weighted_a_;
    double mean_product_ = 0.0;
};

/// f(z1..z4) = a12 b12 + a12 b34 - 2 a12 b13 on sample indices.
double kernel_f(const KernelContext& ctx, std::size_t i1, std::size_t i2, std::size_t i3,
                std::size_t i4);

/// Average of kernel_f over the 24 orderings of its arguments.
double kernel_h(const KernelContext& ctx, std::size_t i1, std::size_t i2, std::size_t i3,
                std::size_t i4);

/// Symmetric n x n matrix of second-order Hoeffding projections.
class H2Matrix {
public:
    H2Matrix(std::size_t n, std::vector<double> entries);

    std::size_t size() const noexcept { return n_; }
    double operator()(std::size_t a, std::size_t b) const noexcept { return data_[a * n_ + b]; }
    std::span<const double> row(std::size_t a) const noexcept {
        return std::span<const double>(data_).subspan(a * n_, n_);
    }
    std::span<const double> data() const noexcept { return data_; }

private:
    std::size_t n_;
    std::vector<double> data_;
};

/// h2(z_a, z_b; F_n) for the empirical law F_n of the paired sample:
///   g2(a, b) - g1(a) - g1(b) + T
/// where g2(a, b) = mean_{k,l} h(a, b, k, l), g1 its row mean and T the
/// grand mean. Every row of the result has mean zero.
H2Matrix h2_matrix(const KernelContext& ctx, unsigned threads = 1);

/// (1/6) * (double-centred a) * (double-centred b), entrywise. This is the
/// projection against the product of the marginal empirical laws.
H2Matrix h2_product_law(const DistMatrix& a, const DistMatrix& b);

/// Double-centred matrix a(k, l) + mean(a) - ra(k) - ra(l), row-major.
std::vector<double> double_centered(const DistMatrix& a);

}  // namespace fdcov
