#include "fdcov/dcov.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <stdexcept>
#include <string>

#include "fdcov/parallel.hpp"

namespace fdcov {

void DcovParams::validate() const {
    if (!(beta > 0.0 && beta < 2.0)) {
        throw std::invalid_argument("beta must lie in (0, 2), got " + std::to_string(beta));
    }
}

DistMatrix::DistMatrix(std::size_t n, double beta, std::vector<double> entries)
    : n_(n), beta_(beta), data_(std::move(entries)) {
    if (n_ == 0) throw std::invalid_argument("distance matrix must be non-empty");
    if (data_.size() != n_ * n_) {
        throw std::invalid_argument("distance matrix needs n*n entries");
    }
    row_means_.resize(n_);
    CompensatedSum total;
    for (std::size_t k = 0; k < n_; ++k) {
        if (data_[k * n_ + k] != 0.0) {
            throw std::invalid_argument("distance matrix diagonal must be zero");
        }
        CompensatedSum rs;
        for (std::size_t l = 0; l < n_; ++l) {
            const double v = data_[k * n_ + l];
            if (!(v >= 0.0) || !std::isfinite(v)) {
                throw std::invalid_argument("distance matrix entries must be finite and >= 0");
            }
            if (v != data_[l * n_ + k]) {
                throw std::invalid_argument("distance matrix must be symmetric");
            }
            rs += v;
        }
        row_means_[k] = rs.value() / static_cast<double>(n_);
        total += rs.value();
    }
    grand_mean_ = total.value() / static_cast<double>(n_ * n_);
}

DistMatrix DistMatrix::scaled(double c) const {
    std::vector<double> d(data_);
    for (double& v : d) v *= c;
    return DistMatrix(n_, beta_, std::move(d));
}

DistMatrix dist_matrix(std::span<const Trajectory> paths, const DcovParams& params,
                       unsigned threads) {
    params.validate();
    if (paths.empty()) throw std::invalid_argument("dist_matrix: no paths");
    require_common_partition(paths);

    const std::size_t n = paths.size();
    const std::size_t p = paths.front().size();
    std::vector<double> coords(n * p);
    for (std::size_t k = 0; k < n; ++k) {
        const auto w = embed(paths[k]);
        std::copy(w.coords.begin(), w.coords.end(), coords.begin() + k * p);
    }

    const double beta = params.beta;
    std::vector<double> out(n * n, 0.0);
    parallel_for(n, threads, [&](std::size_t k) {
        const double* xk = coords.data() + k * p;
        for (std::size_t l = k + 1; l < n; ++l) {
            const double* xl = coords.data() + l * p;
            double s = 0.0;
            for (std::size_t i = 0; i < p; ++i) {
                const double d = xk[i] - xl[i];
                s += d * d;
            }
            const double dist = std::sqrt(s);
            const double v = beta == 1.0 ? dist : std::pow(dist, beta);
            out[k * n + l] = v;
            out[l * n + k] = v;
        }
    });
    return DistMatrix(n, beta, std::move(out));
}

namespace {

void require_same_size(const DistMatrix& a, const DistMatrix& b, const char* what) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(what) + ": matrix sizes differ (" +
                                    std::to_string(a.size()) + " vs " +
                                    std::to_string(b.size()) + ")");
    }
}

}  // namespace

double sample_dcov(const DistMatrix& a, const DistMatrix& b) {
    require_same_size(a, b, "sample_dcov");
    const std::size_t n = a.size();
    const auto da = a.data();
    const auto db = b.data();
    CompensatedSum prod;
    for (std::size_t i = 0; i < n * n; ++i) prod += da[i] * db[i];
    CompensatedSum cross;
    const auto ra = a.row_means();
    const auto rb = b.row_means();
    for (std::size_t k = 0; k < n; ++k) cross += ra[k] * rb[k];

    const double nn = static_cast<double>(n);
    const double i1 = prod.value() / (nn * nn);
    const double i2 = cross.value() / nn;
    const double i3 = a.grand_mean() * b.grand_mean();
    CompensatedSum t;
    t += i1;
    t += i3;
    t += -2.0 * i2;
    return t.value();
}

double sample_dcov_permuted(const DistMatrix& a, const DistMatrix& b,
                            std::span<const std::size_t> perm) {
    require_same_size(a, b, "sample_dcov_permuted");
    const std::size_t n = a.size();
    if (perm.size() != n) throw std::invalid_argument("permutation has wrong length");
    CompensatedSum prod;
    CompensatedSum cross;
    const auto ra = a.row_means();
    const auto rb = b.row_means();
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t pk = perm[k];
        if (pk >= n) throw std::invalid_argument("permutation index out of range");
        const auto arow = a.row(k);
        const auto brow = b.row(pk);
        for (std::size_t l = 0; l < n; ++l) prod += arow[l] * brow[perm[l]];
        cross += ra[k] * rb[pk];
    }
    const double nn = static_cast<double>(n);
    CompensatedSum t;
    t += prod.value() / (nn * nn);
    t += a.grand_mean() * b.grand_mean();
    t += -2.0 * cross.value() / nn;
    return t.value();
}

std::optional<double> sample_dcor(const DistMatrix& ax, const DistMatrix& ay) {
    require_same_size(ax, ay, "sample_dcor");
    const double vx = sample_dcov(ax, ax);
    const double vy = sample_dcov(ay, ay);
    const double eps = 1e-14 * ax.grand_mean() * ay.grand_mean();
    if (vx <= eps || vy <= eps) return std::nullopt;
    return sample_dcov(ax, ay) / std::sqrt(vx * vy);
}

namespace detail {

double u_stat_enumerated(const DistMatrix& a, const DistMatrix& b) {
    const std::size_t n = a.size();
    CompensatedSum s;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            for (std::size_t k = 0; k < n; ++k) {
                if (k == i || k == j) continue;
                for (std::size_t l = 0; l < n; ++l) {
                    if (l == i || l == j || l == k) continue;
                    s += a(i, j) * b(i, j) + a(i, j) * b(k, l) - 2.0 * a(i, j) * b(i, k);
                    ++count;
                }
            }
        }
    return s.value() / static_cast<double>(count);
}

double u_stat_closed_form(const DistMatrix& a, const DistMatrix& b) {
    // With row sums R and totals S over zero-diagonal matrices:
    //   sum_distinct a_ij b_ij = (n-2)(n-3) S_ab
    //   sum_distinct a_ij b_ik = (n-3) (sum_i Ra_i Rb_i - S_ab)
    //   sum_distinct a_ij b_kl = Sa Sb - 4 sum_i Ra_i Rb_i + 2 S_ab
    const std::size_t n = a.size();
    const double nn = static_cast<double>(n);
    CompensatedSum s_ab;
    const auto da = a.data();
    const auto db = b.data();
    for (std::size_t i = 0; i < n * n; ++i) s_ab += da[i] * db[i];
    CompensatedSum rr;
    for (std::size_t k = 0; k < n; ++k) rr += (a.row_means()[k] * nn) * (b.row_means()[k] * nn);
    const double sa = a.grand_mean() * nn * nn;
    const double sb = b.grand_mean() * nn * nn;

    CompensatedSum num;
    num += (nn - 1.0) * (nn - 2.0) * s_ab.value();
    num += sa * sb;
    num += -2.0 * (nn - 1.0) * rr.value();
    return num.value() / (nn * (nn - 1.0) * (nn - 2.0) * (nn - 3.0));
}

}  // namespace detail

double u_stat_T(const DistMatrix& a, const DistMatrix& b) {
    require_same_size(a, b, "u_stat_T");
    if (a.size() < 4) throw std::invalid_argument("u_stat_T requires n >= 4");
    if (a.size() <= kUStatEnumerationCutoff) return detail::u_stat_enumerated(a, b);
    return detail::u_stat_closed_form(a, b);
}

double c0_constant(const DcovParams& params) {
    params.validate();
    const double expo = 1.0 + params.beta / 2.0;
    // On (0, 1] the integrand behaves like s^{1 - beta/2} / 2. Past 1 the
    // algebraic part s^{-expo} integrates to 1 / (expo - 1) and only the
    // Gaussian remainder is left to quadrature.
    auto head = [expo](double s) {
        if (s < 1e-8) return 0.5 * std::pow(s, 2.0 - expo);
        return -std::expm1(-0.5 * s * s) / std::pow(s, expo);
    };
    auto tail = [expo](double s) { return std::exp(-0.5 * s * s) / std::pow(s, expo); };
    double err_head = 0.0, err_tail = 0.0;
    boost::math::quadrature::tanh_sinh<double> finite;
    boost::math::quadrature::exp_sinh<double> infinite;
    const double h = finite.integrate(head, 0.0, 1.0, 1e-13, &err_head);
    const double t = infinite.integrate(tail, 1.0, std::numeric_limits<double>::infinity(), 1e-13, &err_tail);
    const double half = h + 1.0 / (expo - 1.0) - t;
    const double err = err_head + err_tail;
    if (!(err <= 5e-9)) {
        throw std::runtime_error("c0_constant: quadrature error estimate " + std::to_string(err));
    }
    return 2.0 * half;
}

void write_csv(std::ostream& os, const DistMatrix& m) {
    const auto old = os.precision(17);
    os << "# n=" << m.size() << " beta=" << m.beta() << '\n';
    for (std::size_t k = 0; k < m.size(); ++k) {
        for (std::size_t l = 0; l < m.size(); ++l) {
            if (l) os << ',';
            os << m(k, l);
        }
        os << '\n';
    }
    os.precision(old);
}

}  // namespace fdcov
