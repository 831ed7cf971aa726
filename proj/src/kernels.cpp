#include "fdcov/kernels.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <string>
#include <tuple>

#include "fdcov/parallel.hpp"

namespace fdcov {

KernelContext::KernelContext(DistMatrix a, DistMatrix b, unsigned threads)
    : a_(std::move(a)), b_(std::move(b)) {
    if (a_.size() != b_.size()) {
        throw std::invalid_argument("KernelContext: matrix sizes differ");
    }
    const std::size_t n = a_.size();
    const double nn = static_cast<double>(n);
    cross_.assign(n * n, 0.0);
    parallel_for(n, threads, [&](std::size_t c) {
        const auto ar = a_.row(c);
        for (std::size_t d = 0; d < n; ++d) {
            const auto br = b_.row(d);
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += ar[j] * br[j];
            cross_[c * n + d] = s / nn;
        }
    });

    a_weighted_b_.resize(n);
    b_weighted_a_.resize(n);
    const auto ra = a_.row_means();
    const auto rb = b_.row_means();
    for (std::size_t c = 0; c < n; ++c) {
        CompensatedSum sab;
        CompensatedSum sba;
        const auto ar = a_.row(c);
        const auto br = b_.row(c);
        for (std::size_t j = 0; j < n; ++j) {
            sab += ra[j] * br[j];
            sba += rb[j] * ar[j];
        }
        a_weighted_b_[c] = sab.value() / nn;
        b_weighted_a_[c] = sba.value() / nn;
    }
    CompensatedSum prod;
    const auto da = a_.data();
    const auto db = b_.data();
    for (std::size_t i = 0; i < n * n; ++i) prod += da[i] * db[i];
    mean_product_ = prod.value() / (nn * nn);
}

namespace {

void check_indices(const KernelContext& ctx, std::initializer_list<std::size_t> idx) {
    for (std::size_t i : idx) {
        if (i >= ctx.size()) {
            throw std::invalid_argument("kernel index " + std::to_string(i) +
                                        " out of range for n=" + std::to_string(ctx.size()));
        }
    }
}

double f_unchecked(const DistMatrix& a, const DistMatrix& b, std::size_t i1, std::size_t i2,
                   std::size_t i3, std::size_t i4) {
    const double a12 = a(i1, i2);
    return a12 * b(i1, i2) + a12 * b(i3, i4) - 2.0 * a12 * b(i1, i3);
}

// A monomial coef * a(x, y) * b(u, v) over the symbols 0 = z_a, 1 = z_b and
// the averaged-out 2 = Z, 3 = Z'.
struct Monomial {
    double coef;
    std::array<int, 4> sym;  // x, y, u, v
};

std::array<int, 4> canonical(std::array<int, 4> s) {
    auto norm = [](std::array<int, 4> t) {
        if (t[0] > t[1]) std::swap(t[0], t[1]);
        if (t[2] > t[3]) std::swap(t[2], t[3]);
        return t;
    };
    auto swapped = s;
    for (int& v : swapped) v = v == 2 ? 3 : v == 3 ? 2 : v;
    return std::min(norm(s), norm(swapped));
}

// Expansion of mean_{k,l} h(z_a, z_b, Z_k, Z_l) into distinct monomials.
std::vector<Monomial> build_g2_monomials() {
    std::map<std::array<int, 4>, double> acc;
    std::array<int, 4> perm{0, 1, 2, 3};
    do {
        // slot s of f receives symbol perm[s]
        const int s1 = perm[0], s2 = perm[1], s3 = perm[2], s4 = perm[3];
        const std::array<std::pair<double, std::array<int, 4>>, 3> terms{{
            {1.0, {s1, s2, s1, s2}},
            {1.0, {s1, s2, s3, s4}},
            {-2.0, {s1, s2, s1, s3}},
        }};
        for (const auto& [c, t] : terms) {
            if (t[0] == t[1] || t[2] == t[3]) continue;  // zero diagonal
            acc[canonical(t)] += c / 24.0;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    std::vector<Monomial> out;
    for (const auto& [s, c] : acc) {
        if (c != 0.0) out.push_back({c, s});
    }
    return out;
}

const std::vector<Monomial>& g2_monomials() {
    static const std::vector<Monomial> m = build_g2_monomials();
    return m;
}

// Average of a(x, y) b(u, v) over the free symbols, at fixed (ia, ib).
double evaluate(const KernelContext& ctx, const std::array<int, 4>& s, std::size_t ia,
                std::size_t ib) {
    const DistMatrix& a = ctx.a();
    const DistMatrix& b = ctx.b();
    auto idx = [&](int sym) { return sym == 0 ? ia : ib; };
    auto is_free = [](int sym) { return sym >= 2; };

    // Pairs are canonical: a free symbol, if any, sits in the second slot.
    const int x = s[0], y = s[1], u = s[2], v = s[3];
    const int free_a = is_free(x) + is_free(y);
    const int free_b = is_free(u) + is_free(v);

    switch (free_a * 3 + free_b) {
        case 0:  // no free symbol
            return a(idx(x), idx(y)) * b(idx(u), idx(v));
        case 1:  // b(u, Z)
            return a(idx(x), idx(y)) * b.row_means()[idx(u)];
        case 2:  // b(Z, Z')
            return a(idx(x), idx(y)) * b.grand_mean();
        case 3:  // a(x, Z)
            return a.row_means()[idx(x)] * b(idx(u), idx(v));
        case 4:  // a(x, Z) b(u, Z) or a(x, Z) b(u, Z')
            return y == v ? ctx.cross(idx(x), idx(u))
                          : a.row_means()[idx(x)] * b.row_means()[idx(u)];
        case 5:  // a(x, Z) b(Z, Z')
            return ctx.b_weighted_a()[idx(x)];
        case 6:  // a(Z, Z') b(u, v)
            return a.grand_mean() * b(idx(u), idx(v));
        case 7:  // a(Z, Z') b(u, Z)
            return ctx.a_weighted_b()[idx(u)];
        case 8:
            return ctx.mean_product();
        default:
            return 0.0;
    }
}

}  // namespace

double kernel_f(const KernelContext& ctx, std::size_t i1, std::size_t i2, std::size_t i3,
                std::size_t i4) {
    check_indices(ctx, {i1, i2, i3, i4});
    return f_unchecked(ctx.a(), ctx.b(), i1, i2, i3, i4);
}

double kernel_h(const KernelContext& ctx, std::size_t i1, std::size_t i2, std::size_t i3,
                std::size_t i4) {
    check_indices(ctx, {i1, i2, i3, i4});
    const std::array<std::size_t, 4> z{i1, i2, i3, i4};
    std::array<int, 4> perm{0, 1, 2, 3};
    double s = 0.0;
    do {
        s += f_unchecked(ctx.a(), ctx.b(), z[perm[0]], z[perm[1]], z[perm[2]], z[perm[3]]);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return s / 24.0;
}

H2Matrix::H2Matrix(std::size_t n, std::vector<double> entries)
    : n_(n), data_(std::move(entries)) {
    if (data_.size() != n_ * n_) throw std::invalid_argument("H2Matrix needs n*n entries");
}

H2Matrix h2_matrix(const KernelContext& ctx, unsigned threads) {
    const std::size_t n = ctx.size();
    if (n < 2) throw std::invalid_argument("h2_matrix requires n >= 2");
    const auto& monomials = g2_monomials();

    std::vector<double> g2(n * n);
    parallel_for(n, threads, [&](std::size_t ia) {
        for (std::size_t ib = ia; ib < n; ++ib) {
            double s = 0.0;
            for (const auto& m : monomials) s += m.coef * evaluate(ctx, m.sym, ia, ib);
            g2[ia * n + ib] = s;
            g2[ib * n + ia] = s;
        }
    });

    const double nn = static_cast<double>(n);
    std::vector<double> g1(n);
    CompensatedSum total;
    for (std::size_t ia = 0; ia < n; ++ia) {
        CompensatedSum rs;
        for (std::size_t ib = 0; ib < n; ++ib) rs += g2[ia * n + ib];
        g1[ia] = rs.value() / nn;
        total += rs.value();
    }
    const double grand = total.value() / (nn * nn);

    std::vector<double> out(n * n);
    for (std::size_t ia = 0; ia < n; ++ia) {
        for (std::size_t ib = 0; ib < n; ++ib) {
            out[ia * n + ib] = (g2[ia * n + ib] - (g1[ia] + g1[ib])) + grand;
        }
    }
    return H2Matrix(n, std::move(out));
}

std::vector<double> double_centered(const DistMatrix& a) {
    const std::size_t n = a.size();
    const auto r = a.row_means();
    std::vector<double> out(n * n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l)
            out[k * n + l] = (a(k, l) + a.grand_mean()) - (r[k] + r[l]);
    return out;
}

H2Matrix h2_product_law(const DistMatrix& a, const DistMatrix& b) {
    if (a.size() != b.size()) throw std::invalid_argument("h2_product_law: sizes differ");
    if (a.size() < 2) throw std::invalid_argument("h2_product_law requires n >= 2");
    auto ca = double_centered(a);
    const auto cb = double_centered(b);
    for (std::size_t i = 0; i < ca.size(); ++i) ca[i] = ca[i] * cb[i] / 6.0;
    return H2Matrix(a.size(), std::move(ca));
}

}  // namespace fdcov
