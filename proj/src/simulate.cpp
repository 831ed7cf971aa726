#include "fdcov/simulate.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>

namespace fdcov {

namespace {

std::vector<double> standard_normals(Stream& rng, std::size_t count) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> z(count);
    for (double& v : z) v = normal(rng);
    return z;
}

}  // namespace

void FbmPairSpec::validate() const {
    if (!(hurst > 0.0 && hurst < 1.0)) {
        throw std::invalid_argument("Hurst index must lie in (0, 1)");
    }
    if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("rho must lie in [-1, 1]");
    if (p == 0) throw std::invalid_argument("grid size p must be positive");
}

Eigen::MatrixXd fbm_covariance(const Partition& partition, double hurst) {
    const auto t = partition.grid();
    const auto p = static_cast<Eigen::Index>(t.size());
    const double two_h = 2.0 * hurst;
    Eigen::MatrixXd c(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double s = t[static_cast<std::size_t>(i)];
            const double u = t[static_cast<std::size_t>(j)];
            const double v =
                0.5 * (std::pow(s, two_h) + std::pow(u, two_h) - std::pow(std::abs(s - u), two_h));
            c(i, j) = v;
            c(j, i) = v;
        }
    }
    return c;
}

FbmPairSampler::FbmPairSampler(const FbmPairSpec& spec, PartitionPtr partition)
    : spec_(spec), partition_(std::move(partition)) {
    spec_.validate();
    if (!partition_ || partition_->size() != spec_.p) {
        throw std::invalid_argument("fBM sampler: partition does not have p intervals");
    }
    Eigen::MatrixXd cov = fbm_covariance(*partition_, spec_.hurst);
    const double base = 1e-12 * cov.trace() / static_cast<double>(cov.rows());
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    double jitter = base;
    for (int attempt = 0; llt.info() != Eigen::Success; ++attempt) {
        if (attempt == 3) {
            std::ostringstream msg;
            msg << "fBM covariance (H=" << spec_.hurst << ", p=" << spec_.p
                << ") not positive definite after diagonal jitter " << jitter_;
            throw std::runtime_error(msg.str());
        }
        Eigen::MatrixXd shifted = cov;
        shifted.diagonal().array() += jitter;
        llt.compute(shifted);
        jitter_ = jitter;
        jitter *= 100.0;
    }
    chol_ = llt.matrixL();
}

FbmPairSampler::FbmPairSampler(const FbmPairSpec& spec)
    : FbmPairSampler(spec, cached_uniform_partition(spec.p)) {}

std::pair<Trajectory, Trajectory> FbmPairSampler::draw(Stream& rng) const {
    const auto p = static_cast<Eigen::Index>(spec_.p);
    Eigen::VectorXd z1(p);
    Eigen::VectorXd z2(p);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < p; ++i) z1(i) = normal(rng);
    for (Eigen::Index i = 0; i < p; ++i) z2(i) = normal(rng);
    const double rho = spec_.rho;
    const Eigen::VectorXd w = rho * z1 + std::sqrt(std::max(0.0, 1.0 - rho * rho)) * z2;
    const auto lower = chol_.triangularView<Eigen::Lower>();
    const Eigen::VectorXd x = lower * z1;
    const Eigen::VectorXd y = lower * w;
    return {Trajectory(partition_, std::vector<double>(x.data(), x.data() + p)),
            Trajectory(partition_, std::vector<double>(y.data(), y.data() + p))};
}

Trajectory FbmPairSampler::draw_one(Stream& rng) const {
    const auto p = static_cast<Eigen::Index>(spec_.p);
    Eigen::VectorXd z(p);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (Eigen::Index i = 0; i < p; ++i) z(i) = normal(rng);
    const Eigen::VectorXd x = chol_.triangularView<Eigen::Lower>() * z;
    return Trajectory(partition_, std::vector<double>(x.data(), x.data() + p));
}

std::shared_ptr<const FbmPairSampler> cached_fbm_sampler(const FbmPairSpec& spec) {
    spec.validate();
    static std::shared_mutex mutex;
    static std::map<std::tuple<double, double, std::size_t>,
                    std::shared_ptr<const FbmPairSampler>> cache;
    const auto key = std::make_tuple(spec.hurst, spec.rho, spec.p);
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto sampler = std::make_shared<const FbmPairSampler>(spec);
    std::unique_lock lock(mutex);
    auto [it, inserted] = cache.emplace(key, std::move(sampler));
    return it->second;
}

std::pair<Trajectory, Trajectory> fbm_pair(const FbmPairSpec& spec, Stream& rng) {
    return cached_fbm_sampler(spec)->draw(rng);
}

Trajectory brownian_path(const PartitionPtr& partition, Stream& rng) {
    const auto sw = partition->sqrt_weights();
    auto z = standard_normals(rng, sw.size());
    double level = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        level += sw[i] * z[i];
        z[i] = level;
    }
    return Trajectory(partition, std::move(z));
}

Trajectory gbm_path(double mu, double sigma, const PartitionPtr& partition, Stream& rng) {
    if (!(sigma > 0.0)) throw std::invalid_argument("GBM volatility must be positive");
    const auto b = brownian_path(partition, rng);
    const auto t = partition->grid();
    std::vector<double> v(b.size());
    const double drift = mu - 0.5 * sigma * sigma;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::exp(drift * t[i] + sigma * b.values()[i]);
    return Trajectory(partition, std::move(v));
}

Trajectory gbm_path(double mu, double sigma, std::size_t p, Stream& rng) {
    return gbm_path(mu, sigma, cached_uniform_partition(p), rng);
}

void StableSpec::validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw std::invalid_argument("alpha must lie in (0, 2]");
    if (!(std::abs(skew) <= 1.0)) throw std::invalid_argument("skewness must lie in [-1, 1]");
    if (!(sigma > 0.0)) throw std::invalid_argument("stable scale must be positive");
    if (!std::isfinite(mu)) throw std::invalid_argument("stable shift must be finite");
}

double stable_variate(const StableSpec& spec, Stream& rng) {
    using std::numbers::pi;
    std::uniform_real_distribution<double> angle(-0.5 * pi, 0.5 * pi);
    std::exponential_distribution<double> expo(1.0);
    const double v = angle(rng);
    double w = expo(rng);
    while (w == 0.0) w = expo(rng);

    const double a = spec.alpha;
    const double b = spec.skew;
    if (a == 1.0) {
        const double half_pi = 0.5 * pi;
        const double shifted = half_pi + b * v;
        const double x =
            (2.0 / pi) * (shifted * std::tan(v) - b * std::log(half_pi * w * std::cos(v) / shifted));
        return spec.sigma * x + (2.0 / pi) * b * spec.sigma * std::log(spec.sigma) + spec.mu;
    }
    const double t = b * std::tan(0.5 * pi * a);
    const double shift = std::atan(t) / a;
    const double scale = std::pow(1.0 + t * t, 1.0 / (2.0 * a));
    const double x = scale * std::sin(a * (v + shift)) / std::pow(std::cos(v), 1.0 / a) *
                     std::pow(std::cos(v - a * (v + shift)) / w, (1.0 - a) / a);
    return spec.sigma * x + spec.mu;
}

Trajectory stable_levy_path(const StableSpec& spec, const PartitionPtr& partition, Stream& rng) {
    spec.validate();
    const auto w = partition->weights();
    std::vector<double> v(w.size());
    double level = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        StableSpec step = spec;
        step.sigma = spec.sigma * std::pow(w[i], 1.0 / spec.alpha);
        step.mu = spec.mu * w[i];
        level += stable_variate(step, rng);
        v[i] = level;
    }
    return Trajectory(partition, std::move(v));
}

Trajectory stable_levy_path(const StableSpec& spec, std::size_t p, Stream& rng) {
    return stable_levy_path(spec, cached_uniform_partition(p), rng);
}

std::string_view to_string(ShockModel m) noexcept {
    return m == ShockModel::joint_shock ? "joint_shock" : "separate_shocks";
}

void ParetoShockSpec::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("Pareto tail index must be positive");
    if (!(std::abs(rho) <= 1.0)) throw std::invalid_argument("rho must lie in [-1, 1]");
}

double pareto_from_uniform(double u, double alpha) {
    return std::pow(1.0 - u, -1.0 / alpha) - 1.0;
}

double pareto_variate(double alpha, Stream& rng) {
    return pareto_from_uniform(std::uniform_real_distribution<double>(0.0, 1.0)(rng), alpha);
}

std::pair<Trajectory, Trajectory> pareto_shock_pair(const ParetoShockSpec& spec,
                                                    const PartitionPtr& partition, Stream& rng) {
    spec.validate();
    auto scaled = [&](const Trajectory& t, double c) {
        std::vector<double> v(t.values().begin(), t.values().end());
        for (double& e : v) e *= c;
        return Trajectory(partition, std::move(v));
    };
    if (spec.model == ShockModel::joint_shock) {
        const double shock = std::sqrt(pareto_variate(spec.alpha, rng));
        const auto b1 = brownian_path(partition, rng);
        const auto b2 = brownian_path(partition, rng);
        return {scaled(b1, shock), scaled(b2, shock)};
    }
    const double s1 = std::sqrt(pareto_variate(spec.alpha, rng));
    const double s2 = std::sqrt(pareto_variate(spec.alpha, rng));
    const auto b1 = brownian_path(partition, rng);
    const auto w = brownian_path(partition, rng);
    const double c = std::sqrt(std::max(0.0, 1.0 - spec.rho * spec.rho));
    std::vector<double> b2(b1.size());
    for (std::size_t i = 0; i < b2.size(); ++i) {
        b2[i] = spec.rho * b1.values()[i] + c * w.values()[i];
    }
    return {scaled(b1, s1), scaled(Trajectory(partition, std::move(b2)), s2)};
}

std::pair<Trajectory, Trajectory> pareto_shock_pair(const ParetoShockSpec& spec, std::size_t p,
                                                    Stream& rng) {
    return pareto_shock_pair(spec, cached_uniform_partition(p), rng);
}

}  // namespace fdcov
