#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fdcov/grid.hpp"
#include "fdcov/rng.hpp"

namespace fdcov {

/// Pair of fractional Brownian motions with Hurst index `hurst`, each with
/// covariance C_H(s, t) = (s^2H + t^2H - |t - s|^2H) / 2 and cross-covariance
/// rho * C_H(s, t).
struct FbmPairSpec {
    double hurst = 0.5;
    double rho = 0.0;
    std::size_t p = 100;

    void validate() const;
};

/// fBM covariance on the right endpoints t_1..t_p of a partition.
Eigen::MatrixXd fbm_covariance(const Partition& partition, double hurst);

/// Exact sampler for an FbmPairSpec.
///
/// The joint 2p x 2p covariance is [[1, rho], [rho, 1]] (x) C_H, so its
/// Cholesky factor is the Kronecker product of the 2 x 2 factor with the
/// Cholesky factor L of C_H; only L is stored. rho = +-1 yields exactly
/// (anti-)identical paths.
class FbmPairSampler {
public:
    /// Throws std::runtime_error when C_H is not positive definite even
    /// after the jitter escalations.
    FbmPairSampler(const FbmPairSpec& spec, PartitionPtr partition);
    explicit FbmPairSampler(const FbmPairSpec& spec);

    const FbmPairSpec& spec() const noexcept { return spec_; }
    const PartitionPtr& partition() const noexcept { return partition_; }
    const Eigen::MatrixXd& cholesky_factor() const noexcept { return chol_; }
    /// Diagonal jitter that was needed (0 if none).
    double jitter() const noexcept { return jitter_; }

    std::pair<Trajectory, Trajectory> draw(Stream& rng) const;
    /// Single fBM path (the X marginal).
    Trajectory draw_one(Stream& rng) const;

private:
    FbmPairSpec spec_;
    PartitionPtr partition_;
    Eigen::MatrixXd chol_;
    double jitter_ = 0.0;
};

/// Shared sampler for (H, p) on the uniform grid; built once per key.
std::shared_ptr<const FbmPairSampler> cached_fbm_sampler(const FbmPairSpec& spec);

std::pair<Trajectory, Trajectory> fbm_pair(const FbmPairSpec& spec, Stream& rng);

/// Standard Brownian motion at t_1..t_p from independent N(0, |Delta_i|)
/// increments.
Trajectory brownian_path(const PartitionPtr& partition, Stream& rng);

/// exp((mu - sigma^2 / 2) t + sigma B(t)).
Trajectory gbm_path(double mu, double sigma, const PartitionPtr& partition, Stream& rng);
Trajectory gbm_path(double mu, double sigma, std::size_t p, Stream& rng);

/// S_alpha(sigma, skew, mu) in the Samorodnitsky-Taqqu parametrization.
struct StableSpec {
    double alpha = 1.8;
    double skew = 0.3;
    double mu = 0.0;
    double sigma = 1.0;

    void validate() const;
};

/// One stable variate by the Chambers-Mallows-Stuck transform, with the
/// log-corrected branch at alpha = 1.
double stable_variate(const StableSpec& spec, Stream& rng);

/// Levy motion: partial sums of independent S_alpha(sigma |Delta|^{1/alpha},
/// skew, mu |Delta|) increments.
Trajectory stable_levy_path(const StableSpec& spec, const PartitionPtr& partition, Stream& rng);
Trajectory stable_levy_path(const StableSpec& spec, std::size_t p, Stream& rng);

enum class ShockModel { joint_shock, separate_shocks };

std::string_view to_string(ShockModel m) noexcept;

/// Heavy-tailed shocks built from a Pareto(alpha) variable with density
/// alpha (1 + x)^{-(alpha + 1)} on x > 0.
struct ParetoShockSpec {
    double alpha = 1.0;
    ShockModel model = ShockModel::joint_shock;
    double rho = 0.5;  // correlation of the two Brownian motions (separate_shocks)

    void validate() const;
};

/// Inverse CDF: (1 - u)^{-1/alpha} - 1.
double pareto_from_uniform(double u, double alpha);
double pareto_variate(double alpha, Stream& rng);

/// joint_shock: A^{1/2} (B1, B2) with independent B1, B2.
/// separate_shocks: (A1^{1/2} B1, A2^{1/2} B2) with corr(B1, B2) = rho.
std::pair<Trajectory, Trajectory> pareto_shock_pair(const ParetoShockSpec& spec,
                                                    const PartitionPtr& partition, Stream& rng);
std::pair<Trajectory, Trajectory> pareto_shock_pair(const ParetoShockSpec& spec, std::size_t p,
                                                    Stream& rng);

}  // namespace fdcov
