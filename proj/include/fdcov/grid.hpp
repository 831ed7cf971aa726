#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fdcov {

/// Partition 0 = t_0 < t_1 < ... < t_p = 1 of the unit interval.
///
/// Interval i (1-based, i = 1..p) is (t_{i-1}, t_i] with weight
/// |Delta_i| = t_i - t_{i-1}. Weights and their square roots are cached at
/// construction so the step-function geometry never recomputes them.
class Partition {
public:
    /// Throws std::invalid_argument unless points start at 0, end at 1 and
    /// increase strictly.
    explicit Partition(std::vector<double> points);

    /// Number of intervals p.
    std::size_t size() const noexcept { return weights_.size(); }

    std::span<const double> points() const noexcept { return points_; }
    std::span<const double> weights() const noexcept { return weights_; }
    std::span<const double> sqrt_weights() const noexcept { return sqrt_weights_; }

    /// Right endpoints t_1..t_p, the points at which trajectories are stored.
    std::span<const double> grid() const noexcept {
        return std::span<const double>(points_).subspan(1);
    }

    double mesh() const noexcept { return mesh_; }
    bool is_uniform() const noexcept { return uniform_; }

    bool operator==(const Partition& other) const noexcept { return points_ == other.points_; }

private:
    std::vector<double> points_;
    std::vector<double> weights_;
    std::vector<double> sqrt_weights_;
    double mesh_ = 0.0;
    bool uniform_ = false;
};

using PartitionPtr = std::shared_ptr<const Partition>;

/// Equidistant partition {i/p : i = 0..p}. Throws on p == 0.
PartitionPtr uniform_partition(std::size_t p);

/// Process-wide shared uniform partition, built on first use.
PartitionPtr cached_uniform_partition(std::size_t p);

/// Values Z(t_1), ..., Z(t_p) of one path. Z(t_0) is never stored.
class Trajectory {
public:
    /// Throws std::invalid_argument on a null partition, a length mismatch or
    /// a non-finite value.
    Trajectory(PartitionPtr partition, std::vector<double> values);

    const Partition& partition() const noexcept { return *partition_; }
    const PartitionPtr& partition_ptr() const noexcept { return partition_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Same partition object or equal grid points.
    bool shares_partition(const Trajectory& other) const noexcept;

private:
    PartitionPtr partition_;
    std::vector<double> values_;
};

/// Coordinates |Delta_i|^{1/2} Z(t_i); its Euclidean norm is the L2 norm of
/// the right-endpoint step function.
struct WeightedVector {
    std::vector<double> coords;

    double norm() const noexcept;
};

WeightedVector embed(const Trajectory& traj);

/// L2 distance of the two step functions, sqrt(sum_i (a_i - b_i)^2 |Delta_i|).
double step_l2_distance(const Trajectory& a, const Trajectory& b);

/// n index-aligned pairs (X_i, Y_i) on one partition.
class PairedSample {
public:
    PairedSample(std::vector<Trajectory> x_paths, std::vector<Trajectory> y_paths);

    std::size_t size() const noexcept { return x_.size(); }
    const Partition& partition() const noexcept { return x_.front().partition(); }
    const PartitionPtr& partition_ptr() const noexcept { return x_.front().partition_ptr(); }
    std::span<const Trajectory> x() const noexcept { return x_; }
    std::span<const Trajectory> y() const noexcept { return y_; }

    /// Copy with every value multiplied by c.
    PairedSample scaled(double c) const;

private:
    std::vector<Trajectory> x_;
    std::vector<Trajectory> y_;
};

/// Throws std::invalid_argument unless all paths share one partition.
void require_common_partition(std::span<const Trajectory> paths);

}  // namespace fdcov
