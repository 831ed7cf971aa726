#include "fdcov/grid.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <stdexcept>
#include <string>

namespace fdcov {

Partition::Partition(std::vector<double> points) : points_(std::move(points)) {
    if (points_.size() < 2) {
        throw std::invalid_argument("partition needs at least two points");
    }
    if (points_.front() != 0.0 || points_.back() != 1.0) {
        throw std::invalid_argument("partition must start at 0 and end at 1");
    }
    const std::size_t p = points_.size() - 1;
    weights_.resize(p);
    sqrt_weights_.resize(p);
    for (std::size_t i = 0; i < p; ++i) {
        const double w = points_[i + 1] - points_[i];
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("partition points must increase strictly (at index " +
                                        std::to_string(i + 1) + ")");
        }
        weights_[i] = w;
        sqrt_weights_[i] = std::sqrt(w);
        mesh_ = std::max(mesh_, w);
    }
    const double h = 1.0 / static_cast<double>(p);
    uniform_ = std::all_of(weights_.begin(), weights_.end(),
                           [h](double w) { return std::abs(w - h) <= 1e-12; });
}

PartitionPtr uniform_partition(std::size_t p) {
    if (p == 0) {
        throw std::invalid_argument("uniform_partition: p must be positive");
    }
    std::vector<double> pts(p + 1);
    for (std::size_t i = 0; i <= p; ++i) {
        pts[i] = static_cast<double>(i) / static_cast<double>(p);
    }
    return std::make_shared<const Partition>(std::move(pts));
}

PartitionPtr cached_uniform_partition(std::size_t p) {
    static std::shared_mutex mutex;
    static std::map<std::size_t, PartitionPtr> cache;
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(p); it != cache.end()) return it->second;
    }
    auto fresh = uniform_partition(p);
    std::unique_lock lock(mutex);
    return cache.emplace(p, std::move(fresh)).first->second;
}

Trajectory::Trajectory(PartitionPtr partition, std::vector<double> values)
    : partition_(std::move(partition)), values_(std::move(values)) {
    if (!partition_) {
        throw std::invalid_argument("trajectory without partition");
    }
    if (values_.size() != partition_->size()) {
        throw std::invalid_argument("trajectory has " + std::to_string(values_.size()) +
                                    " values for a partition with " +
                                    std::to_string(partition_->size()) + " intervals");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw std::invalid_argument("non-finite trajectory value at index " +
                                        std::to_string(i));
        }
    }
}

bool Trajectory::shares_partition(const Trajectory& other) const noexcept {
    return partition_ == other.partition_ || *partition_ == *other.partition_;
}

double WeightedVector::norm() const noexcept {
    double s = 0.0;
    for (double c : coords) s += c * c;
    return std::sqrt(s);
}

WeightedVector embed(const Trajectory& traj) {
    const auto sw = traj.partition().sqrt_weights();
    const auto v = traj.values();
    WeightedVector out;
    out.coords.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out.coords[i] = sw[i] * v[i];
    return out;
}

double step_l2_distance(const Trajectory& a, const Trajectory& b) {
    if (!a.shares_partition(b)) {
        throw std::invalid_argument("step_l2_distance: trajectories on different partitions");
    }
    const auto w = a.partition().weights();
    const auto va = a.values();
    const auto vb = b.values();
    double s = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        const double d = va[i] - vb[i];
        s += d * d * w[i];
    }
    return std::sqrt(s);
}

void require_common_partition(std::span<const Trajectory> paths) {
    for (std::size_t i = 1; i < paths.size(); ++i) {
        if (!paths[i].shares_partition(paths[0])) {
            throw std::invalid_argument("path " + std::to_string(i) +
                                        " is on a different partition");
        }
    }
}

PairedSample::PairedSample(std::vector<Trajectory> x_paths, std::vector<Trajectory> y_paths)
    : x_(std::move(x_paths)), y_(std::move(y_paths)) {
    if (x_.empty()) {
        throw std::invalid_argument("paired sample must contain at least one pair");
    }
    if (x_.size() != y_.size()) {
        throw std::invalid_argument("paired sample: " + std::to_string(x_.size()) +
                                    " X paths but " + std::to_string(y_.size()) + " Y paths");
    }
    require_common_partition(x_);
    require_common_partition(y_);
    if (!x_.front().shares_partition(y_.front())) {
        throw std::invalid_argument("paired sample: X and Y use different partitions");
    }
}

PairedSample PairedSample::scaled(double c) const {
    auto scale = [c](std::span<const Trajectory> src) {
        std::vector<Trajectory> out;
        out.reserve(src.size());
        for (const auto& t : src) {
            std::vector<double> v(t.values().begin(), t.values().end());
            for (double& e : v) e *= c;
            out.emplace_back(t.partition_ptr(), std::move(v));
        }
        return out;
    };
    return PairedSample(scale(x_), scale(y_));
}

}  // namespace fdcov
