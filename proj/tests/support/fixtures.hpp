#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fdcov/grid.hpp"
#include "oracles.hpp"

namespace fixtures {

/// Random paths on a random (non-uniform) or uniform partition, with Y
/// partially driven by X so that the sample is not trivially independent.
struct RandomSample {
    fdcov::PartitionPtr partition;
    std::vector<std::vector<double>> x;
    std::vector<std::vector<double>> y;

    fdcov::PairedSample paired() const {
        std::vector<fdcov::Trajectory> xs, ys;
        for (const auto& v : x) xs.emplace_back(partition, v);
        for (const auto& v : y) ys.emplace_back(partition, v);
        return fdcov::PairedSample(std::move(xs), std::move(ys));
    }
    std::vector<double> weights() const {
        return {partition->weights().begin(), partition->weights().end()};
    }
};

inline fdcov::PartitionPtr random_partition(std::size_t p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.2, 1.0);
    std::vector<double> cuts(p);
    double total = 0.0;
    for (double& c : cuts) total += (c = u(rng));
    std::vector<double> pts{0.0};
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < p; ++i) pts.push_back((acc += cuts[i]) / total);
    pts.push_back(1.0);
    return std::make_shared<const fdcov::Partition>(std::move(pts));
}

inline RandomSample random_sample(std::size_t n, std::size_t p, std::uint64_t seed,
                                  double coupling = 0.5, bool uniform = false) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);
    RandomSample s;
    s.partition = uniform ? fdcov::uniform_partition(p) : random_partition(p, rng);
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<double> x(p), y(p);
        double lx = 0.0, ly = 0.0;
        for (std::size_t i = 0; i < p; ++i) {
            lx += z(rng);
            ly += z(rng);
            x[i] = lx;
            y[i] = coupling * lx * lx / (1.0 + i) + ly;
        }
        s.x.push_back(std::move(x));
        s.y.push_back(std::move(y));
    }
    return s;
}

}  // namespace fixtures
