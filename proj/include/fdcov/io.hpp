#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "fdcov/grid.hpp"

namespace fdcov {

/// Trajectory CSV: a header row "id,t_1,...,t_p" holding the right endpoints
/// of the partition (t_0 = 0 is implied), then one row per path with its id
/// followed by p values. Values are written with 17 significant digits.
struct PathTable {
    PartitionPtr partition;
    std::vector<std::string> ids;
    std::vector<Trajectory> paths;
};

void write_paths(std::ostream& os, const PathTable& table);

/// Throws std::runtime_error naming the offending line on malformed input.
PathTable read_paths(std::istream& is);

/// Paired sample in one file: rows with ids "x<k>" form X, rows "y<k>" form
/// Y, matched by order of appearance.
void write_paired_sample(std::ostream& os, const PairedSample& sample);
PairedSample read_paired_sample(std::istream& is);

/// X from one table, Y from another, paired by row order.
PairedSample pair_tables(const PathTable& x, const PathTable& y);

PathTable read_paths_file(const std::string& path);
PairedSample read_paired_sample_file(const std::string& path);

}  // namespace fdcov
