#include "fdcov/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string_view>

namespace fdcov {

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view cell, std::size_t line_no) {
    cell = trim(cell);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": cannot parse number '" +
                                 std::string(cell) + "'");
    }
    return v;
}

void write_row(std::ostream& os, const std::string& id, std::span<const double> values) {
    os << id;
    for (double v : values) os << ',' << v;
    os << '\n';
}

void write_header(std::ostream& os, const Partition& partition) {
    os << "id";
    for (double t : partition.grid()) os << ',' << t;
    os << '\n';
}

}  // namespace

void write_paths(std::ostream& os, const PathTable& table) {
    if (table.ids.size() != table.paths.size()) {
        throw std::invalid_argument("write_paths: ids and paths differ in length");
    }
    const auto old = os.precision(17);
    write_header(os, *table.partition);
    for (std::size_t i = 0; i < table.paths.size(); ++i) {
        write_row(os, table.ids[i], table.paths[i].values());
    }
    os.precision(old);
}

PathTable read_paths(std::istream& is) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!trim(line).empty()) break;
    }
    if (trim(line).empty()) throw std::runtime_error("empty trajectory file");

    const auto header = split(line);
    if (header.size() < 2) throw std::runtime_error("line 1: header needs at least one grid point");
    std::vector<double> points{0.0};
    for (std::size_t c = 1; c < header.size(); ++c) points.push_back(parse_double(header[c], line_no));

    PathTable table;
    try {
        table.partition = std::make_shared<const Partition>(std::move(points));
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
    const std::size_t p = table.partition->size();

    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split(line);
        if (cells.size() != p + 1) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(p + 1) + " columns, found " +
                                     std::to_string(cells.size()));
        }
        std::vector<double> values(p);
        for (std::size_t c = 0; c < p; ++c) values[c] = parse_double(cells[c + 1], line_no);
        table.ids.emplace_back(trim(cells[0]));
        try {
            table.paths.emplace_back(table.partition, std::move(values));
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return table;
}

void write_paired_sample(std::ostream& os, const PairedSample& sample) {
    const auto old = os.precision(17);
    write_header(os, sample.partition());
    for (std::size_t i = 0; i < sample.size(); ++i) write_row(os, "x" + std::to_string(i), sample.x()[i].values());
    for (std::size_t i = 0; i < sample.size(); ++i) write_row(os, "y" + std::to_string(i), sample.y()[i].values());
    os.precision(old);
}

PairedSample read_paired_sample(std::istream& is) {
    auto table = read_paths(is);
    std::vector<Trajectory> x;
    std::vector<Trajectory> y;
    for (std::size_t i = 0; i < table.paths.size(); ++i) {
        const auto& id = table.ids[i];
        const char tag = id.empty() ? '\0' : id.front();
        if (tag == 'x' || tag == 'X') {
            x.push_back(std::move(table.paths[i]));
        } else if (tag == 'y' || tag == 'Y') {
            y.push_back(std::move(table.paths[i]));
        } else {
            throw std::runtime_error("path id '" + id + "' must start with x or y");
        }
    }
    if (x.empty()) throw std::runtime_error("paired sample file contains no paths");
    if (x.size() != y.size()) {
        throw std::runtime_error("paired sample file has " + std::to_string(x.size()) +
                                 " x rows and " + std::to_string(y.size()) + " y rows");
    }
    return PairedSample(std::move(x), std::move(y));
}

PairedSample pair_tables(const PathTable& x, const PathTable& y) {
    if (x.paths.size() != y.paths.size()) {
        throw std::runtime_error("X file has " + std::to_string(x.paths.size()) +
                                 " paths, Y file has " + std::to_string(y.paths.size()));
    }
    if (x.paths.empty()) throw std::runtime_error("no paths to pair");
    return PairedSample(x.paths, y.paths);
}

namespace {

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    return in;
}

}  // namespace

PathTable read_paths_file(const std::string& path) {
    auto in = open_input(path);
    return read_paths(in);
}

PairedSample read_paired_sample_file(const std::string& path) {
    auto in = open_input(path);
    return read_paired_sample(in);
}

}  // namespace fdcov
