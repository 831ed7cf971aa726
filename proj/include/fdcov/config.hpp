#pragma once

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fdcov {

/// Flat `key = value` text with optional `[section]` headers. Keys before
/// the first header live in the "" section. `#` and `;` start comments.
class Config {
public:
    static Config parse(std::istream& is);
    static Config load(const std::string& path);

    bool has_section(const std::string& section) const;
    std::optional<std::string> get(const std::string& section, const std::string& key) const;

    /// Value from `section`, falling back to the global section.
    std::optional<std::string> lookup(const std::string& section, const std::string& key) const;

    const std::map<std::string, std::string>& section(const std::string& name) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

std::vector<double> parse_double_list(const std::string& text);
std::vector<std::size_t> parse_size_list(const std::string& text);

}  // namespace fdcov
