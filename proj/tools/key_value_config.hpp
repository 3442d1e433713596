#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace attnpca::cli {

/// `key = value` lines; '#' starts a comment line. Keys are unique.
class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse_file(const std::filesystem::path& path);
    static KeyValueConfig parse_string(const std::string& text, const std::filesystem::path& base_dir = {});

    bool has(const std::string& key) const { return values_.contains(key); }
    std::optional<std::string> get(const std::string& key) const;
    const std::filesystem::path& base_dir() const { return base_dir_; }

    /// Relative paths resolve against the directory holding the config file.
    std::filesystem::path resolve(const std::filesystem::path& p) const;

    /// Throws UsageError naming the first key not in `allowed`.
    void check_keys(const std::set<std::string>& allowed) const;

private:
    std::map<std::string, std::string> values_;
    std::filesystem::path base_dir_;
};

std::vector<std::string> split_list(const std::string& text);

/// Either a comma list ("20,40,60") or an inclusive range "start:stop:step".
std::vector<long> parse_int_list(const std::string& text);

long parse_int(const std::string& text, const std::string& what);
std::uint64_t parse_u64(const std::string& text, const std::string& what);
double parse_double(const std::string& text, const std::string& what);

} // namespace attnpca::cli
