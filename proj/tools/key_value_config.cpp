#include "key_value_config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "attnpca/error.hpp"

namespace attnpca::cli {

namespace {

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

} // namespace

KeyValueConfig KeyValueConfig::parse_string(const std::string& text, const std::filesystem::path& base_dir) {
    KeyValueConfig cfg;
    cfg.base_dir_ = base_dir;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
        if (!cfg.values_.emplace(key, value).second)
            throw UsageError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    return cfg;
}

KeyValueConfig KeyValueConfig::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_string(ss.str(), path.parent_path());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    return it->second;
}

std::filesystem::path KeyValueConfig::resolve(const std::filesystem::path& p) const {
    if (p.is_absolute() || base_dir_.empty()) return p;
    return base_dir_ / p;
}

void KeyValueConfig::check_keys(const std::set<std::string>& allowed) const {
    for (const auto& [key, value] : values_)
        if (!allowed.contains(key)) throw UsageError("unknown config key '" + key + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

long parse_int(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const long v = std::stol(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("invalid integer for " + what + ": '" + text + "'");
}

std::uint64_t parse_u64(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        if (!text.empty() && text.front() != '-') {
            const auto v = std::stoull(text, &used);
            if (used == text.size()) return v;
        }
    } catch (const std::exception&) {
    }
    throw UsageError("invalid unsigned integer for " + what + ": '" + text + "'");
}

double parse_double(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw UsageError("invalid number for " + what + ": '" + text + "'");
}

std::vector<long> parse_int_list(const std::string& text) {
    if (text.find(':') != std::string::npos) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string part;
        while (std::getline(ss, part, ':')) parts.push_back(trim(part));
        if (parts.size() != 3) throw UsageError("range must be start:stop:step, got '" + text + "'");
        const long start = parse_int(parts[0], "range start");
        const long stop = parse_int(parts[1], "range stop");
        const long step = parse_int(parts[2], "range step");
        if (step <= 0 || stop < start) throw UsageError("empty or invalid range '" + text + "'");
        std::vector<long> out;
        for (long v = start; v <= stop; v += step) out.push_back(v);
        return out;
    }
    std::vector<long> out;
    for (const auto& item : split_list(text)) out.push_back(parse_int(item, "list entry"));
    if (out.empty()) throw UsageError("empty list '" + text + "'");
    return out;
}

} // namespace attnpca::cli
