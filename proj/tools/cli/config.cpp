#include "cli/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qkdwdm/errors.hpp"

namespace qkdwdm::cli {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string strip_comment(const std::string& line) {
    const auto pos = line.find_first_of("#;");
    return pos == std::string::npos ? line : line.substr(0, pos);
}

} // namespace

ConfigDocument ConfigDocument::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

ConfigDocument ConfigDocument::parse_string(const std::string& text, const std::string& origin) {
    ConfigDocument doc;
    doc.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    std::string current;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
            current = trim(body.substr(1, body.size() - 2));
            if (current.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
            if (!doc.sections_.count(current)) doc.order_.push_back(current);
            doc.sections_[current];
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (!doc.sections_.count(current)) doc.order_.push_back(current);
        for (const auto& [k, v] : doc.sections_[current]) {
            (void)v;
            if (k == key)
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                                  key + "' in [" + current + "]");
        }
        doc.sections_[current].emplace_back(key, value);
    }
    return doc;
}

bool ConfigDocument::has_section(const std::string& section) const {
    return sections_.count(section) != 0;
}

bool ConfigDocument::has(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    if (it == sections_.end()) return false;
    for (const auto& [k, v] : it->second) {
        (void)v;
        if (k == key) return true;
    }
    return false;
}

std::string ConfigDocument::get_string(const std::string& section, const std::string& key) const {
    const auto it = sections_.find(section);
    if (it != sections_.end()) {
        for (const auto& [k, v] : it->second) {
            if (k == key) return v;
        }
    }
    throw ConfigError(origin_ + ": missing required key '" + key + "' in [" + section + "]");
}

std::string ConfigDocument::get_string_or(const std::string& section, const std::string& key,
                                          const std::string& fallback) const {
    return has(section, key) ? get_string(section, key) : fallback;
}

double ConfigDocument::get_double(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(origin_ + ": key '" + key + "' in [" + section +
                          "] is not a number: '" + v + "'");
    }
}

double ConfigDocument::get_double_or(const std::string& section, const std::string& key,
                                     double fallback) const {
    return has(section, key) ? get_double(section, key) : fallback;
}

std::uint64_t ConfigDocument::get_u64(const std::string& section, const std::string& key) const {
    const std::string v = get_string(section, key);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        // allow scientific notation for counts like 1e8
        try {
            std::size_t used = 0;
            const double d = std::stod(v, &used);
            if (used != v.size() || d < 0 || d != std::floor(d)) throw std::invalid_argument(v);
            return static_cast<std::uint64_t>(d);
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ": key '" + key + "' in [" + section +
                              "] is not a nonnegative integer: '" + v + "'");
        }
    }
    return out;
}

std::uint64_t ConfigDocument::get_u64_or(const std::string& section, const std::string& key,
                                         std::uint64_t fallback) const {
    return has(section, key) ? get_u64(section, key) : fallback;
}

bool ConfigDocument::get_bool_or(const std::string& section, const std::string& key,
                                 bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_string(section, key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(origin_ + ": key '" + key + "' in [" + section + "] is not a boolean");
}

std::vector<std::string> ConfigDocument::section_names() const { return order_; }

const std::vector<std::pair<std::string, std::string>>& ConfigDocument::section(
    const std::string& name) const {
    const auto it = sections_.find(name);
    if (it == sections_.end())
        throw ConfigError(origin_ + ": missing required section [" + name + "]");
    return it->second;
}

void ConfigDocument::enforce_schema(
    const std::vector<std::pair<std::string, std::string>>& allowed) const {
    for (const auto& [section, entries] : sections_) {
        for (const auto& [key, value] : entries) {
            (void)value;
            bool ok = false;
            for (const auto& [asec, akey] : allowed) {
                bool section_match;
                if (asec.size() >= 2 && asec.substr(asec.size() - 2) == ".*") {
                    section_match = section.rfind(asec.substr(0, asec.size() - 1), 0) == 0;
                } else {
                    section_match = section == asec;
                }
                if (section_match && (akey == "*" || akey == key)) {
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                throw ConfigError(origin_ + ": unknown key '" + key + "' in section [" + section +
                                  "]");
            }
        }
    }
}

} // namespace qkdwdm::cli
