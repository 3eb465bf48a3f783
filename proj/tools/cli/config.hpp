#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qkdwdm::cli {

// Line-oriented sectioned key-value document:
//   - '#' or ';' starts a comment (full line or trailing)
//   - [section] headers; keys before any header belong to the "" section
//   - key = value, one per line; values keep interior whitespace
// Sections and keys are validated against the schema of the consuming
// command; unknown ones are rejected.
class ConfigDocument {
  public:
    static ConfigDocument parse_file(const std::string& path);
    static ConfigDocument parse_string(const std::string& text, const std::string& origin);

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key) const;
    std::uint64_t get_u64_or(const std::string& section, const std::string& key,
                             std::uint64_t fallback) const;
    bool get_bool_or(const std::string& section, const std::string& key, bool fallback) const;

    std::vector<std::string> section_names() const;
    const std::vector<std::pair<std::string, std::string>>& section(
        const std::string& name) const;

    // every (section, key) must match an allowed entry; entries ending in
    // ".*" allow a section-name prefix, a "*" key allows any key
    void enforce_schema(const std::vector<std::pair<std::string, std::string>>& allowed) const;

    const std::string& origin() const { return origin_; }

  private:
    std::string origin_;
    std::vector<std::string> order_;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections_;
};

} // namespace qkdwdm::cli
