#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace adacnp::io {

// Round-trip decimal formatting (17 significant digits).
std::string format_double(double v);

std::vector<std::string> split(const std::string& s, char delim);

// Ordered key-value text document: one "key = value" per line, '#' comments
// ignored. Duplicate keys keep the last value.
class KvDoc {
public:
    void set(const std::string& key, const std::string& value);
    void set_double(const std::string& key, double value);
    void set_int(const std::string& key, long long value);

    bool has(const std::string& key) const;
    std::optional<std::string> find(const std::string& key) const;
    // Throws DataError when the key is absent.
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

    std::string to_text() const;
    static KvDoc parse(const std::string& text);
    static KvDoc load(const std::string& path);
    // header_lines are emitted first, each prefixed with "# ".
    void save(const std::string& path, const std::vector<std::string>& header_lines = {}) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

std::string trim(const std::string& s);

} // namespace adacnp::io
