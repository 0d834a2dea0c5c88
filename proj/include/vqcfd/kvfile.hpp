#pragma once

#include <map>
#include <set>
#include <string>

namespace vqcfd::util {

/// Line-oriented `key = value` configuration file. '#' starts a comment,
/// blank lines are ignored. Keys consumed through a getter are tracked so
/// that reject_unknown_keys() can flag misspelled or unsupported entries
/// instead of silently ignoring them.
class KvFile {
public:
    static KvFile parse_file(const std::string& path);
    static KvFile parse_string(const std::string& text,
                               const std::string& origin = "<string>");

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    long get_long(const std::string& key) const;
    long get_long(const std::string& key, long fallback) const;

    /// Throws std::runtime_error naming every key no getter asked for.
    void reject_unknown_keys() const;

    const std::map<std::string, std::string>& entries() const { return entries_; }
    const std::string& origin() const { return origin_; }

private:
    std::string origin_;
    std::map<std::string, std::string> entries_;
    mutable std::set<std::string> consumed_;
};

}  // namespace vqcfd::util
