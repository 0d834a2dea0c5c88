#include "vqcfd/kvfile.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace vqcfd::util {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

KvFile KvFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open config file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

KvFile KvFile::parse_string(const std::string& text, const std::string& origin) {
    KvFile kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected `key = value`, got: " + line);
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
        }
        if (kv.entries_.count(key)) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": duplicate key: " + key);
        }
        kv.entries_[key] = value;
    }
    return kv;
}

bool KvFile::has(const std::string& key) const { return entries_.count(key) != 0; }

std::string KvFile::get_string(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) {
        throw std::runtime_error(origin_ + ": missing required key: " + key);
    }
    consumed_.insert(key);
    return it->second;
}

std::string KvFile::get_string(const std::string& key, const std::string& fallback) const {
    consumed_.insert(key);
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double KvFile::get_double(const std::string& key) const {
    std::string v = get_string(key);
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error(origin_ + ": key " + key + ": not a number: " + v);
    }
    if (pos != v.size()) {
        throw std::runtime_error(origin_ + ": key " + key + ": trailing junk in: " + v);
    }
    return x;
}

double KvFile::get_double(const std::string& key, double fallback) const {
    consumed_.insert(key);
    return has(key) ? get_double(key) : fallback;
}

long KvFile::get_long(const std::string& key) const {
    std::string v = get_string(key);
    std::size_t pos = 0;
    long x;
    try {
        x = std::stol(v, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error(origin_ + ": key " + key + ": not an integer: " + v);
    }
    if (pos != v.size()) {
        throw std::runtime_error(origin_ + ": key " + key + ": trailing junk in: " + v);
    }
    return x;
}

long KvFile::get_long(const std::string& key, long fallback) const {
    consumed_.insert(key);
    return has(key) ? get_long(key) : fallback;
}

void KvFile::reject_unknown_keys() const {
    std::string unknown;
    for (const auto& [k, v] : entries_) {
        if (!consumed_.count(k)) {
            if (!unknown.empty()) unknown += ", ";
            unknown += k;
        }
    }
    if (!unknown.empty()) {
        throw std::runtime_error(origin_ + ": unknown key(s): " + unknown);
    }
}

}  // namespace vqcfd::util
