#pragma once

// Run-configuration file parser.  Grammar (documented in the README):
//   - '#' starts a comment (whole line or trailing);
//   - '[name]' opens a named block;
//   - 'key = value' lines belong to the current block;
//   - keys before any block header live in the "" (global) block.
// Parse errors carry the offending line number.  Values are kept as
// strings; typed getters convert on demand and report the key on failure.

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "h2pt/errors.hpp"

namespace h2pt {

class ConfigBlock {
public:
    explicit ConfigBlock(std::string name) : name_(std::move(name)) {}

    const std::string& name() const { return name_; }
    bool has(const std::string& key) const { return kv_.count(key) > 0; }

    std::string get_string(const std::string& key) const {
        auto it = kv_.find(key);
        if (it == kv_.end()) {
            throw Error(ErrorKind::config, "config: missing key '" + key +
                                               "' in block [" + name_ + "]");
        }
        return it->second;
    }

    double get_double(const std::string& key) const {
        const std::string v = get_string(key);
        try {
            std::size_t pos = 0;
            const double x = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw Error(ErrorKind::config, "config: key '" + key +
                                               "' in block [" + name_ +
                                               "] is not a number: " + v);
        }
    }

    long long get_int(const std::string& key) const {
        const std::string v = get_string(key);
        try {
            std::size_t pos = 0;
            const long long x = std::stoll(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
            return x;
        } catch (const std::exception&) {
            throw Error(ErrorKind::config, "config: key '" + key +
                                               "' in block [" + name_ +
                                               "] is not an integer: " + v);
        }
    }

    double get_double_or(const std::string& key, double fallback) const {
        return has(key) ? get_double(key) : fallback;
    }
    long long get_int_or(const std::string& key, long long fallback) const {
        return has(key) ? get_int(key) : fallback;
    }
    std::string get_string_or(const std::string& key,
                              std::string fallback) const {
        return has(key) ? get_string(key) : std::move(fallback);
    }

    void set(std::string key, std::string value) {
        kv_[std::move(key)] = std::move(value);
    }

private:
    std::string name_;
    std::map<std::string, std::string> kv_;
};

class RunConfig {
public:
    bool has_block(const std::string& name) const {
        return blocks_.count(name) > 0;
    }

    const ConfigBlock& block(const std::string& name) const {
        auto it = blocks_.find(name);
        if (it == blocks_.end()) {
            throw Error(ErrorKind::config,
                        "config: missing block [" + name + "]");
        }
        return it->second;
    }

    ConfigBlock& block_or_create(const std::string& name) {
        auto it = blocks_.find(name);
        if (it == blocks_.end()) {
            it = blocks_.emplace(name, ConfigBlock(name)).first;
        }
        return it->second;
    }

    static RunConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) {
            throw Error(ErrorKind::config, "cannot open config file: " + path);
        }
        return parse_stream(in, path);
    }

    static RunConfig parse_stream(std::istream& in,
                                  const std::string& origin = "<stream>") {
        RunConfig cfg;
        std::string line;
        std::string current;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) {
                line.erase(hash);
            }
            const std::string t = trim_(line);
            if (t.empty()) continue;
            if (t.front() == '[') {
                if (t.back() != ']' || t.size() < 3) {
                    throw Error(ErrorKind::config,
                                origin + ":" + std::to_string(lineno) +
                                    ": malformed block header: " + t);
                }
                current = trim_(t.substr(1, t.size() - 2));
                cfg.block_or_create(current);
                continue;
            }
            const auto eq = t.find('=');
            if (eq == std::string::npos) {
                throw Error(ErrorKind::config,
                            origin + ":" + std::to_string(lineno) +
                                ": expected 'key = value', got: " + t);
            }
            const std::string key = trim_(t.substr(0, eq));
            const std::string value = trim_(t.substr(eq + 1));
            if (key.empty()) {
                throw Error(ErrorKind::config,
                            origin + ":" + std::to_string(lineno) +
                                ": empty key");
            }
            cfg.block_or_create(current).set(key, value);
        }
        return cfg;
    }

private:
    static std::string trim_(const std::string& s) {
        const auto a = s.find_first_not_of(" \t\r");
        if (a == std::string::npos) return {};
        const auto b = s.find_last_not_of(" \t\r");
        return s.substr(a, b - a + 1);
    }

    std::map<std::string, ConfigBlock> blocks_;
};

} // namespace h2pt
