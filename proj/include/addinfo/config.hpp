#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace addinfo {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat typed key-value document with dotted keys:
//   # comment
//   spec.sigma1_sq = 1.0
//   estimators = mre, mle:2
// Parse and type errors cite the source line.
class Config {
public:
    Config() = default;

    static Config from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream ss;
        ss << in.rdbuf();
        return from_string(ss.str(), path);
    }

    static Config from_string(const std::string& text, const std::string& origin = "<string>") {
        Config cfg;
        cfg.origin_ = origin;
        std::istringstream in(text);
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            std::string s = strip_comment(line);
            if (trim(s).empty()) continue;
            auto eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
            std::string key = trim(s.substr(0, eq));
            std::string value = trim(s.substr(eq + 1));
            if (key.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
            cfg.entries_[key] = Entry{value, lineno};
        }
        return cfg;
    }

    bool has(const std::string& key) const { return entries_.count(key) > 0; }

    // Flag overrides: replace or insert, marked as coming from the command line.
    void set(const std::string& key, const std::string& value) { entries_[key] = Entry{value, 0}; }

    std::string get_string(const std::string& key, const std::string& fallback) const {
        auto it = entries_.find(key);
        return it == entries_.end() ? fallback : it->second.value;
    }

    double get_double(const std::string& key, double fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        return parse_double(it->second, key);
    }

    long get_long(const std::string& key, long fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        const Entry& e = it->second;
        try {
            std::size_t pos = 0;
            long v = std::stol(e.value, &pos);
            if (pos != e.value.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ConfigError(location(e) + ": expected integer for key '" + key + "', got '" +
                              e.value + "'");
        }
    }

    std::vector<std::string> get_list(const std::string& key,
                                      const std::vector<std::string>& fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::vector<std::string> out;
        std::string item;
        std::istringstream ss(it->second.value);
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (!item.empty()) out.push_back(item);
        }
        return out;
    }

    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return fallback;
        std::vector<double> out;
        for (const std::string& s : get_list(key, {})) {
            Entry e{s, it->second.line};
            out.push_back(parse_double(e, key));
        }
        return out;
    }

private:
    struct Entry {
        std::string value;
        int line = 0;  // 0 = command-line override
    };

    std::string location(const Entry& e) const {
        if (e.line == 0) return "<flag>";
        return origin_ + ":" + std::to_string(e.line);
    }

    double parse_double(const Entry& e, const std::string& key) const {
        try {
            std::size_t pos = 0;
            double v = std::stod(e.value, &pos);
            if (pos != e.value.size()) throw std::invalid_argument("");
            return v;
        } catch (...) {
            throw ConfigError(location(e) + ": expected number for key '" + key + "', got '" +
                              e.value + "'");
        }
    }

    static std::string strip_comment(const std::string& s) {
        auto pos = s.find('#');
        return pos == std::string::npos ? s : s.substr(0, pos);
    }

    static std::string trim(const std::string& s) {
        std::size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }

    std::string origin_ = "<string>";
    std::map<std::string, Entry> entries_;
};

} // namespace addinfo
