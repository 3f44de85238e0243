#include "ecoevo/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace ecoevo {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
    std::ostringstream os;
    os << origin << ":" << line << ": " << what;
    throw ConfigError(os.str());
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') fail(origin, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) fail(origin, lineno, "empty section name");
            continue;
        }
        if (section.empty()) fail(origin, lineno, "key before any [section] header");
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) fail(origin, lineno, "empty key");
        auto& sec = cfg.sections_[section];
        auto it = sec.find(key);
        if (it != sec.end())
            fail(origin, lineno,
                 "duplicate key '" + key + "' in [" + section + "] (first at " + it->second.origin +
                     ":" + std::to_string(it->second.line) + ")");
        sec.emplace(key, Entry{value, origin, lineno, false});
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

void ExperimentConfig::merge(const ExperimentConfig& other) {
    for (const auto& [sec, keys] : other.sections_)
        for (const auto& [key, entry] : keys) {
            Entry e = entry;
            e.consumed = false;
            sections_[sec][key] = e;
        }
}

void ExperimentConfig::set(const std::string& section, const std::string& key,
                           const std::string& value) {
    sections_[section][key] = Entry{value, "flag", 0, false};
}

ExperimentConfig::Entry* ExperimentConfig::find(const std::string& section,
                                                const std::string& key) {
    auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

bool ExperimentConfig::has(const std::string& section, const std::string& key) const {
    return const_cast<ExperimentConfig*>(this)->find(section, key) != nullptr;
}

std::string ExperimentConfig::get_string(const std::string& section, const std::string& key,
                                         std::optional<std::string> fallback) {
    Entry* e = find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        throw ConfigError("missing required key [" + section + "] " + key);
    }
    e->consumed = true;
    return e->value;
}

double ExperimentConfig::get_double(const std::string& section, const std::string& key,
                                    std::optional<double> fallback) {
    Entry* e = find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        throw ConfigError("missing required key [" + section + "] " + key);
    }
    e->consumed = true;
    try {
        std::size_t pos = 0;
        const double v = std::stod(e->value, &pos);
        if (pos != e->value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        fail(e->origin, e->line, "cannot parse '" + e->value + "' as a number for [" + section +
                                     "] " + key);
    }
}

long long ExperimentConfig::get_int(const std::string& section, const std::string& key,
                                    std::optional<long long> fallback) {
    Entry* e = find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        throw ConfigError("missing required key [" + section + "] " + key);
    }
    e->consumed = true;
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(e->value, &pos);
        if (pos != e->value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        fail(e->origin, e->line, "cannot parse '" + e->value + "' as an integer for [" + section +
                                     "] " + key);
    }
}

std::uint64_t ExperimentConfig::get_seed() {
    Entry* e = find("run", "seed");
    if (!e)
        throw ConfigError("[run] seed is mandatory: every run pins its random stream explicitly");
    e->consumed = true;
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(e->value, &pos);
        if (pos != e->value.size()) throw std::invalid_argument("trailing junk");
        return v;
    } catch (const std::exception&) {
        fail(e->origin, e->line, "cannot parse '" + e->value + "' as a seed");
    }
}

bool ExperimentConfig::get_bool(const std::string& section, const std::string& key,
                                std::optional<bool> fallback) {
    Entry* e = find(section, key);
    if (!e) {
        if (fallback) return *fallback;
        throw ConfigError("missing required key [" + section + "] " + key);
    }
    e->consumed = true;
    const std::string& v = e->value;
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail(e->origin, e->line, "cannot parse '" + v + "' as a boolean for [" + section + "] " + key);
}

void ExperimentConfig::require_all_consumed() const {
    std::ostringstream os;
    bool any = false;
    for (const auto& [sec, keys] : sections_)
        for (const auto& [key, entry] : keys)
            if (!entry.consumed) {
                if (any) os << "; ";
                os << "[" << sec << "] " << key << " (" << entry.origin << ":" << entry.line << ")";
                any = true;
            }
    if (any) throw ConfigError("unknown configuration keys: " + os.str());
}

void ExperimentConfig::ignore_section(const std::string& section) {
    auto it = sections_.find(section);
    if (it == sections_.end()) return;
    for (auto& [key, entry] : it->second) entry.consumed = true;
}

std::map<std::string, std::string> ExperimentConfig::entries() const {
    std::map<std::string, std::string> out;
    for (const auto& [sec, keys] : sections_)
        for (const auto& [key, entry] : keys) out[sec + "." + key] = entry.value;
    return out;
}

}  // namespace ecoevo
