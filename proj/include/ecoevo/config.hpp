#pragma once
// Run configuration: flat sectioned key = value text.
//
// Parsing is strict.  Unknown sections or keys, duplicate keys, type errors
// and a missing seed are all hard errors; nothing is silently ignored.  Every
// consumer marks the keys it reads, and require_all_consumed() reports any
// leftovers with their line numbers.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecoevo/common.hpp"

namespace ecoevo {

class ExperimentConfig {
public:
    ExperimentConfig() = default;

    /// Parses config text; `origin` labels error messages (file name, "preset").
    static ExperimentConfig parse(const std::string& text, const std::string& origin);
    static ExperimentConfig from_file(const std::string& path);

    /// Overlays `other` on top of this config; values in `other` win.
    void merge(const ExperimentConfig& other);

    /// Sets one key programmatically (CLI flag overrides).
    void set(const std::string& section, const std::string& key, const std::string& value);

    bool has(const std::string& section, const std::string& key) const;

    std::string get_string(const std::string& section, const std::string& key,
                           std::optional<std::string> fallback = std::nullopt);
    double get_double(const std::string& section, const std::string& key,
                      std::optional<double> fallback = std::nullopt);
    long long get_int(const std::string& section, const std::string& key,
                      std::optional<long long> fallback = std::nullopt);
    std::uint64_t get_seed();  // [run] seed, mandatory
    bool get_bool(const std::string& section, const std::string& key,
                  std::optional<bool> fallback = std::nullopt);

    /// Throws ConfigError listing every key no consumer asked for.
    void require_all_consumed() const;

    /// Marks every key in `section` consumed.  For commands that accept a
    /// full run preset but deliberately ignore parts of it (a field solver
    /// has no use for engine or histogram settings, say).
    void ignore_section(const std::string& section);

    /// Full resolved contents for the sidecar echo, "section.key" -> value.
    std::map<std::string, std::string> entries() const;

private:
    struct Entry {
        std::string value;
        std::string origin;
        int line = 0;
        bool consumed = false;
    };
    Entry* find(const std::string& section, const std::string& key);
    std::map<std::string, std::map<std::string, Entry>> sections_;
};

}  // namespace ecoevo
