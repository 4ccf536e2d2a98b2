#pragma once

#include <map>
#include <string>
#include <vector>

namespace nldecay {

/// Flat key = value configuration with INI-style [section] prefixes; keys are
/// stored as "section.key". Later assignments win, so flag overrides are a
/// plain insert.
class Config {
public:
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;

    /// Throws std::runtime_error naming the key when absent.
    std::string require(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

struct ManifestEntry {
    std::string file;
    std::string sha256;
};

struct ScenarioResult {
    int exit_code = 0;  // 0 pass, 2 threshold violation
    std::vector<ManifestEntry> manifest;
    std::vector<std::string> failures;  // human-readable threshold violations
};

/// Runs one scenario end to end: build model, simulate, run the selected
/// analyses, write CSV artifacts (plus SVG when requested) and manifest.csv
/// into out_dir. Identical (config, seed) reruns are byte-identical.
/// Throws std::runtime_error on invalid configuration, naming the key.
ScenarioResult run_scenario(const Config& config, const std::string& out_dir,
                            unsigned long long seed, bool svg = false);

struct PresetInfo {
    std::string name;
    std::string description;
};

std::vector<PresetInfo> list_presets();

/// Config text of a named preset; throws on unknown names.
Config preset_config(const std::string& name);

/// SHA-256 of a byte string, lowercase hex.
std::string sha256_hex(const std::string& bytes);

}  // namespace nldecay
