#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corrattack/attack.hpp"

namespace corrattack {

/// Flat `key = value` text: one pair per line, `#` starts a comment, blank
/// lines are ignored. Keys map to their value and 1-based line number.
struct KeyValues {
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, Entry> entries;
};

/// Throws ConfigError with the offending line on malformed input or
/// duplicate keys.
KeyValues parse_key_values(const std::string& text);

struct BenchConfig {
    AttackConfig attack = AttackConfig::defaults(AttackMode::Flip);
    std::vector<std::string> methods{"corrattack", "random"};

    // Images: "synthetic" generates seeded noise images labelled by the
    // model's own clean prediction; anything else is a PNG directory.
    std::string dataset = "synthetic";
    std::string labels;  // defaults to <dataset>/labels.csv
    std::size_t synthetic_count = 20;
    std::uint64_t dataset_seed = 7;
    int image_size = 32;  // resize target; also the synthetic side length
    int channels = 3;

    // Target: synthetic model kind, or an oracle URL.
    std::string model = "linear";
    double model_smoothing = 0.0;
    double model_bias = 0.0;
    double model_row_norm = 1.0;
    std::uint64_t model_seed = 42;
    std::size_t classes = 10;
    std::string oracle;

    std::size_t workers = 1;
    bool record_timing = false;
    std::vector<std::size_t> curve_levels;  // empty -> 10 even steps up to the budget

    /// Every documented key with a one-line description, in a stable order.
    static const std::vector<std::pair<std::string, std::string>>& keys();

    /// Applies one key. Throws ConfigError (tagged with `line`) on an unknown
    /// key or a bad value.
    void set(const std::string& key, const std::string& value, int line = 0);

    static BenchConfig from_text(const std::string& text);
    static BenchConfig from_file(const std::string& path);

    /// Throws ConfigError on inconsistent settings.
    void validate() const;
};

}  // namespace corrattack
