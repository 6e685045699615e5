#include "corrattack/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "corrattack/errors.hpp"

namespace corrattack {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value, int line) {
    T out{};
    const char* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc() || ptr != end)
        throw ConfigError("bad value '" + value + "' for " + key, line);
    return out;
}

bool parse_bool(const std::string& key, const std::string& value, int line) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("bad value '" + value + "' for " + key + " (expected true/false)", line);
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key = value", line);
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key", line);
        if (kv.entries.count(key)) throw ConfigError("duplicate key " + key, line);
        kv.entries[key] = {value, line};
    }
    return kv;
}

const std::vector<std::pair<std::string, std::string>>& BenchConfig::keys() {
    static const std::vector<std::pair<std::string, std::string>> k{
        {"mode", "diff or flip"},
        {"methods", "comma list of corrattack, random"},
        {"epsilon", "l-inf radius"},
        {"eta", "diff step size"},
        {"initial_block", "first block size"},
        {"ei_threshold", "stage stops when max EI falls below this"},
        {"sample_ratio", "initial design size as a share of the action count"},
        {"window_ratio", "window capacity as a share of the action count"},
        {"min_initial_samples", "floor on the initial design size"},
        {"min_window", "floor on the window capacity"},
        {"alpha", "comma list size:alpha, e.g. 32:1,16:1"},
        {"budget", "query budget per image"},
        {"margin", "hinge floor"},
        {"target", "target class, or none"},
        {"seed", "attack seed; image i uses seed xor i"},
        {"dataset", "synthetic, or a directory of PNG files"},
        {"labels", "labels file (file,label[,target]); default <dataset>/labels.csv"},
        {"synthetic_count", "number of generated images"},
        {"dataset_seed", "seed of the generated images"},
        {"image_size", "side length images are resized to"},
        {"channels", "channels of generated images"},
        {"model", "linear or mlp (ignored with oracle)"},
        {"model_smoothing", "Gaussian blur of the linear weights, in pixels"},
        {"model_bias", "standard deviation of the linear model's class biases"},
        {"model_row_norm", "norm of each linear weight row"},
        {"model_seed", "seed of the synthetic model"},
        {"classes", "class count of the synthetic model"},
        {"oracle", "remote logits endpoint; empty uses the synthetic model"},
        {"workers", "parallel images"},
        {"record_timing", "fill wall_ms (breaks byte-identical reruns)"},
        {"curve_levels", "comma list of query levels for the success curve"},
    };
    return k;
}

void BenchConfig::set(const std::string& key, const std::string& v, int line) {
    auto num = [&]<typename T>(T& out) { out = parse_number<T>(key, v, line); };
    if (key == "mode") {
        try {
            const AttackMode m = parse_attack_mode(v);
            if (m != attack.mode) {
                attack.mode = m;
                attack.alpha_schedule = AttackConfig::default_alpha_schedule(m);
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what(), line);
        }
    } else if (key == "methods") {
        methods = split_list(v);
        for (const auto& m : methods)
            if (m != "corrattack" && m != "random") throw ConfigError("unknown method " + m, line);
        if (methods.empty()) throw ConfigError("methods is empty", line);
    } else if (key == "epsilon") {
        num(attack.epsilon);
    } else if (key == "eta") {
        num(attack.eta);
    } else if (key == "initial_block") {
        num(attack.initial_block);
    } else if (key == "ei_threshold") {
        num(attack.ei_threshold);
    } else if (key == "sample_ratio") {
        num(attack.sample_ratio);
    } else if (key == "window_ratio") {
        num(attack.window_ratio);
    } else if (key == "min_initial_samples") {
        num(attack.min_initial_samples);
    } else if (key == "min_window") {
        num(attack.min_window);
    } else if (key == "alpha") {
        std::map<int, int> schedule;
        for (const auto& item : split_list(v)) {
            const auto colon = item.find(':');
            if (colon == std::string::npos)
                throw ConfigError("alpha entries must be size:alpha", line);
            schedule[parse_number<int>(key, trim(item.substr(0, colon)), line)] =
                parse_number<int>(key, trim(item.substr(colon + 1)), line);
        }
        attack.alpha_schedule = std::move(schedule);
    } else if (key == "budget") {
        num(attack.query_budget);
    } else if (key == "margin") {
        num(attack.margin);
    } else if (key == "target") {
        if (v == "none" || v.empty())
            attack.target.reset();
        else
            attack.target = parse_number<int>(key, v, line);
    } else if (key == "seed") {
        num(attack.seed);
    } else if (key == "dataset") {
        dataset = v;
    } else if (key == "labels") {
        labels = v;
    } else if (key == "synthetic_count") {
        num(synthetic_count);
    } else if (key == "dataset_seed") {
        num(dataset_seed);
    } else if (key == "image_size") {
        num(image_size);
    } else if (key == "channels") {
        num(channels);
    } else if (key == "model") {
        model = v;
    } else if (key == "model_smoothing") {
        num(model_smoothing);
    } else if (key == "model_bias") {
        num(model_bias);
    } else if (key == "model_row_norm") {
        num(model_row_norm);
    } else if (key == "model_seed") {
        num(model_seed);
    } else if (key == "classes") {
        num(classes);
    } else if (key == "oracle") {
        oracle = v;
    } else if (key == "workers") {
        num(workers);
    } else if (key == "record_timing") {
        record_timing = parse_bool(key, v, line);
    } else if (key == "curve_levels") {
        curve_levels.clear();
        for (const auto& item : split_list(v))
            curve_levels.push_back(parse_number<std::size_t>(key, item, line));
    } else {
        throw ConfigError("unknown key " + key, line);
    }
}

BenchConfig BenchConfig::from_text(const std::string& text) {
    BenchConfig c;
    const KeyValues kv = parse_key_values(text);
    // mode first so an explicit alpha is not overwritten by the mode default
    if (const auto it = kv.entries.find("mode"); it != kv.entries.end())
        c.set("mode", it->second.value, it->second.line);
    for (const auto& [key, e] : kv.entries)
        if (key != "mode") c.set(key, e.value, e.line);
    c.validate();
    return c;
}

BenchConfig BenchConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_text(ss.str());
}

void BenchConfig::validate() const {
    try {
        attack.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    if (image_size < kMinBlockSize) throw ConfigError("image_size must be >= 2");
    if (channels < 1) throw ConfigError("channels must be >= 1");
    if (workers < 1) throw ConfigError("workers must be >= 1");
    if (classes < 2) throw ConfigError("classes must be >= 2");
    if (oracle.empty() && model != "linear" && model != "mlp")
        throw ConfigError("model must be linear or mlp");
    if (attack.target && (*attack.target < 0 || (oracle.empty() &&
                                                  static_cast<std::size_t>(*attack.target) >= classes)))
        throw ConfigError("target out of range");
}

}  // namespace corrattack
