#include "canamrf/config.hpp"

#include <fstream>
#include <set>

#include "canamrf/errors.hpp"
#include "canamrf/format.hpp"

namespace canamrf {

std::vector<KeyValue> parse_key_values(std::istream& in, const std::string& source) {
    std::vector<KeyValue> out;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
        KeyValue kv{std::string(trim(t.substr(0, eq))), std::string(trim(t.substr(eq + 1))), line_no};
        if (kv.key.empty()) throw ConfigError(where + "empty key");
        if (!seen.insert(kv.key).second) throw ConfigError(where + "duplicate key '" + kv.key + "'");
        out.push_back(std::move(kv));
    }
    return out;
}

std::vector<KeyValue> read_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    return parse_key_values(in, path.string());
}

namespace {

template <typename Apply>
void apply_entries(const std::vector<KeyValue>& entries, const std::string& source, Apply&& apply) {
    for (const KeyValue& kv : entries) {
        const std::string where = source + ":" + std::to_string(kv.line) + ": ";
        try {
            if (!apply(kv.key, kv.value)) throw ConfigError(where + "unknown key '" + kv.key + "'");
        } catch (const ParseError& e) {
            throw ConfigError(where + e.what());
        } catch (const ConfigError& e) {
            const std::string msg = e.what();
            if (msg.starts_with(where)) throw;
            throw ConfigError(where + msg);
        }
    }
}

}  // namespace

RunConfig run_config_from(const std::vector<KeyValue>& entries, const std::string& source) {
    RunConfig cfg;
    apply_entries(entries, source, [&](const std::string& key, const std::string& value) {
        return apply_model_config_entry(cfg.model, key, value) || apply_train_config_entry(cfg.train, key, value);
    });
    cfg.model.validate();
    cfg.train.validate();
    return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
    return run_config_from(read_key_values(path), path.string());
}

namespace {

bool apply_synth_entry(SynthSpec& spec, const std::string& key, const std::string& value) {
    auto suffix_modality = [&](std::string_view prefix) { return parse_modality(std::string_view(key).substr(prefix.size())); };
    if (key == "synth.n_samples") {
        spec.n_samples = parse_unsigned(value, key);
    } else if (key == "synth.positive_rate") {
        spec.positive_rate = parse_double(value, key);
    } else if (key == "synth.separation") {
        spec.separation = parse_double(value, key);
    } else if (key == "synth.correlation") {
        spec.correlation = parse_double(value, key);
    } else if (key == "synth.seed") {
        spec.seed = parse_unsigned(value, key);
    } else if (key.starts_with("synth.dims.")) {
        spec.dims[suffix_modality("synth.dims.")] = parse_unsigned(value, key);
    } else if (key.starts_with("synth.length_min.")) {
        spec.length(suffix_modality("synth.length_min.")).min = parse_unsigned(value, key);
    } else if (key.starts_with("synth.length_max.")) {
        spec.length(suffix_modality("synth.length_max.")).max = parse_unsigned(value, key);
    } else if (key == "synth.noise_modalities") {
        spec.noise_only = {};
        std::string_view rest = value;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view item = trim(rest.substr(0, comma));
            if (!item.empty()) spec.noise_only[static_cast<std::size_t>(parse_modality(item))] = true;
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
    } else {
        return false;
    }
    return true;
}

}  // namespace

SynthSpec synth_spec_from(const std::vector<KeyValue>& entries, const std::string& source) {
    SynthSpec spec;
    apply_entries(entries, source,
                  [&](const std::string& key, const std::string& value) { return apply_synth_entry(spec, key, value); });
    spec.validate();
    return spec;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
    return synth_spec_from(read_key_values(path), path.string());
}

std::vector<std::pair<std::string, std::string>> synth_spec_entries(const SynthSpec& spec) {
    std::vector<std::pair<std::string, std::string>> out = {
        {"synth.n_samples", std::to_string(spec.n_samples)},
        {"synth.positive_rate", format_double(spec.positive_rate)},
        {"synth.separation", format_double(spec.separation)},
        {"synth.correlation", format_double(spec.correlation)},
        {"synth.seed", std::to_string(spec.seed)},
    };
    std::string noise;
    for (Modality m : kModalities) {
        const std::string name(to_string(m));
        out.emplace_back("synth.dims." + name, std::to_string(spec.dims[m]));
        out.emplace_back("synth.length_min." + name, std::to_string(spec.length(m).min));
        out.emplace_back("synth.length_max." + name, std::to_string(spec.length(m).max));
        if (spec.is_noise(m)) noise += (noise.empty() ? "" : ",") + name;
    }
    out.emplace_back("synth.noise_modalities", noise);
    return out;
}

}  // namespace canamrf
