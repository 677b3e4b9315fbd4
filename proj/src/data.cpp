#include "canamrf/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include <json.hpp>

#include "canamrf/errors.hpp"

namespace canamrf {

using nlohmann::json;

std::string_view to_string(Modality m) {
    switch (m) {
        case Modality::Text: return "text";
        case Modality::Audio: return "audio";
        case Modality::Visual: return "visual";
        case Modality::Sentiment: return "sentiment";
    }
    return "?";
}

Modality parse_modality(std::string_view name) {
    for (Modality m : kModalities)
        if (to_string(m) == name) return m;
    throw ConfigError("unknown modality '" + std::string(name) + "'");
}

std::size_t& ModalityDims::operator[](Modality m) {
    switch (m) {
        case Modality::Text: return text;
        case Modality::Audio: return audio;
        case Modality::Visual: return visual;
        case Modality::Sentiment: return sentiment;
    }
    throw ContractError("bad modality");
}

std::size_t ModalityDims::operator[](Modality m) const { return const_cast<ModalityDims&>(*this)[m]; }

Tensor2& Sample::sequence(Modality m) {
    switch (m) {
        case Modality::Text: return text;
        case Modality::Audio: return audio;
        case Modality::Visual: return visual;
        case Modality::Sentiment: return sentiment;
    }
    throw ContractError("bad modality");
}

const Tensor2& Sample::sequence(Modality m) const { return const_cast<Sample&>(*this).sequence(m); }

void Dataset::validate() const {
    std::set<std::string_view> ids;
    for (const Sample& s : samples) {
        if (!ids.insert(s.id).second) throw ParseError("duplicate sample id '" + s.id + "'");
        if (s.label != 0 && s.label != 1) throw ParseError("sample '" + s.id + "': label must be 0 or 1");
        for (Modality m : kModalities) {
            const Tensor2& seq = s.sequence(m);
            if (seq.rows() == 0) {
                throw ParseError("sample '" + s.id + "': modality '" + std::string(to_string(m)) + "' is empty");
            }
            if (seq.cols() != dims[m]) {
                throw ParseError("sample '" + s.id + "': modality '" + std::string(to_string(m)) + "' has width " +
                                 std::to_string(seq.cols()) + ", manifest says " + std::to_string(dims[m]));
            }
        }
    }
}

std::size_t Dataset::positives() const {
    return static_cast<std::size_t>(
        std::count_if(samples.begin(), samples.end(), [](const Sample& s) { return s.label == 1; }));
}

void SynthSpec::validate() const {
    if (!(positive_rate > 0.0 && positive_rate < 1.0)) throw ConfigError("synth.positive_rate must be in (0, 1)");
    if (!(separation >= 0.0) || !std::isfinite(separation)) throw ConfigError("synth.separation must be >= 0");
    if (!(correlation >= 0.0 && correlation <= 1.0)) throw ConfigError("synth.correlation must be in [0, 1]");
    for (Modality m : kModalities) {
        const std::string name(to_string(m));
        if (dims[m] == 0) throw ConfigError("synth.dims." + name + " must be >= 1");
        if (length(m).min == 0) throw ConfigError("synth.length_min." + name + " must be >= 1");
        if (length(m).max < length(m).min) throw ConfigError("synth.length_max." + name + " is below length_min");
    }
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace {

constexpr std::uint64_t kDirectionStream = 0xd1ec7104ULL;

}  // namespace

Tensor2 class_direction(const SynthSpec& spec, Modality m) {
    std::mt19937_64 rng(mix_seed(spec.seed ^ kDirectionStream, static_cast<std::uint64_t>(m)));
    std::normal_distribution<double> normal;
    Tensor2 u(1, spec.dims[m]);
    double norm = 0.0;
    while (norm == 0.0) {
        for (double& v : u.data()) v = normal(rng);
        norm = frobenius_norm(u);
    }
    return scale(u, 1.0 / norm);
}

Sample generate_sample(const SynthSpec& spec, std::size_t index) {
    std::mt19937_64 rng(mix_seed(spec.seed, index));
    std::normal_distribution<double> normal;
    std::bernoulli_distribution coin(spec.positive_rate);

    Sample s;
    char id[32];
    std::snprintf(id, sizeof(id), "s%05zu", index);
    s.id = id;
    s.label = coin(rng) ? 1 : 0;
    const double latent = normal(rng);
    const double class_offset = (s.label == 1 ? 0.5 : -0.5) * spec.separation;
    const double shared = std::sqrt(spec.correlation) * latent;
    const double own = std::sqrt(1.0 - spec.correlation);

    for (Modality m : kModalities) {
        const std::size_t f = spec.dims[m];
        const LengthRange len = spec.length(m);
        std::uniform_int_distribution<std::size_t> steps_dist(len.min, len.max);
        const std::size_t steps = steps_dist(rng);
        const Tensor2 u = class_direction(spec, m);
        Tensor2 seq(steps, f);
        for (std::size_t t = 0; t < steps; ++t) {
            double along = 0.0;
            for (std::size_t c = 0; c < f; ++c) {
                seq(t, c) = normal(rng);
                along += seq(t, c) * u[c];
            }
            if (spec.is_noise(m)) continue;
            const double coef = class_offset + shared + (own - 1.0) * along;
            for (std::size_t c = 0; c < f; ++c) seq(t, c) += coef * u[c];
        }
        s.sequence(m) = std::move(seq);
    }
    return s;
}

Dataset generate(const SynthSpec& spec) {
    spec.validate();
    Dataset ds;
    ds.dims = spec.dims;
    ds.samples.reserve(spec.n_samples);
    for (std::size_t i = 0; i < spec.n_samples; ++i) ds.samples.push_back(generate_sample(spec, i));
    return ds;
}

namespace {

json sequence_to_json(const Tensor2& seq) {
    json rows = json::array();
    for (std::size_t t = 0; t < seq.rows(); ++t) {
        const auto r = seq.row_span(t);
        rows.push_back(std::vector<double>(r.begin(), r.end()));
    }
    return rows;
}

Tensor2 sequence_from_json(const json& j, std::string_view name) {
    if (!j.is_array()) throw ParseError(std::string(name) + " is not an array of timesteps");
    const std::size_t steps = j.size();
    const std::size_t width = steps == 0 ? 0 : j.front().size();
    std::vector<double> data;
    data.reserve(steps * width);
    for (const json& row : j) {
        if (!row.is_array() || row.size() != width) {
            throw ParseError(std::string(name) + " has ragged or non-array timesteps");
        }
        for (const json& v : row) {
            if (!v.is_number()) throw ParseError(std::string(name) + " contains a non-numeric entry");
            data.push_back(v.get<double>());
        }
    }
    return Tensor2(steps, width, std::move(data));
}

}  // namespace

void write_dataset(const Dataset& ds, std::ostream& out) {
    json manifest;
    manifest["version"] = kDatasetFormatVersion;
    for (Modality m : kModalities) manifest["dims"][std::string(to_string(m))] = ds.dims[m];
    out << manifest.dump() << '\n';
    for (const Sample& s : ds.samples) {
        json rec;
        rec["id"] = s.id;
        rec["label"] = s.label;
        for (Modality m : kModalities) rec[std::string(to_string(m))] = sequence_to_json(s.sequence(m));
        out << rec.dump() << '\n';
    }
}

void write_dataset(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
    write_dataset(ds, out);
    if (!out) throw ParseError("failed writing '" + path.string() + "'");
}

Dataset load_dataset(std::istream& in) {
    Dataset ds;
    std::string line;
    std::size_t line_no = 0;
    bool have_manifest = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "line " + std::to_string(line_no) + ": ";
        try {
            const json rec = json::parse(line);
            if (!have_manifest) {
                if (!rec.contains("version") || rec["version"] != kDatasetFormatVersion) {
                    throw ParseError("unsupported or missing manifest version");
                }
                for (Modality m : kModalities) {
                    const std::string key(to_string(m));
                    if (!rec.contains("dims") || !rec["dims"].contains(key) ||
                        !rec["dims"][key].is_number_unsigned()) {
                        throw ParseError("manifest lacks dims." + key);
                    }
                    ds.dims[m] = rec["dims"][key].get<std::size_t>();
                }
                have_manifest = true;
                continue;
            }
            Sample s;
            if (!rec.contains("id") || !rec["id"].is_string()) throw ParseError("sample record lacks a string id");
            s.id = rec["id"].get<std::string>();
            if (!rec.contains("label") || !rec["label"].is_number_integer()) {
                throw ParseError("sample '" + s.id + "' lacks an integer label");
            }
            s.label = rec["label"].get<int>();
            for (Modality m : kModalities) {
                const std::string key(to_string(m));
                if (!rec.contains(key)) throw ParseError("sample '" + s.id + "' lacks modality '" + key + "'");
                s.sequence(m) = sequence_from_json(rec[key], "sample '" + s.id + "' " + key);
            }
            ds.samples.push_back(std::move(s));
        } catch (const json::exception& e) {
            throw ParseError(where + e.what());
        } catch (const ParseError& e) {
            throw ParseError(where + e.what());
        }
    }
    if (!have_manifest) throw ParseError("dataset has no manifest line");
    ds.validate();
    return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open dataset '" + path.string() + "'");
    try {
        return load_dataset(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ContractError("split fraction must lie strictly between 0 and 1");
    }
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) by_class[ds.samples[i].label == 1 ? 1 : 0].push_back(i);
    if (by_class[0].empty() || by_class[1].empty()) throw ContractError("stratified split needs both classes");

    std::vector<bool> in_train(ds.samples.size(), false);
    std::mt19937_64 rng(seed);
    for (auto& members : by_class) {
        std::shuffle(members.begin(), members.end(), rng);
        const auto take = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(members.size())));
        for (std::size_t i = 0; i < take; ++i) in_train[members[i]] = true;
    }

    Dataset train{ds.dims, {}};
    Dataset test{ds.dims, {}};
    for (std::size_t i = 0; i < ds.samples.size(); ++i) (in_train[i] ? train : test).samples.push_back(ds.samples[i]);
    return {std::move(train), std::move(test)};
}

}  // namespace canamrf
