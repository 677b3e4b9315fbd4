#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "canamrf/tensor.hpp"

namespace canamrf {

enum class Modality { Text, Audio, Visual, Sentiment };

inline constexpr std::array<Modality, 4> kModalities = {Modality::Text, Modality::Audio, Modality::Visual,
                                                        Modality::Sentiment};

std::string_view to_string(Modality m);
Modality parse_modality(std::string_view name);

/// Per-timestep feature width of each modality.
struct ModalityDims {
    std::size_t text = 768;
    std::size_t audio = 128;
    std::size_t visual = 136;
    std::size_t sentiment = 8;

    std::size_t& operator[](Modality m);
    std::size_t operator[](Modality m) const;
    friend bool operator==(const ModalityDims&, const ModalityDims&) = default;
};

/// One subject. Label 1 = depressed, 0 = control. Each sequence is T x dim.
struct Sample {
    std::string id;
    int label = 0;
    Tensor2 text;
    Tensor2 audio;
    Tensor2 visual;
    Tensor2 sentiment;

    Tensor2& sequence(Modality m);
    const Tensor2& sequence(Modality m) const;
    friend bool operator==(const Sample&, const Sample&) = default;
};

struct Dataset {
    ModalityDims dims;
    std::vector<Sample> samples;

    /// Throws ParseError naming the sample id when a sequence is empty, a
    /// width disagrees with `dims`, a label is not 0/1, or an id repeats.
    void validate() const;
    std::size_t positives() const;
    std::size_t size() const { return samples.size(); }
    friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct LengthRange {
    std::size_t min = 4;
    std::size_t max = 8;
};

/// Synthetic benchmark description.
///
/// Each timestep of a signal-carrying modality is
///   x = e + (c_y + sqrt(rho) z + (sqrt(1 - rho) - 1) <e, u>) u
/// with e ~ N(0, I), u a fixed random unit direction for the modality,
/// c_y = +s/2 for positives and -s/2 for negatives, and z ~ N(0, 1) one
/// latent draw per sample shared by all modalities. Along u the within-class
/// variance is 1 and the cross-modal correlation is rho; every other direction
/// is unit-variance noise. Modalities in the noise mask are plain e.
struct SynthSpec {
    std::size_t n_samples = 300;
    double positive_rate = 0.5;
    ModalityDims dims;
    std::array<LengthRange, 4> lengths{};
    double separation = 8.0;
    double correlation = 0.5;
    std::array<bool, 4> noise_only{};
    std::uint64_t seed = 42;

    LengthRange& length(Modality m) { return lengths[static_cast<std::size_t>(m)]; }
    const LengthRange& length(Modality m) const { return lengths[static_cast<std::size_t>(m)]; }
    bool is_noise(Modality m) const { return noise_only[static_cast<std::size_t>(m)]; }

    /// Throws ConfigError on out-of-range fields.
    void validate() const;
};

/// Deterministic in spec (including seed). Sample i draws from its own
/// generator seeded from (seed, i), so samples can be produced in any order.
Dataset generate(const SynthSpec& spec);
Sample generate_sample(const SynthSpec& spec, std::size_t index);

/// Unit direction carrying the class signal of modality m.
Tensor2 class_direction(const SynthSpec& spec, Modality m);

/// Line-delimited JSON (".mmjl"). Line 1 is the manifest
///   {"version":1,"dims":{"text":..,"audio":..,"visual":..,"sentiment":..}}
/// and every further line one sample
///   {"id":"..","label":0|1,"text":[[..],..],"audio":..,"visual":..,"sentiment":..}.
/// Doubles are written in shortest round-trip form.
inline constexpr int kDatasetFormatVersion = 1;

void write_dataset(const Dataset& ds, std::ostream& out);
void write_dataset(const Dataset& ds, const std::filesystem::path& path);
/// Throws ParseError citing the 1-based line number of malformed input.
Dataset load_dataset(std::istream& in);
Dataset load_dataset(const std::filesystem::path& path);

/// Per-class shuffle with `seed`; round(train_fraction * class_count) of each
/// class goes to train. Both parts keep the input order. Throws ContractError
/// unless 0 < train_fraction < 1 and both labels occur.
std::pair<Dataset, Dataset> stratified_split(const Dataset& ds, double train_fraction, std::uint64_t seed);

/// SplitMix64 finaliser; used to derive independent seeds from one root seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace canamrf
