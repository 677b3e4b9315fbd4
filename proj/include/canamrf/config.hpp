#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "canamrf/data.hpp"
#include "canamrf/model.hpp"
#include "canamrf/trainer.hpp"

namespace canamrf {

struct KeyValue {
    std::string key;
    std::string value;
    std::size_t line = 0;
};

/// Flat "key = value" text. Blank lines and lines starting with '#' are
/// skipped. Throws ConfigError "<source>:<line>: ..." on a line without '='
/// or a repeated key.
std::vector<KeyValue> parse_key_values(std::istream& in, const std::string& source);
std::vector<KeyValue> read_key_values(const std::filesystem::path& path);

/// Model and training settings: keys model.*, amrf.variant and train.*.
struct RunConfig {
    ModelConfig model;
    TrainConfig train;
};

/// Unknown keys are errors. The result is validated.
RunConfig run_config_from(const std::vector<KeyValue>& entries, const std::string& source);
RunConfig load_run_config(const std::filesystem::path& path);

/// Synthetic data settings, keys synth.*:
///   synth.n_samples, synth.positive_rate, synth.separation, synth.correlation,
///   synth.seed, synth.dims.<modality>, synth.length_min.<modality>,
///   synth.length_max.<modality>, synth.noise_modalities (comma list)
SynthSpec synth_spec_from(const std::vector<KeyValue>& entries, const std::string& source);
SynthSpec load_synth_spec(const std::filesystem::path& path);
std::vector<std::pair<std::string, std::string>> synth_spec_entries(const SynthSpec& spec);

}  // namespace canamrf
