#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "canamrf/amrf.hpp"
#include "canamrf/attention.hpp"
#include "canamrf/data.hpp"

namespace canamrf {

struct ModelConfig {
    ModalityDims dims;
    std::size_t window = 3;     // temporal convolution width
    std::size_t conv_dim = 16;  // frontend output width per modality
    std::size_t d = 8;          // common fusion dimension
    std::size_t k = 4;          // fused column dimension
    std::size_t hidden = 16;    // classifier hidden width
    MixVariant variant = MixVariant::MatrixLiteral;
    double gamma = 2.0;         // focal loss focusing parameter

    /// Throws ConfigError on any violated constraint (d <= conv_dim, gamma >= 0, ...).
    void validate() const;
    friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// The whole parameter tree of the network, addressed by dotted paths:
///   frontend.<modality>.kernel / .bias
///   hybrid.amrf_{st,vt,at,final}.{W1,W2,W3,alpha_logit,beta_logit}
///   hybrid.self_attn.{Wq,Wk,Wv}
///   head.fc1.weight / .bias, head.fc2.weight / .bias
struct ModelParams {
    ModelConfig config;
    ParamStore store;

    static ModelParams init(const ModelConfig& cfg, std::uint64_t seed);
    static ModelParams zeros(const ModelConfig& cfg);

    AmrfParams fusion_block(const std::string& name) const;  // "amrf_st", ..., "amrf_final"
    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

inline constexpr double kFrontendBiasInit = 1.0;

inline constexpr const char* kFusionBlocks[] = {"amrf_st", "amrf_vt", "amrf_at", "amrf_final"};

/// Records the forward pass of one sample on `tape` and returns y_hat (1x1).
/// Parameters are bound from params.store, so backward() fills its gradients.
Var forward(Tape& tape, const Sample& sample, ModelParams& params);

/// Value-only forward pass.
double predict(const Sample& sample, const ModelParams& params);

/// Focal loss of one sample under params.config.gamma, as a tape node.
Var sample_loss(Tape& tape, const Sample& sample, ModelParams& params);

/// Mean focal loss over the batch; overwrites params.store gradients with
/// d(mean loss)/d(param). Samples are reduced in id order, so the result does
/// not depend on the order of `batch`. Throws ContractError on an empty batch.
double loss_and_grads(std::span<const Sample* const> batch, ModelParams& params);

/// Checkpoint text format:
///   canamrf-checkpoint 1
///   <config key> = <value>          (one per ModelConfig field)
///   param <path> <rows> <cols>
///   <rows*cols shortest round-trip doubles, space separated>
///   ...
void save_checkpoint(const ModelParams& params, std::ostream& out);
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_checkpoint(std::istream& in);
ModelParams load_checkpoint(const std::filesystem::path& path);

/// ModelConfig <-> flat "key = value" pairs (model.*, amrf.variant).
std::vector<std::pair<std::string, std::string>> model_config_entries(const ModelConfig& cfg);
/// Returns false if `key` is not a model key; throws ParseError/ConfigError on a bad value.
bool apply_model_config_entry(ModelConfig& cfg, const std::string& key, const std::string& value);

}  // namespace canamrf
