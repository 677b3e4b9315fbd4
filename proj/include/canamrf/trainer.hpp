#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "canamrf/metrics.hpp"
#include "canamrf/model.hpp"

namespace canamrf {

enum class OptimizerKind { Sgd, Adam };

OptimizerKind parse_optimizer(std::string_view name);
std::string_view to_string(OptimizerKind k);

struct TrainConfig {
    std::size_t epochs = 200;
    std::size_t batch_size = 8;
    double lr = 1e-3;
    OptimizerKind optimizer = OptimizerKind::Adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t patience = 20;  // 0 disables early stopping
    std::uint64_t seed = 1;
    double threshold = 0.5;
    double val_fraction = 0.2;  // held out by fit()

    void validate() const;
    friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

std::vector<std::pair<std::string, std::string>> train_config_entries(const TrainConfig& cfg);
bool apply_train_config_entry(TrainConfig& cfg, const std::string& key, const std::string& value);

/// Per-parameter Adam moments.
struct AdamState {
    Tensor2 m;
    Tensor2 v;
    std::size_t steps = 0;
};

/// One bias-corrected Adam update; `state` is sized on first use.
void step_adam(Tensor2& param, const Tensor2& grad, AdamState& state, const TrainConfig& cfg);
void step_sgd(Tensor2& param, const Tensor2& grad, double lr);

/// y_hat >= threshold counts as a positive prediction.
Metrics evaluate(const ModelParams& params, const Dataset& ds, double threshold);

struct EpochRecord {
    std::size_t epoch = 0;  // 1-based
    double train_loss = 0.0;
    Metrics validation;
    friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainResult {
    ModelParams params;  // parameters of the best-validation-F1 epoch
    std::vector<EpochRecord> history;
    std::size_t best_epoch = 0;
    ModelParams last_params;  // parameters after the final epoch run
};

/// Mini-batch training on mean focal loss. Batches are drawn from a per-epoch
/// shuffle seeded by cfg.seed. After every epoch the model is scored on
/// `validation` (on `train_set` when `validation` is empty); training stops
/// once validation F1 has not improved for cfg.patience epochs.
/// Throws NumericalError naming the epoch and batch if the loss diverges.
TrainResult train(ModelParams params, const Dataset& train_set, const Dataset& validation, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Holds out cfg.val_fraction of `ds` (stratified) for early stopping,
/// initializes from `model` and trains. Split, init and shuffle seeds all
/// derive from cfg.seed.
TrainResult fit(const Dataset& ds, const ModelConfig& model, const TrainConfig& cfg,
                const std::function<void(const EpochRecord&)>& on_epoch = {});

/// "epoch=.. train_loss=.. val_precision=.. val_recall=.. val_f1=.. ..." (one line, no newline).
std::string format_epoch_record(const EpochRecord& rec);

}  // namespace canamrf
