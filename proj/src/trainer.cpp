#include "canamrf/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "canamrf/errors.hpp"
#include "canamrf/format.hpp"

namespace canamrf {

OptimizerKind parse_optimizer(std::string_view name) {
    if (name == "sgd") return OptimizerKind::Sgd;
    if (name == "adam") return OptimizerKind::Adam;
    throw ConfigError("unknown train.optimizer '" + std::string(name) + "' (expected sgd or adam)");
}

std::string_view to_string(OptimizerKind k) { return k == OptimizerKind::Sgd ? "sgd" : "adam"; }

void TrainConfig::validate() const {
    if (epochs == 0) throw ConfigError("train.epochs must be >= 1");
    if (batch_size == 0) throw ConfigError("train.batch_size must be >= 1");
    if (!(lr >= 0.0) || !std::isfinite(lr)) throw ConfigError("train.lr must be a finite value >= 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
        throw ConfigError("train.beta1 and train.beta2 must lie in [0, 1)");
    }
    if (!(adam_eps > 0.0)) throw ConfigError("train.adam_eps must be > 0");
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("train.threshold must lie in (0, 1)");
    if (!(val_fraction > 0.0 && val_fraction < 1.0)) throw ConfigError("train.val_fraction must lie in (0, 1)");
}

std::vector<std::pair<std::string, std::string>> train_config_entries(const TrainConfig& cfg) {
    return {
        {"train.epochs", std::to_string(cfg.epochs)},
        {"train.batch_size", std::to_string(cfg.batch_size)},
        {"train.lr", format_double(cfg.lr)},
        {"train.optimizer", std::string(to_string(cfg.optimizer))},
        {"train.beta1", format_double(cfg.beta1)},
        {"train.beta2", format_double(cfg.beta2)},
        {"train.adam_eps", format_double(cfg.adam_eps)},
        {"train.patience", std::to_string(cfg.patience)},
        {"train.seed", std::to_string(cfg.seed)},
        {"train.threshold", format_double(cfg.threshold)},
        {"train.val_fraction", format_double(cfg.val_fraction)},
    };
}

bool apply_train_config_entry(TrainConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "train.epochs") {
        cfg.epochs = parse_unsigned(value, key);
    } else if (key == "train.batch_size") {
        cfg.batch_size = parse_unsigned(value, key);
    } else if (key == "train.lr") {
        cfg.lr = parse_double(value, key);
    } else if (key == "train.optimizer") {
        cfg.optimizer = parse_optimizer(trim(value));
    } else if (key == "train.beta1") {
        cfg.beta1 = parse_double(value, key);
    } else if (key == "train.beta2") {
        cfg.beta2 = parse_double(value, key);
    } else if (key == "train.adam_eps") {
        cfg.adam_eps = parse_double(value, key);
    } else if (key == "train.patience") {
        cfg.patience = parse_unsigned(value, key);
    } else if (key == "train.seed") {
        cfg.seed = parse_unsigned(value, key);
    } else if (key == "train.threshold") {
        cfg.threshold = parse_double(value, key);
    } else if (key == "train.val_fraction") {
        cfg.val_fraction = parse_double(value, key);
    } else {
        return false;
    }
    return true;
}

void step_adam(Tensor2& param, const Tensor2& grad, AdamState& state, const TrainConfig& cfg) {
    require_same_shape(param, grad, "adam step");
    if (state.m.empty()) {
        state.m = Tensor2(param.rows(), param.cols());
        state.v = Tensor2(param.rows(), param.cols());
    }
    ++state.steps;
    const double t = static_cast<double>(state.steps);
    const double correct1 = 1.0 - std::pow(cfg.beta1, t);
    const double correct2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < param.size(); ++i) {
        const double g = grad[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        const double m_hat = state.m[i] / correct1;
        const double v_hat = state.v[i] / correct2;
        param[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
    }
}

void step_sgd(Tensor2& param, const Tensor2& grad, double lr) {
    require_same_shape(param, grad, "sgd step");
    for (std::size_t i = 0; i < param.size(); ++i) param[i] -= lr * grad[i];
}

Metrics evaluate(const ModelParams& params, const Dataset& ds, double threshold) {
    std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
    for (const Sample& s : ds.samples) {
        const bool predicted = predict(s, params) >= threshold;
        const bool actual = s.label == 1;
        if (predicted && actual) ++tp;
        else if (predicted) ++fp;
        else if (actual) ++fn;
        else ++tn;
    }
    return Metrics::from_counts(tp, fp, fn, tn);
}

TrainResult train(ModelParams params, const Dataset& train_set, const Dataset& validation, const TrainConfig& cfg,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
    cfg.validate();
    if (train_set.samples.empty()) throw ContractError("train: empty training set");
    const std::size_t positives = train_set.positives();
    if (positives == 0 || positives == train_set.size()) throw ContractError("train: training set needs both classes");
    const Dataset& val = validation.samples.empty() ? train_set : validation;

    std::map<std::string, AdamState> adam;
    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), 0);

    TrainResult result{params, {}, 0, {}};
    double best_f1 = -1.0;
    std::size_t since_best = 0;
    std::vector<const Sample*> batch;

    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double loss_sum = 0.0;
        for (std::size_t start = 0, b = 0; start < order.size(); start += cfg.batch_size, ++b) {
            batch.clear();
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            for (std::size_t i = start; i < stop; ++i) batch.push_back(&train_set.samples[order[i]]);
            const double loss = loss_and_grads(batch, params);
            if (!std::isfinite(loss)) {
                throw NumericalError("training diverged at epoch " + std::to_string(epoch) + ", batch " +
                                     std::to_string(b) + " (loss " + format_double(loss) + ")");
            }
            loss_sum += loss * static_cast<double>(batch.size());
            for (auto& [path, e] : params.store) {
                if (cfg.optimizer == OptimizerKind::Adam) {
                    step_adam(e.value, e.grad, adam[path], cfg);
                } else {
                    step_sgd(e.value, e.grad, cfg.lr);
                }
            }
        }

        EpochRecord rec{epoch, loss_sum / static_cast<double>(order.size()), evaluate(params, val, cfg.threshold)};
        result.history.push_back(rec);
        if (on_epoch) on_epoch(rec);

        if (rec.validation.f1 > best_f1) {
            best_f1 = rec.validation.f1;
            result.params = params;
            result.best_epoch = epoch;
            since_best = 0;
        } else if (cfg.patience != 0 && ++since_best >= cfg.patience) {
            break;
        }
    }
    result.last_params = std::move(params);
    return result;
}

TrainResult fit(const Dataset& ds, const ModelConfig& model, const TrainConfig& cfg,
                const std::function<void(const EpochRecord&)>& on_epoch) {
    cfg.validate();
    auto [fit_set, val_set] = stratified_split(ds, 1.0 - cfg.val_fraction, mix_seed(cfg.seed, 0));
    TrainConfig tc = cfg;
    tc.seed = mix_seed(cfg.seed, 2);
    return train(ModelParams::init(model, mix_seed(cfg.seed, 1)), fit_set, val_set, tc, on_epoch);
}

std::string format_epoch_record(const EpochRecord& rec) {
    const Metrics& m = rec.validation;
    return "epoch=" + std::to_string(rec.epoch) + " train_loss=" + format_double(rec.train_loss) +
           " val_precision=" + format_double(m.precision) + " val_recall=" + format_double(m.recall) +
           " val_f1=" + format_double(m.f1) + " tp=" + std::to_string(m.tp) + " fp=" + std::to_string(m.fp) +
           " fn=" + std::to_string(m.fn) + " tn=" + std::to_string(m.tn);
}

}  // namespace canamrf
