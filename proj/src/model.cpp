#include "canamrf/model.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "canamrf/errors.hpp"
#include "canamrf/format.hpp"
#include "canamrf/ops.hpp"

namespace canamrf {

void ModelConfig::validate() const {
    for (Modality m : kModalities) {
        if (dims[m] == 0) throw ConfigError("model.dims." + std::string(to_string(m)) + " must be >= 1");
    }
    if (window == 0) throw ConfigError("model.window must be >= 1");
    if (conv_dim == 0 || d == 0 || k == 0 || hidden == 0) {
        throw ConfigError("model.conv_dim, model.d, model.k and model.hidden must be >= 1");
    }
    if (d > conv_dim) {
        throw ConfigError("model.d (" + std::to_string(d) + ") must not exceed model.conv_dim (" +
                          std::to_string(conv_dim) + ")");
    }
    if (!(gamma >= 0.0)) throw ConfigError("model.gamma must be >= 0");
}

namespace {

std::string frontend_path(Modality m, const char* leaf) {
    return "frontend." + std::string(to_string(m)) + "." + leaf;
}

ModalityWidths frontend_widths(const ModelConfig& cfg) {
    return ModalityWidths{cfg.conv_dim, cfg.conv_dim, cfg.conv_dim, cfg.conv_dim};
}

}  // namespace

ModelParams ModelParams::init(const ModelConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    ModelParams p;
    p.config = cfg;
    std::mt19937_64 rng(seed);
    for (Modality m : kModalities) {
        p.store.add(frontend_path(m, "kernel"), glorot_uniform(cfg.window * cfg.dims[m], cfg.conv_dim, rng));
        // Nonzero offset: the matrix-literal mix is even in its input, so a zero
        // bias would square away the sign of the projected features.
        p.store.add(frontend_path(m, "bias"), Tensor2(1, cfg.conv_dim, kFrontendBiasInit));
    }
    add_hybrid_attention_params(p.store, "hybrid", frontend_widths(cfg), cfg.d, cfg.k, rng);
    p.store.add("head.fc1.weight", glorot_uniform(cfg.d * cfg.k, cfg.hidden, rng));
    p.store.add("head.fc1.bias", Tensor2(1, cfg.hidden));
    p.store.add("head.fc2.weight", glorot_uniform(cfg.hidden, 1, rng));
    p.store.add("head.fc2.bias", Tensor2(1, 1));
    return p;
}

ModelParams ModelParams::zeros(const ModelConfig& cfg) {
    ModelParams p = init(cfg, 0);
    for (auto& [path, e] : p.store) std::fill(e.value.data().begin(), e.value.data().end(), 0.0);
    return p;
}

AmrfParams ModelParams::fusion_block(const std::string& name) const {
    return AmrfParams::extract(store, "hybrid." + name);
}

Var forward(Tape& tape, const Sample& sample, ModelParams& params) {
    const ModelConfig& cfg = params.config;
    std::array<Var, 4> features;
    for (Modality m : kModalities) {
        const Tensor2& seq = sample.sequence(m);
        if (seq.rows() == 0) {
            throw ContractError("sample '" + sample.id + "': modality '" + std::string(to_string(m)) + "' is missing");
        }
        if (seq.cols() != cfg.dims[m]) {
            throw DimensionError("sample '" + sample.id + "': modality '" + std::string(to_string(m)) +
                                 "' has width " + std::to_string(seq.cols()) + ", model expects " +
                                 std::to_string(cfg.dims[m]));
        }
        features[static_cast<std::size_t>(m)] =
            temporal_conv1d_meanpool(tape.constant(seq), tape.param(params.store, frontend_path(m, "kernel")),
                                     tape.param(params.store, frontend_path(m, "bias")));
    }
    const auto hybrid = HybridAttentionNodes::bind(tape, params.store, "hybrid");
    Var fused = hybrid_attention(features[0], features[1], features[2], features[3], hybrid, cfg.variant);
    Var flat = reshape(fused, 1, fused.rows() * fused.cols());
    Var hidden = sigmoid(add(matmul(flat, tape.param(params.store, "head.fc1.weight")),
                             tape.param(params.store, "head.fc1.bias")));
    Var logit = add(matmul(hidden, tape.param(params.store, "head.fc2.weight")),
                    tape.param(params.store, "head.fc2.bias"));
    return sigmoid(logit);
}

double predict(const Sample& sample, const ModelParams& params) {
    Tape tape;
    // forward() only reads the store; gradients are never requested here.
    return forward(tape, sample, const_cast<ModelParams&>(params)).value().item();
}

Var sample_loss(Tape& tape, const Sample& sample, ModelParams& params) {
    return focal_loss(forward(tape, sample, params), sample.label, params.config.gamma);
}

double loss_and_grads(std::span<const Sample* const> batch, ModelParams& params) {
    if (batch.empty()) throw ContractError("loss_and_grads: empty batch");
    std::vector<const Sample*> ordered(batch.begin(), batch.end());
    std::stable_sort(ordered.begin(), ordered.end(), [](const Sample* a, const Sample* b) { return a->id < b->id; });

    params.store.zero_grads();
    Tape tape;
    Var total = sample_loss(tape, *ordered.front(), params);
    for (std::size_t i = 1; i < ordered.size(); ++i) total = add(total, sample_loss(tape, *ordered[i], params));
    Var mean = scale(total, 1.0 / static_cast<double>(ordered.size()));
    tape.backward(mean);
    return mean.value().item();
}

std::vector<std::pair<std::string, std::string>> model_config_entries(const ModelConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    for (Modality m : kModalities) out.emplace_back("model.dims." + std::string(to_string(m)), std::to_string(cfg.dims[m]));
    out.emplace_back("model.window", std::to_string(cfg.window));
    out.emplace_back("model.conv_dim", std::to_string(cfg.conv_dim));
    out.emplace_back("model.d", std::to_string(cfg.d));
    out.emplace_back("model.k", std::to_string(cfg.k));
    out.emplace_back("model.hidden", std::to_string(cfg.hidden));
    out.emplace_back("model.gamma", format_double(cfg.gamma));
    out.emplace_back("amrf.variant", std::string(to_string(cfg.variant)));
    return out;
}

bool apply_model_config_entry(ModelConfig& cfg, const std::string& key, const std::string& value) {
    constexpr std::string_view dims_prefix = "model.dims.";
    if (key.starts_with(dims_prefix)) {
        cfg.dims[parse_modality(std::string_view(key).substr(dims_prefix.size()))] = parse_unsigned(value, key);
    } else if (key == "model.window") {
        cfg.window = parse_unsigned(value, key);
    } else if (key == "model.conv_dim") {
        cfg.conv_dim = parse_unsigned(value, key);
    } else if (key == "model.d") {
        cfg.d = parse_unsigned(value, key);
    } else if (key == "model.k") {
        cfg.k = parse_unsigned(value, key);
    } else if (key == "model.hidden") {
        cfg.hidden = parse_unsigned(value, key);
    } else if (key == "model.gamma") {
        cfg.gamma = parse_double(value, key);
    } else if (key == "amrf.variant") {
        cfg.variant = parse_mix_variant(trim(value));
    } else {
        return false;
    }
    return true;
}

namespace {

constexpr std::string_view kCheckpointMagic = "canamrf-checkpoint 1";

}  // namespace

void save_checkpoint(const ModelParams& params, std::ostream& out) {
    out << kCheckpointMagic << '\n';
    for (const auto& [key, value] : model_config_entries(params.config)) out << key << " = " << value << '\n';
    for (const auto& [path, e] : params.store) {
        out << "param " << path << ' ' << e.value.rows() << ' ' << e.value.cols() << '\n';
        for (std::size_t i = 0; i < e.value.size(); ++i) out << (i == 0 ? "" : " ") << format_double(e.value[i]);
        out << '\n';
    }
}

void save_checkpoint(const ModelParams& params, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path.string() + "' for writing");
    save_checkpoint(params, out);
    if (!out) throw ParseError("failed writing '" + path.string() + "'");
}

ModelParams load_checkpoint(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& msg) { return ParseError("line " + std::to_string(line_no) + ": " + msg); };

    if (!std::getline(in, line) || trim(line) != kCheckpointMagic) {
        line_no = 1;
        throw fail("not a canamrf checkpoint");
    }
    ++line_no;
    ModelConfig cfg;
    std::vector<std::pair<std::string, Tensor2>> tensors;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view t = trim(line);
        if (t.empty()) continue;
        if (t.starts_with("param ")) {
            std::istringstream header{std::string(t.substr(6))};
            std::string path;
            std::string rows_text;
            std::string cols_text;
            if (!(header >> path >> rows_text >> cols_text)) throw fail("malformed param header");
            const std::size_t rows = parse_unsigned(rows_text, "rows");
            const std::size_t cols = parse_unsigned(cols_text, "cols");
            if (!std::getline(in, line)) throw fail("missing values for '" + path + "'");
            ++line_no;
            std::istringstream values(line);
            std::vector<double> data;
            data.reserve(rows * cols);
            std::string tok;
            try {
                while (values >> tok) data.push_back(parse_double(tok, path));
            } catch (const ParseError& e) {
                throw fail(e.what());
            }
            if (data.size() != rows * cols) {
                throw fail("'" + path + "' expects " + std::to_string(rows * cols) + " values, found " +
                           std::to_string(data.size()));
            }
            tensors.emplace_back(path, Tensor2(rows, cols, std::move(data)));
            continue;
        }
        if (!tensors.empty()) throw fail("config entry after parameters");
        const auto eq = t.find('=');
        if (eq == std::string_view::npos) throw fail("expected 'key = value'");
        const std::string key(trim(t.substr(0, eq)));
        try {
            if (!apply_model_config_entry(cfg, key, std::string(trim(t.substr(eq + 1))))) {
                throw fail("unknown config key '" + key + "'");
            }
        } catch (const ConfigError& e) {
            throw fail(e.what());
        } catch (const ParseError& e) {
            throw fail(e.what());
        }
    }

    ModelParams params = ModelParams::zeros(cfg);
    if (tensors.size() != params.store.size()) {
        throw ParseError("checkpoint holds " + std::to_string(tensors.size()) + " parameters, model expects " +
                         std::to_string(params.store.size()));
    }
    for (auto& [path, value] : tensors) {
        if (!params.store.contains(path)) throw ParseError("checkpoint has unexpected parameter '" + path + "'");
        try {
            params.store.set(path, std::move(value));
        } catch (const DimensionError& e) {
            throw ParseError(e.what());
        }
    }
    return params;
}

ModelParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open checkpoint '" + path.string() + "'");
    try {
        return load_checkpoint(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace canamrf
