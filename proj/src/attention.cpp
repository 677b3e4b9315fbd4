#include "canamrf/attention.hpp"

#include <cmath>

#include "canamrf/errors.hpp"
#include "canamrf/ops.hpp"

namespace canamrf {

Tensor2 attention_weights(const Tensor2& q, const Tensor2& k) {
    require_same_shape(q, k, "attention");
    return softmax_rows(scale(matmul(q, transpose(k)), 1.0 / std::sqrt(static_cast<double>(q.cols()))));
}

Var cross_modal_attention(Var q, Var k, Var v) {
    require_same_shape(q.value(), k.value(), "attention query/key");
    require_same_shape(k.value(), v.value(), "attention key/value");
    const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(q.cols()));
    Var weights = softmax_rows(scale(matmul(q, transpose(k)), inv_sqrt));
    return matmul(weights, v);
}

SelfAttentionParams SelfAttentionParams::init(std::size_t k, std::mt19937_64& rng) {
    SelfAttentionParams p;
    p.wq = glorot_uniform(k, k, rng);
    p.wk = glorot_uniform(k, k, rng);
    p.wv = glorot_uniform(k, k, rng);
    return p;
}

void SelfAttentionParams::add_to(ParamStore& store, const std::string& prefix) const {
    store.add(prefix + ".Wq", wq);
    store.add(prefix + ".Wk", wk);
    store.add(prefix + ".Wv", wv);
}

SelfAttentionNodes SelfAttentionNodes::bind(Tape& tape, ParamStore& store, const std::string& prefix) {
    return SelfAttentionNodes{tape.param(store, prefix + ".Wq"), tape.param(store, prefix + ".Wk"),
                              tape.param(store, prefix + ".Wv")};
}

SelfAttentionNodes SelfAttentionNodes::constant(Tape& tape, const SelfAttentionParams& p) {
    return SelfAttentionNodes{tape.constant(p.wq), tape.constant(p.wk), tape.constant(p.wv)};
}

Var self_attention(Var x, const SelfAttentionNodes& p) {
    return cross_modal_attention(matmul(x, p.wq), matmul(x, p.wk), matmul(x, p.wv));
}

void add_hybrid_attention_params(ParamStore& store, const std::string& prefix, const ModalityWidths& widths,
                                 std::size_t d, std::size_t k, std::mt19937_64& rng) {
    AmrfParams::init(widths.sentiment, widths.text, d, k, rng).add_to(store, prefix + ".amrf_st");
    AmrfParams::init(widths.visual, widths.text, d, k, rng).add_to(store, prefix + ".amrf_vt");
    AmrfParams::init(widths.audio, widths.text, d, k, rng).add_to(store, prefix + ".amrf_at");
    AmrfParams::init(d * k, d * k, d, k, rng).add_to(store, prefix + ".amrf_final");
    SelfAttentionParams::init(k, rng).add_to(store, prefix + ".self_attn");
}

HybridAttentionNodes HybridAttentionNodes::bind(Tape& tape, ParamStore& store, const std::string& prefix) {
    return HybridAttentionNodes{AmrfNodes::bind(tape, store, prefix + ".amrf_st"),
                                AmrfNodes::bind(tape, store, prefix + ".amrf_vt"),
                                AmrfNodes::bind(tape, store, prefix + ".amrf_at"),
                                AmrfNodes::bind(tape, store, prefix + ".amrf_final"),
                                SelfAttentionNodes::bind(tape, store, prefix + ".self_attn")};
}

namespace {

template <typename F>
Var stage(const char* label, F&& f) {
    try {
        return f();
    } catch (const DimensionError& e) {
        throw DimensionError(std::string(label) + " " + e.what());
    }
}

}  // namespace

Var hybrid_attention(Var x_text, Var x_audio, Var x_visual, Var x_sentiment, const HybridAttentionNodes& p,
                     MixVariant variant) {
    Var q = stage("[query]", [&] { return amrf(x_sentiment, x_text, p.st, variant); });
    Var x_vt = stage("[visual-text]", [&] { return amrf(x_visual, x_text, p.vt, variant); });
    Var x_at = stage("[audio-text]", [&] { return amrf(x_audio, x_text, p.at, variant); });
    Var z_at = stage("[attend-audio]", [&] { return cross_modal_attention(q, x_at, x_at); });
    Var z_vt = stage("[attend-visual]", [&] { return cross_modal_attention(q, x_vt, x_vt); });
    return stage("[final]", [&] {
        const std::size_t flat = z_at.rows() * z_at.cols();
        Var fused = amrf(reshape(z_at, 1, flat), reshape(z_vt, 1, flat), p.final_block, variant);
        return self_attention(fused, p.self_attn);
    });
}

}  // namespace canamrf
