#pragma once

#include <random>
#include <string>

#include "canamrf/amrf.hpp"

namespace canamrf {

/// softmax_rows(q k^T / sqrt(k.cols())) as a plain tensor.
Tensor2 attention_weights(const Tensor2& q, const Tensor2& k);

/// Scaled dot-product attention, softmax_rows(q k^T / sqrt(cols)) v. q, k and v
/// must all be d x c with the same c; the scaling uses c.
Var cross_modal_attention(Var q, Var k, Var v);

struct SelfAttentionParams {
    Tensor2 wq, wk, wv;  // k x k each

    static SelfAttentionParams init(std::size_t k, std::mt19937_64& rng);
    void add_to(ParamStore& store, const std::string& prefix) const;
};

struct SelfAttentionNodes {
    Var wq, wk, wv;

    static SelfAttentionNodes bind(Tape& tape, ParamStore& store, const std::string& prefix);
    static SelfAttentionNodes constant(Tape& tape, const SelfAttentionParams& p);
};

/// cross_modal_attention(x wq, x wk, x wv).
Var self_attention(Var x, const SelfAttentionNodes& p);

/// Input widths of the four modality vectors fed to the hybrid module.
struct ModalityWidths {
    std::size_t text = 0;
    std::size_t audio = 0;
    std::size_t visual = 0;
    std::size_t sentiment = 0;
};

/// Parameter layout under a prefix:
///   <prefix>.amrf_st / amrf_vt / amrf_at   blocks fusing sentiment, visual, audio with text
///   <prefix>.amrf_final                    block fusing the two attention outputs (flattened, d*k wide)
///   <prefix>.self_attn.{Wq,Wk,Wv}
void add_hybrid_attention_params(ParamStore& store, const std::string& prefix, const ModalityWidths& widths,
                                 std::size_t d, std::size_t k, std::mt19937_64& rng);

struct HybridAttentionNodes {
    AmrfNodes st, vt, at, final_block;
    SelfAttentionNodes self_attn;

    static HybridAttentionNodes bind(Tape& tape, ParamStore& store, const std::string& prefix);
};

/// Text-anchored hybrid attention:
///   q    = amrf(sentiment, text)
///   x_vt = amrf(visual, text),  x_at = amrf(audio, text)
///   z_at = attend(q, x_at, x_at),  z_vt = attend(q, x_vt, x_vt)
///   z_f  = self_attention(amrf(flatten(z_at), flatten(z_vt)) )
/// Returns z_f (d x k). Dimension errors are re-thrown prefixed with the
/// failing stage ("[query]", "[visual-text]", "[audio-text]", "[attend-audio]",
/// "[attend-visual]", "[final]").
Var hybrid_attention(Var x_text, Var x_audio, Var x_visual, Var x_sentiment, const HybridAttentionNodes& p,
                     MixVariant variant);

}  // namespace canamrf
