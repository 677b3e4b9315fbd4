#pragma once

#include <random>
#include <string>
#include <string_view>
#include <utility>

#include "canamrf/autodiff.hpp"

namespace canamrf {

/// How a projected vector is mixed with its circulant matrix before fusion.
///
/// - MatrixLiteral: (1/d) * sum_i (row_i(A) broadcast over A) = mean(X) * A, a d x d matrix.
/// - ScalarElementwise: (1/d) * sum_i (row_i(A) .* X) = mean(X) * X, a 1 x d vector.
/// - CorrSelf: out_i = (1/d) * <row_i(A), X>.
/// - CorrCross: out_i = (1/d) * <row_i(A), other>.
enum class MixVariant { MatrixLiteral, ScalarElementwise, CorrSelf, CorrCross };

/// Config spellings: matrix_literal, scalar_elementwise, corr_self, corr_cross.
MixVariant parse_mix_variant(std::string_view name);
std::string_view to_string(MixVariant v);

/// Learnables of one fusion block. The first input has m features, the
/// second (always text-side) n; both are projected to d and the fused d x d
/// matrix is mapped to d x k.
struct AmrfParams {
    Tensor2 w1;           // d x m
    Tensor2 w2;           // d x n
    Tensor2 w3;           // d x k
    Tensor2 alpha_logit;  // 1 x 1
    Tensor2 beta_logit;   // 1 x 1

    /// Glorot-uniform projections, zero logits (alpha = beta = 0.5).
    /// Throws ConfigError unless 1 <= d <= min(m, n) and k >= 1.
    static AmrfParams init(std::size_t m, std::size_t n, std::size_t d, std::size_t k, std::mt19937_64& rng);
    static AmrfParams zeros(std::size_t m, std::size_t n, std::size_t d, std::size_t k);
    static AmrfParams extract(const ParamStore& store, const std::string& prefix);

    void add_to(ParamStore& store, const std::string& prefix) const;
    double alpha() const;
    double beta() const;
};

/// Tape handles for an AmrfParams set.
struct AmrfNodes {
    Var w1, w2, w3, alpha_logit, beta_logit;

    static AmrfNodes bind(Tape& tape, ParamStore& store, const std::string& prefix);
    static AmrfNodes constant(Tape& tape, const AmrfParams& p);
};

/// X = x W1^T, Y = y W2^T.
std::pair<Var, Var> project_pair(Var x, Var y, const AmrfNodes& p);

/// `other` is only read by CorrCross.
Var mix(Var projected, Var other, MixVariant variant);

/// (sigmoid(alpha_logit) * xp + sigmoid(beta_logit) * yp) W3.
Var adaptive_fuse(Var xp, Var yp, const AmrfNodes& p);

/// Full block: project, mix, fuse. The text-side features go in `x_text`
/// (weighted by beta). Vector-valued mixes are lifted back to d x d with
/// recur() so the result is d x k for every variant.
Var amrf(Var x_other, Var x_text, const AmrfNodes& p, MixVariant variant);

Tensor2 glorot_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng);

}  // namespace canamrf
