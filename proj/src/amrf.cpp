#include "canamrf/amrf.hpp"

#include <algorithm>
#include <cmath>

#include "canamrf/errors.hpp"
#include "canamrf/ops.hpp"

namespace canamrf {

MixVariant parse_mix_variant(std::string_view name) {
    if (name == "matrix_literal") return MixVariant::MatrixLiteral;
    if (name == "scalar_elementwise") return MixVariant::ScalarElementwise;
    if (name == "corr_self") return MixVariant::CorrSelf;
    if (name == "corr_cross") return MixVariant::CorrCross;
    throw ConfigError("unknown amrf.variant '" + std::string(name) +
                      "' (expected matrix_literal, scalar_elementwise, corr_self or corr_cross)");
}

std::string_view to_string(MixVariant v) {
    switch (v) {
        case MixVariant::MatrixLiteral: return "matrix_literal";
        case MixVariant::ScalarElementwise: return "scalar_elementwise";
        case MixVariant::CorrSelf: return "corr_self";
        case MixVariant::CorrCross: return "corr_cross";
    }
    return "?";
}

Tensor2 glorot_uniform(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Tensor2 t(rows, cols);
    for (double& v : t.data()) v = dist(rng);
    return t;
}

namespace {

void check_block_dims(std::size_t m, std::size_t n, std::size_t d, std::size_t k) {
    if (d == 0 || k == 0) throw ConfigError("fusion block dimensions d and k must be >= 1");
    if (d > std::min(m, n)) {
        throw ConfigError("fusion block needs d <= min(m, n), got d=" + std::to_string(d) + " m=" +
                          std::to_string(m) + " n=" + std::to_string(n));
    }
}

}  // namespace

AmrfParams AmrfParams::init(std::size_t m, std::size_t n, std::size_t d, std::size_t k, std::mt19937_64& rng) {
    check_block_dims(m, n, d, k);
    AmrfParams p;
    p.w1 = glorot_uniform(d, m, rng);
    p.w2 = glorot_uniform(d, n, rng);
    p.w3 = glorot_uniform(d, k, rng);
    p.alpha_logit = Tensor2::scalar(0.0);
    p.beta_logit = Tensor2::scalar(0.0);
    return p;
}

AmrfParams AmrfParams::zeros(std::size_t m, std::size_t n, std::size_t d, std::size_t k) {
    check_block_dims(m, n, d, k);
    return AmrfParams{Tensor2(d, m), Tensor2(d, n), Tensor2(d, k), Tensor2::scalar(0.0), Tensor2::scalar(0.0)};
}

AmrfParams AmrfParams::extract(const ParamStore& store, const std::string& prefix) {
    return AmrfParams{store.value(prefix + ".W1"), store.value(prefix + ".W2"), store.value(prefix + ".W3"),
                      store.value(prefix + ".alpha_logit"), store.value(prefix + ".beta_logit")};
}

void AmrfParams::add_to(ParamStore& store, const std::string& prefix) const {
    store.add(prefix + ".W1", w1);
    store.add(prefix + ".W2", w2);
    store.add(prefix + ".W3", w3);
    store.add(prefix + ".alpha_logit", alpha_logit);
    store.add(prefix + ".beta_logit", beta_logit);
}

double AmrfParams::alpha() const { return stable_sigmoid(alpha_logit.item()); }
double AmrfParams::beta() const { return stable_sigmoid(beta_logit.item()); }

AmrfNodes AmrfNodes::bind(Tape& tape, ParamStore& store, const std::string& prefix) {
    return AmrfNodes{tape.param(store, prefix + ".W1"), tape.param(store, prefix + ".W2"),
                     tape.param(store, prefix + ".W3"), tape.param(store, prefix + ".alpha_logit"),
                     tape.param(store, prefix + ".beta_logit")};
}

AmrfNodes AmrfNodes::constant(Tape& tape, const AmrfParams& p) {
    return AmrfNodes{tape.constant(p.w1), tape.constant(p.w2), tape.constant(p.w3), tape.constant(p.alpha_logit),
                     tape.constant(p.beta_logit)};
}

std::pair<Var, Var> project_pair(Var x, Var y, const AmrfNodes& p) {
    if (x.rows() != 1 || x.cols() != p.w1.cols()) {
        throw DimensionError("projection W1 is " + p.w1.value().shape_string() + " but input is " +
                             x.value().shape_string());
    }
    if (y.rows() != 1 || y.cols() != p.w2.cols()) {
        throw DimensionError("projection W2 is " + p.w2.value().shape_string() + " but input is " +
                             y.value().shape_string());
    }
    if (p.w1.rows() != p.w2.rows()) {
        throw DimensionError("projections W1 " + p.w1.value().shape_string() + " and W2 " +
                             p.w2.value().shape_string() + " disagree on the common dimension");
    }
    return {matmul(x, transpose(p.w1)), matmul(y, transpose(p.w2))};
}

Var mix(Var projected, Var other, MixVariant variant) {
    const std::size_t d = projected.cols();
    if (projected.rows() != 1 || d == 0) {
        throw DimensionError("mix: expected a 1xd vector, got " + projected.value().shape_string());
    }
    const double inv_d = 1.0 / static_cast<double>(d);
    switch (variant) {
        case MixVariant::MatrixLiteral:
            return scale_by(scale(sum(projected), inv_d), recur(projected));
        case MixVariant::ScalarElementwise:
            return scale_by(scale(sum(projected), inv_d), projected);
        case MixVariant::CorrSelf:
            return scale(transpose(matmul(recur(projected), transpose(projected))), inv_d);
        case MixVariant::CorrCross:
            if (!other.value().same_shape(projected.value())) {
                throw DimensionError("mix corr_cross: length mismatch " + projected.value().shape_string() + " vs " +
                                     other.value().shape_string());
            }
            return scale(transpose(matmul(recur(projected), transpose(other))), inv_d);
    }
    throw ContractError("mix: unknown variant");
}

Var adaptive_fuse(Var xp, Var yp, const AmrfNodes& p) {
    require_same_shape(xp.value(), yp.value(), "adaptive_fuse");
    if (xp.cols() != p.w3.rows()) {
        throw DimensionError("adaptive_fuse: W3 is " + p.w3.value().shape_string() + " but fused operand is " +
                             xp.value().shape_string());
    }
    Var weighted = add(scale_by(sigmoid(p.alpha_logit), xp), scale_by(sigmoid(p.beta_logit), yp));
    return matmul(weighted, p.w3);
}

Var amrf(Var x_other, Var x_text, const AmrfNodes& p, MixVariant variant) {
    auto [x, y] = project_pair(x_other, x_text, p);
    Var xm = mix(x, y, variant);
    Var ym = mix(y, x, variant);
    if (variant != MixVariant::MatrixLiteral) {
        xm = recur(xm);
        ym = recur(ym);
    }
    return adaptive_fuse(xm, ym, p);
}

}  // namespace canamrf
