#include "canamrf/ops.hpp"

#include <algorithm>
#include <cmath>

#include "canamrf/errors.hpp"

namespace canamrf {

namespace {

Tape& tape_of(Var a, Var b, const char* op) {
    if (a.tape == nullptr || a.tape != b.tape) throw ContractError(std::string(op) + ": operands on different tapes");
    return *a.tape;
}

Tape& tape_of(Var a, const char* op) {
    if (a.tape == nullptr) throw ContractError(std::string(op) + ": unbound operand");
    return *a.tape;
}

}  // namespace

Var matmul(Var a, Var b) {
    Tape& t = tape_of(a, b, "matmul");
    Tensor2 out = matmul(a.value(), b.value());
    return t.record("matmul", {a, b}, std::move(out),
                    [](const Tensor2& g, std::span<const Tensor2* const> in, const Tensor2&) {
                        std::vector<Tensor2> adj;
                        adj.push_back(matmul(g, transpose(*in[1])));
                        adj.push_back(matmul(transpose(*in[0]), g));
                        return adj;
                    });
}

Var transpose(Var a) {
    Tape& t = tape_of(a, "transpose");
    return t.record("transpose", {a}, transpose(a.value()),
                    [](const Tensor2& g, std::span<const Tensor2* const>, const Tensor2&) {
                        return std::vector<Tensor2>{transpose(g)};
                    });
}

Var add(Var a, Var b) {
    Tape& t = tape_of(a, b, "add");
    return t.record("add", {a, b}, add(a.value(), b.value()),
                    [](const Tensor2& g, std::span<const Tensor2* const>, const Tensor2&) {
                        return std::vector<Tensor2>{g, g};
                    });
}

Var mul(Var a, Var b) {
    Tape& t = tape_of(a, b, "mul");
    return t.record("mul", {a, b}, mul(a.value(), b.value()),
                    [](const Tensor2& g, std::span<const Tensor2* const> in, const Tensor2&) {
                        return std::vector<Tensor2>{mul(g, *in[1]), mul(g, *in[0])};
                    });
}

Var scale(Var a, double s) {
    Tape& t = tape_of(a, "scale");
    return t.record("scale", {a}, scale(a.value(), s),
                    [s](const Tensor2& g, std::span<const Tensor2* const>, const Tensor2&) {
                        return std::vector<Tensor2>{scale(g, s)};
                    });
}

Var scale_by(Var s, Var m) {
    Tape& t = tape_of(s, m, "scale_by");
    const double sv = s.value().item();
    return t.record("scale_by", {s, m}, scale(m.value(), sv),
                    [](const Tensor2& g, std::span<const Tensor2* const> in, const Tensor2&) {
                        double ds = 0.0;
                        for (std::size_t i = 0; i < g.size(); ++i) ds += g[i] * (*in[1])[i];
                        return std::vector<Tensor2>{Tensor2::scalar(ds), scale(g, (*in[0])[0])};
                    });
}

Var sigmoid(Var a) {
    Tape& t = tape_of(a, "sigmoid");
    return t.record("sigmoid", {a}, sigmoid(a.value()),
                    [](const Tensor2& g, std::span<const Tensor2* const>, const Tensor2& y) {
                        Tensor2 adj = g;
                        for (std::size_t i = 0; i < adj.size(); ++i) adj[i] *= y[i] * (1.0 - y[i]);
                        return std::vector<Tensor2>{std::move(adj)};
                    });
}

Var softmax_rows(Var m) {
    Tape& t = tape_of(m, "softmax_rows");
    return t.record("softmax_rows", {m}, softmax_rows(m.value()),
                    [](const Tensor2& g, std::span<const Tensor2* const>, const Tensor2& y) {
                        Tensor2 adj(y.rows(), y.cols());
                        for (std::size_t i = 0; i < y.rows(); ++i) {
                            double dot = 0.0;
                            for (std::size_t j = 0; j < y.cols(); ++j) dot += g(i, j) * y(i, j);
                            for (std::size_t j = 0; j < y.cols(); ++j) adj(i, j) = y(i, j) * (g(i, j) - dot);
                        }
                        return std::vector<Tensor2>{std::move(adj)};
                    });
}

Var sum(Var a) {
    Tape& t = tape_of(a, "sum");
    return t.record("sum", {a}, Tensor2::scalar(sum(a.value())),
                    [](const Tensor2& g, std::span<const Tensor2* const> in, const Tensor2&) {
                        return std::vector<Tensor2>{Tensor2(in[0]->rows(), in[0]->cols(), g[0])};
                    });
}

Var reshape(Var a, std::size_t rows, std::size_t cols) {
    Tape& t = tape_of(a, "reshape");
    return t.record("reshape", {a}, a.value().reshaped(rows, cols),
                    [](const Tensor2& g, std::span<const Tensor2* const> in, const Tensor2&) {
                        return std::vector<Tensor2>{g.reshaped(in[0]->rows(), in[0]->cols())};
                    });
}

Tensor2 recur(const Tensor2& v) {
    if (v.rows() != 1 || v.cols() == 0) {
        throw ContractError("recur: expected a non-empty 1xd row vector, got " + v.shape_string());
    }
    const std::size_t d = v.cols();
    Tensor2 out(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) out(i, j) = v[(i + j) % d];
    return out;
}

Var recur(Var v) {
    Tape& t = tape_of(v, "recur");
    return t.record("recur", {v}, recur(v.value()),
                    [](const Tensor2& g, std::span<const Tensor2* const>, const Tensor2&) {
                        const std::size_t d = g.rows();
                        Tensor2 adj(1, d);
                        for (std::size_t i = 0; i < d; ++i)
                            for (std::size_t j = 0; j < d; ++j) adj[(i + j) % d] += g(i, j);
                        return std::vector<Tensor2>{std::move(adj)};
                    });
}

Var temporal_conv1d_meanpool(Var seq, Var kernel, Var bias) {
    Tape& t = tape_of(seq, kernel, "temporal_conv1d_meanpool");
    tape_of(seq, bias, "temporal_conv1d_meanpool");
    const Tensor2& x = seq.value();
    const Tensor2& k = kernel.value();
    const Tensor2& b = bias.value();
    const std::size_t steps = x.rows();
    const std::size_t f = x.cols();
    if (steps == 0 || f == 0) throw ContractError("temporal_conv1d_meanpool: empty input sequence");
    if (k.rows() == 0 || k.rows() % f != 0) {
        throw DimensionError("temporal_conv1d_meanpool: kernel " + k.shape_string() +
                             " is not (window*features) x channels for sequence " + x.shape_string());
    }
    if (b.rows() != 1 || b.cols() != k.cols()) {
        throw DimensionError("temporal_conv1d_meanpool: bias " + b.shape_string() + " does not match kernel " +
                             k.shape_string());
    }
    const std::size_t window = k.rows() / f;
    const std::size_t pad_front = (window - 1) / 2;

    // pooled[j*f + c] = mean over windows of the value at window slot j, channel c.
    Tensor2 pooled(1, window * f);
    for (std::size_t pos = 0; pos < steps; ++pos) {
        for (std::size_t j = 0; j < window; ++j) {
            const std::size_t src = pos + j;
            if (src < pad_front || src - pad_front >= steps) continue;
            const auto row = x.row_span(src - pad_front);
            for (std::size_t c = 0; c < f; ++c) pooled[j * f + c] += row[c];
        }
    }
    const double inv_steps = 1.0 / static_cast<double>(steps);
    for (double& v : pooled.data()) v *= inv_steps;

    Tensor2 out = add(matmul(pooled, k), b);
    return t.record(
        "temporal_conv1d_meanpool", {seq, kernel, bias}, std::move(out),
        [pooled = std::move(pooled), window, pad_front, inv_steps](
            const Tensor2& g, std::span<const Tensor2* const> in, const Tensor2&) {
            const Tensor2& xs = *in[0];
            const Tensor2& ker = *in[1];
            const std::size_t n = xs.rows();
            const std::size_t nf = xs.cols();
            Tensor2 g_pooled = matmul(g, transpose(ker));
            Tensor2 g_seq(n, nf);
            for (std::size_t pos = 0; pos < n; ++pos) {
                for (std::size_t j = 0; j < window; ++j) {
                    const std::size_t src = pos + j;
                    if (src < pad_front || src - pad_front >= n) continue;
                    for (std::size_t c = 0; c < nf; ++c) g_seq(src - pad_front, c) += g_pooled[j * nf + c] * inv_steps;
                }
            }
            return std::vector<Tensor2>{std::move(g_seq), matmul(transpose(pooled), g), g};
        });
}

double focal_loss(double y_hat, int label, double gamma) {
    if (!(gamma >= 0.0)) throw ConfigError("focal loss gamma must be >= 0, got " + std::to_string(gamma));
    if (label != 0 && label != 1) throw ContractError("focal loss label must be 0 or 1");
    const double p = label == 1 ? y_hat : 1.0 - y_hat;
    const double focus = gamma == 0.0 ? 1.0 : std::pow(1.0 - p, gamma);
    return -focus * std::log(std::max(p, kFocalLogFloor));
}

Var focal_loss(Var y_hat, int label, double gamma) {
    Tape& t = tape_of(y_hat, "focal_loss");
    const double value = focal_loss(y_hat.value().item(), label, gamma);
    return t.record("focal_loss", {y_hat}, Tensor2::scalar(value),
                    [label, gamma](const Tensor2& g, std::span<const Tensor2* const> in, const Tensor2&) {
                        const double y = (*in[0])[0];
                        const double p = label == 1 ? y : 1.0 - y;
                        const double q = 1.0 - p;
                        const bool floored = p < kFocalLogFloor;
                        const double log_p = std::log(std::max(p, kFocalLogFloor));
                        double dp = 0.0;
                        if (gamma != 0.0 && q > 0.0) dp += gamma * std::pow(q, gamma - 1.0) * log_p;
                        if (!floored) dp -= (gamma == 0.0 ? 1.0 : std::pow(q, gamma)) / p;
                        const double dy = label == 1 ? dp : -dp;
                        return std::vector<Tensor2>{Tensor2::scalar(g[0] * dy)};
                    });
}

}  // namespace canamrf
