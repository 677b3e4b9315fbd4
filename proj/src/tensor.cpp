#include "canamrf/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "canamrf/errors.hpp"

namespace canamrf {

Tensor2::Tensor2(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor2::Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                             " does not match shape " + shape_string());
    }
}

Tensor2::Tensor2(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("ragged tensor literal");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Tensor2 Tensor2::identity(std::size_t n) {
    Tensor2 t(n, n);
    for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
    return t;
}

Tensor2 Tensor2::row(std::span<const double> values) {
    return Tensor2(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

double Tensor2::item() const {
    if (rows_ != 1 || cols_ != 1) throw ContractError("expected a 1x1 tensor, got " + shape_string());
    return data_[0];
}

bool Tensor2::all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Tensor2 Tensor2::reshaped(std::size_t rows, std::size_t cols) const {
    if (rows * cols != data_.size()) {
        throw DimensionError("cannot reshape " + shape_string() + " to " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
    return Tensor2(rows, cols, data_);
}

std::string Tensor2::shape_string() const {
    return std::to_string(rows_) + "x" + std::to_string(cols_);
}

void require_same_shape(const Tensor2& a, const Tensor2& b, const char* what) {
    if (!a.same_shape(b)) {
        throw DimensionError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                             b.shape_string());
    }
}

Tensor2 matmul(const Tensor2& a, const Tensor2& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("matmul: cannot multiply " + a.shape_string() + " by " + b.shape_string());
    }
    Tensor2 out(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* orow = out.data().data() + i * n;
        for (std::size_t p = 0; p < a.cols(); ++p) {
            const double av = a(i, p);
            if (av == 0.0) continue;
            const double* brow = b.data().data() + p * n;
            for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
    return out;
}

Tensor2 transpose(const Tensor2& a) {
    Tensor2 out(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
    return out;
}

Tensor2 add(const Tensor2& a, const Tensor2& b) {
    require_same_shape(a, b, "add");
    Tensor2 out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

Tensor2 mul(const Tensor2& a, const Tensor2& b) {
    require_same_shape(a, b, "mul");
    Tensor2 out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
    return out;
}

Tensor2 scale(const Tensor2& a, double s) {
    Tensor2 out = a;
    for (double& v : out.data()) v *= s;
    return out;
}

void add_inplace(Tensor2& acc, const Tensor2& b) {
    require_same_shape(acc, b, "accumulate");
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += b[i];
}

double sum(const Tensor2& a) {
    double s = 0.0;
    for (double v : a.data()) s += v;
    return s;
}

double frobenius_norm(const Tensor2& a) {
    double s = 0.0;
    for (double v : a.data()) s += v * v;
    return std::sqrt(s);
}

double stable_sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

Tensor2 sigmoid(const Tensor2& a) {
    Tensor2 out = a;
    for (double& v : out.data()) v = stable_sigmoid(v);
    return out;
}

Tensor2 softmax_rows(const Tensor2& m) {
    Tensor2 out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto row = m.row_span(i);
        if (row.empty()) continue;
        const double mx = *std::max_element(row.begin(), row.end());
        double z = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            out(i, j) = std::exp(row[j] - mx);
            z += out(i, j);
        }
        for (std::size_t j = 0; j < row.size(); ++j) out(i, j) /= z;
    }
    return out;
}

}  // namespace canamrf
