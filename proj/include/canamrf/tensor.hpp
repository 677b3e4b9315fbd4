#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace canamrf {

/// Dense row-major matrix of doubles. A 1 x n tensor doubles as a row vector.
class Tensor2 {
public:
    Tensor2() = default;
    Tensor2(std::size_t rows, std::size_t cols, double fill = 0.0);
    Tensor2(std::size_t rows, std::size_t cols, std::vector<double> data);
    Tensor2(std::initializer_list<std::initializer_list<double>> rows);

    static Tensor2 zeros(std::size_t rows, std::size_t cols) { return Tensor2(rows, cols); }
    static Tensor2 ones(std::size_t rows, std::size_t cols) { return Tensor2(rows, cols, 1.0); }
    static Tensor2 identity(std::size_t n);
    static Tensor2 row(std::span<const double> values);
    static Tensor2 scalar(double v) { return Tensor2(1, 1, v); }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }
    std::span<const double> row_span(std::size_t r) const {
        return std::span<const double>(data_).subspan(r * cols_, cols_);
    }

    /// Scalar value of a 1x1 tensor; throws ContractError otherwise.
    double item() const;
    bool same_shape(const Tensor2& other) const { return rows_ == other.rows_ && cols_ == other.cols_; }
    bool all_finite() const;
    Tensor2 reshaped(std::size_t rows, std::size_t cols) const;

    std::string shape_string() const;

    friend bool operator==(const Tensor2&, const Tensor2&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Plain value-level kernels. The differentiable versions in ops.hpp build on these.
Tensor2 matmul(const Tensor2& a, const Tensor2& b);
Tensor2 transpose(const Tensor2& a);
Tensor2 add(const Tensor2& a, const Tensor2& b);
Tensor2 mul(const Tensor2& a, const Tensor2& b);
Tensor2 scale(const Tensor2& a, double s);
void add_inplace(Tensor2& acc, const Tensor2& b);
double sum(const Tensor2& a);
double frobenius_norm(const Tensor2& a);
double stable_sigmoid(double x);
Tensor2 sigmoid(const Tensor2& a);
Tensor2 softmax_rows(const Tensor2& m);

/// Throws DimensionError naming both shapes unless a and b agree.
void require_same_shape(const Tensor2& a, const Tensor2& b, const char* what);

}  // namespace canamrf
