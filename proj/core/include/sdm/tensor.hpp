#pragma once

#include <cstddef>
#include <vector>

namespace sdm {

// Dense row-major matrix of doubles. Rows are samples, cols are features.
struct Tensor2 {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Tensor2() = default;
    Tensor2(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    double* row(std::size_t r) { return data.data() + r * cols; }
    const double* row(std::size_t r) const { return data.data() + r * cols; }

    std::size_t size() const { return data.size(); }

    bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }
};

// Shape-checked elementwise helpers. All throw ShapeError on mismatch.
Tensor2 operator+(const Tensor2& a, const Tensor2& b);
Tensor2 operator-(const Tensor2& a, const Tensor2& b);
Tensor2& operator+=(Tensor2& a, const Tensor2& b);
Tensor2 scaled(const Tensor2& a, double s);

// c = a @ b^T  (a: n x k, b: m x k) -> n x m
Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b);
// c = a^T @ b  (a: n x k, b: n x m) -> k x m
Tensor2 matmul_tn(const Tensor2& a, const Tensor2& b);
// c = a @ b    (a: n x k, b: k x m) -> n x m
Tensor2 matmul_nn(const Tensor2& a, const Tensor2& b);

// Throws NumericError naming `what` if any entry is NaN or Inf.
void check_finite(const Tensor2& t, const char* what);

} // namespace sdm
