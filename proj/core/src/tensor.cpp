#include "sdm/tensor.hpp"

#include <cmath>
#include <string>

#include "sdm/errors.hpp"

namespace sdm {

namespace {
void require_same_shape(const Tensor2& a, const Tensor2& b, const char* op) {
    if (!a.same_shape(b)) {
        throw ShapeError(std::string(op) + ": shape mismatch (" + std::to_string(a.rows) + "x" +
                         std::to_string(a.cols) + " vs " + std::to_string(b.rows) + "x" +
                         std::to_string(b.cols) + ")");
    }
}
} // namespace

Tensor2 operator+(const Tensor2& a, const Tensor2& b) {
    require_same_shape(a, b, "add");
    Tensor2 c = a;
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] += b.data[i];
    return c;
}

Tensor2 operator-(const Tensor2& a, const Tensor2& b) {
    require_same_shape(a, b, "sub");
    Tensor2 c = a;
    for (std::size_t i = 0; i < c.data.size(); ++i) c.data[i] -= b.data[i];
    return c;
}

Tensor2& operator+=(Tensor2& a, const Tensor2& b) {
    require_same_shape(a, b, "add_assign");
    for (std::size_t i = 0; i < a.data.size(); ++i) a.data[i] += b.data[i];
    return a;
}

Tensor2 scaled(const Tensor2& a, double s) {
    Tensor2 c = a;
    for (double& v : c.data) v *= s;
    return c;
}

Tensor2 matmul_nt(const Tensor2& a, const Tensor2& b) {
    if (a.cols != b.cols) {
        throw ShapeError("matmul_nt: inner dim mismatch (" + std::to_string(a.cols) + " vs " +
                         std::to_string(b.cols) + ")");
    }
    Tensor2 c(a.rows, b.rows);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t j = 0; j < b.rows; ++j) {
            const double* bj = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols; ++k) acc += ai[k] * bj[k];
            ci[j] = acc;
        }
    }
    return c;
}

Tensor2 matmul_tn(const Tensor2& a, const Tensor2& b) {
    if (a.rows != b.rows) {
        throw ShapeError("matmul_tn: outer dim mismatch (" + std::to_string(a.rows) + " vs " +
                         std::to_string(b.rows) + ")");
    }
    Tensor2 c(a.cols, b.cols);
    for (std::size_t n = 0; n < a.rows; ++n) {
        const double* an = a.row(n);
        const double* bn = b.row(n);
        for (std::size_t i = 0; i < a.cols; ++i) {
            double* ci = c.row(i);
            const double av = an[i];
            if (av == 0.0) continue;
            for (std::size_t j = 0; j < b.cols; ++j) ci[j] += av * bn[j];
        }
    }
    return c;
}

Tensor2 matmul_nn(const Tensor2& a, const Tensor2& b) {
    if (a.cols != b.rows) {
        throw ShapeError("matmul_nn: inner dim mismatch (" + std::to_string(a.cols) + " vs " +
                         std::to_string(b.rows) + ")");
    }
    Tensor2 c(a.rows, b.cols);
    for (std::size_t i = 0; i < a.rows; ++i) {
        const double* ai = a.row(i);
        double* ci = c.row(i);
        for (std::size_t k = 0; k < a.cols; ++k) {
            const double av = ai[k];
            if (av == 0.0) continue;
            const double* bk = b.row(k);
            for (std::size_t j = 0; j < b.cols; ++j) ci[j] += av * bk[j];
        }
    }
    return c;
}

void check_finite(const Tensor2& t, const char* what) {
    for (double v : t.data) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string("non-finite value in ") + what);
        }
    }
}

} // namespace sdm
