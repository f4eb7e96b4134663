/*
 * Copyright 2026 putree contributors
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "putree/kernels.hpp"

#include <algorithm>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace putree::kernels {

namespace {

thread_local int g_thread_cap = 0;

int threads_for(std::size_t work) {
#ifdef _OPENMP
    if (work < 16384) return 1;  // not worth forking a team
    int n = g_thread_cap > 0 ? g_thread_cap : omp_get_max_threads();
    return std::max(1, n);
#else
    (void)work;
    return 1;
#endif
}

void check_gemm_nn(const Matrix& a, const Matrix& b, Matrix& c) {
    if (a.cols() != b.rows() || c.rows() != a.rows() || c.cols() != b.cols())
        throw dim_error("gemm_nn: shape mismatch");
}

void check_gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    if (a.rows() != b.rows() || c.rows() != a.cols() || c.cols() != b.cols())
        throw dim_error("gemm_tn: shape mismatch");
}

}  // namespace

void set_thread_cap(int n) { g_thread_cap = n; }
int thread_cap() { return g_thread_cap; }

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c) {
    check_gemm_nn(a, b, c);
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    const double* ap = a.data();
    const double* bp = b.data();
    double* cp = c.data();
    const int nt = threads_for(m * k * n);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
        double* crow = cp + i * n;
        std::fill(crow, crow + n, 0.0);
        const double* arow = ap + i * k;
        for (std::size_t kk = 0; kk < k; ++kk) {
            const double av = arow[kk];
            const double* brow = bp + kk * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    check_gemm_tn(a, b, c);
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    const double* ap = a.data();
    const double* bp = b.data();
    double* cp = c.data();
    const int nt = threads_for(m * k * n);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(k); ++i) {
        double* crow = cp + i * n;
        std::fill(crow, crow + n, 0.0);
        for (std::size_t r = 0; r < m; ++r) {
            const double av = ap[r * k + i];
            const double* brow = bp + r * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

Matrix transpose(const Matrix& a) {
    Matrix t(a.cols(), a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

void add_bias(Matrix& z, std::span<const double> bias) {
    if (bias.size() != z.cols()) throw dim_error("add_bias: width mismatch");
    const std::size_t m = z.rows(), n = z.cols();
    double* zp = z.data();
    const int nt = threads_for(m * n);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
        double* row = zp + i * n;
        for (std::size_t j = 0; j < n; ++j) row[j] += bias[j];
    }
}

void relu(const Matrix& z, Matrix& a) {
    if (z.rows() != a.rows() || z.cols() != a.cols()) throw dim_error("relu: shape mismatch");
    const std::size_t total = z.size();
    const double* zp = z.data();
    double* ap = a.data();
    const int nt = threads_for(total);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i)
        ap[i] = zp[i] > 0.0 ? zp[i] : 0.0;
}

void relu_backward(const Matrix& z, const Matrix& da, Matrix& dz) {
    if (z.size() != da.size() || z.size() != dz.size())
        throw dim_error("relu_backward: shape mismatch");
    const std::size_t total = z.size();
    const double* zp = z.data();
    const double* dap = da.data();
    double* dzp = dz.data();
    const int nt = threads_for(total);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(total); ++i)
        dzp[i] = zp[i] > 0.0 ? dap[i] : 0.0;
}

void col_sum(const Matrix& m, std::span<double> out) {
    if (out.size() != m.cols()) throw dim_error("col_sum: width mismatch");
    const std::size_t rows = m.rows(), n = m.cols();
    const double* mp = m.data();
    const int nt = threads_for(rows * n);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(n); ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < rows; ++r) acc += mp[r * n + j];
        out[j] = acc;
    }
}

void gemv(const Matrix& a, std::span<const double> x, std::span<double> y) {
    if (x.size() != a.cols() || y.size() != a.rows()) throw dim_error("gemv: shape mismatch");
    const std::size_t m = a.rows(), k = a.cols();
    const double* ap = a.data();
    const int nt = threads_for(m * k);
#pragma omp parallel for schedule(static) num_threads(nt) if (nt > 1)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(m); ++i) {
        const double* arow = ap + i * k;
        double acc = 0.0;
        for (std::size_t kk = 0; kk < k; ++kk) acc += arow[kk] * x[kk];
        y[i] = acc;
    }
}

namespace serial {

void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c) {
    check_gemm_nn(a, b, c);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t kk = 0; kk < a.cols(); ++kk) acc += a(i, kk) * b(kk, j);
            c(i, j) = acc;
        }
}

void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c) {
    check_gemm_tn(a, b, c);
    for (std::size_t i = 0; i < a.cols(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t r = 0; r < a.rows(); ++r) acc += a(r, i) * b(r, j);
            c(i, j) = acc;
        }
}

void add_bias(Matrix& z, std::span<const double> bias) {
    if (bias.size() != z.cols()) throw dim_error("add_bias: width mismatch");
    for (std::size_t i = 0; i < z.rows(); ++i)
        for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += bias[j];
}

void relu(const Matrix& z, Matrix& a) {
    if (z.rows() != a.rows() || z.cols() != a.cols()) throw dim_error("relu: shape mismatch");
    for (std::size_t i = 0; i < z.size(); ++i)
        a.data()[i] = z.data()[i] > 0.0 ? z.data()[i] : 0.0;
}

void relu_backward(const Matrix& z, const Matrix& da, Matrix& dz) {
    if (z.size() != da.size() || z.size() != dz.size())
        throw dim_error("relu_backward: shape mismatch");
    for (std::size_t i = 0; i < z.size(); ++i)
        dz.data()[i] = z.data()[i] > 0.0 ? da.data()[i] : 0.0;
}

void col_sum(const Matrix& m, std::span<double> out) {
    if (out.size() != m.cols()) throw dim_error("col_sum: width mismatch");
    for (std::size_t j = 0; j < m.cols(); ++j) {
        double acc = 0.0;
        for (std::size_t r = 0; r < m.rows(); ++r) acc += m(r, j);
        out[j] = acc;
    }
}

void gemv(const Matrix& a, std::span<const double> x, std::span<double> y) {
    if (x.size() != a.cols() || y.size() != a.rows()) throw dim_error("gemv: shape mismatch");
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double acc = 0.0;
        for (std::size_t kk = 0; kk < a.cols(); ++kk) acc += a(i, kk) * x[kk];
        y[i] = acc;
    }
}

}  // namespace serial

}  // namespace putree::kernels
