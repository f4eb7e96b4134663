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
#pragma once

#include <span>

#include "putree/matrix.hpp"

namespace putree::kernels {

/// Caps the number of OpenMP threads used by kernels on the calling
/// thread. 0 means "whatever OpenMP defaults to". Worker threads running
/// whole experiments in parallel set this to 1 to avoid oversubscription.
void set_thread_cap(int n);
int thread_cap();

struct ThreadCapGuard {
    explicit ThreadCapGuard(int n) : prev(thread_cap()) { set_thread_cap(n); }
    ~ThreadCapGuard() { set_thread_cap(prev); }
    int prev;
};

// Every kernel accumulates each output element over its reduction index in
// ascending order, so the parallel versions are bitwise identical to the
// serial references below regardless of thread count.

/// C = A * B. A is m x k, B is k x n, C is m x n (overwritten).
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c);

/// C = A^T * B. A is m x k, B is m x n, C is k x n (overwritten).
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c);

Matrix transpose(const Matrix& a);

/// Z[i, :] += bias for every row i.
void add_bias(Matrix& z, std::span<const double> bias);

/// A = max(Z, 0), elementwise.
void relu(const Matrix& z, Matrix& a);

/// dZ = dA where Z > 0, else 0.
void relu_backward(const Matrix& z, const Matrix& da, Matrix& dz);

/// out[j] = sum over rows of m(:, j).
void col_sum(const Matrix& m, std::span<double> out);

/// y = A * x. A is m x k, x has k entries, y has m entries.
void gemv(const Matrix& a, std::span<const double> x, std::span<double> y);

namespace serial {
void gemm_nn(const Matrix& a, const Matrix& b, Matrix& c);
void gemm_tn(const Matrix& a, const Matrix& b, Matrix& c);
void add_bias(Matrix& z, std::span<const double> bias);
void relu(const Matrix& z, Matrix& a);
void relu_backward(const Matrix& z, const Matrix& da, Matrix& dz);
void col_sum(const Matrix& m, std::span<double> out);
void gemv(const Matrix& a, std::span<const double> x, std::span<double> y);
}  // namespace serial

}  // namespace putree::kernels
