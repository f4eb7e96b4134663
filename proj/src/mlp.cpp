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
#include "putree/mlp.hpp"

#include <algorithm>
#include <cmath>

#include "putree/kernels.hpp"
#include "putree/rng.hpp"

namespace putree {

double sigmoid(double logit) {
    const double z = std::clamp(logit, -kLogitClamp, kLogitClamp);
    return 1.0 / (1.0 + std::exp(-z));
}

MLPClassifier::MLPClassifier(const MLPConfig& cfg, std::uint64_t seed) {
    if (cfg.input_dim == 0) throw dim_error("MLPClassifier: input_dim must be positive");
    widths_.push_back(cfg.input_dim);
    for (std::size_t i = 0; i < cfg.n_hidden; ++i) widths_.push_back(cfg.hidden_width);
    widths_.push_back(1);

    Rng rng = Rng::stream(seed, 0x11);
    for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
        const std::size_t fan_in = widths_[l], fan_out = widths_[l + 1];
        Matrix w(fan_in, fan_out);
        const double scale = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < w.size(); ++i) w.data()[i] = rng.uniform(-scale, scale);
        weights_.push_back(std::move(w));
        biases_.emplace_back(fan_out, 0.0);
    }
}

MLPClassifier MLPClassifier::from_parts(std::vector<std::size_t> widths,
                                        std::vector<Matrix> weights, std::vector<Vec> biases) {
    MLPClassifier m;
    m.widths_ = std::move(widths);
    m.weights_ = std::move(weights);
    m.biases_ = std::move(biases);
    if (m.weights_.size() + 1 != m.widths_.size() || m.biases_.size() != m.weights_.size())
        throw dim_error("MLPClassifier::from_parts: inconsistent layer counts");
    for (std::size_t l = 0; l < m.weights_.size(); ++l)
        if (m.weights_[l].rows() != m.widths_[l] || m.weights_[l].cols() != m.widths_[l + 1] ||
            m.biases_[l].size() != m.widths_[l + 1])
            throw dim_error("MLPClassifier::from_parts: shape mismatch");
    return m;
}

Vec MLPClassifier::forward(const Matrix& batch) const {
    Cache cache;
    return forward(batch, cache);
}

Vec MLPClassifier::forward(const Matrix& batch, Cache& cache) const {
    if (batch.cols() != input_dim()) throw dim_error("forward: batch width != input dim");
    const std::size_t n = batch.rows();
    const std::size_t layers = weights_.size();
    cache.act.clear();
    cache.act.reserve(layers);
    cache.act.push_back(batch);

    Matrix z;
    for (std::size_t l = 0; l < layers; ++l) {
        z = Matrix(n, widths_[l + 1]);
        kernels::gemm_nn(cache.act[l], weights_[l], z);
        kernels::add_bias(z, biases_[l]);
        if (l + 1 < layers) {
            Matrix a(n, widths_[l + 1]);
            kernels::relu(z, a);
            cache.act.push_back(std::move(a));
        }
    }
    Vec logits(n);
    for (std::size_t i = 0; i < n; ++i) logits[i] = z(i, 0);
    return logits;
}

Vec MLPClassifier::probabilities(const Matrix& batch) const {
    Vec p = forward(batch);
    for (double& v : p) v = sigmoid(v);
    return p;
}

double MLPClassifier::forward_row(std::span<const double> row) const {
    Matrix one(1, row.size());
    std::copy(row.begin(), row.end(), one.row(0).begin());
    return forward(one)[0];
}

Matrix MLPClassifier::last_hidden(const Matrix& batch) const {
    Cache cache;
    forward(batch, cache);
    return cache.act.back();
}

MLPClassifier::Gradients MLPClassifier::backward(const Cache& cache,
                                                 std::span<const double> dlogit) const {
    const std::size_t layers = weights_.size();
    if (cache.act.size() != layers) throw dim_error("backward: cache does not match model");
    const std::size_t n = cache.act[0].rows();
    if (dlogit.size() != n) throw dim_error("backward: upstream gradient length != batch rows");

    Gradients g;
    g.dw.resize(layers);
    g.db.resize(layers);

    Matrix dz(n, 1);
    for (std::size_t i = 0; i < n; ++i) dz(i, 0) = dlogit[i];

    for (std::size_t l = layers; l-- > 0;) {
        g.dw[l] = Matrix(widths_[l], widths_[l + 1]);
        kernels::gemm_tn(cache.act[l], dz, g.dw[l]);
        g.db[l] = Vec(widths_[l + 1]);
        kernels::col_sum(dz, g.db[l]);
        if (l > 0) {
            Matrix wt = kernels::transpose(weights_[l]);
            Matrix da(n, widths_[l]);
            kernels::gemm_nn(dz, wt, da);
            dz = Matrix(n, widths_[l]);
            // post-rectifier activations are positive exactly where the
            // pre-activations are, so they double as the gradient mask
            kernels::relu_backward(cache.act[l], da, dz);
        }
    }
    return g;
}

std::size_t MLPClassifier::n_params() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) n += weights_[l].size() + biases_[l].size();
    return n;
}

Vec MLPClassifier::flatten_params() const {
    Vec flat;
    flat.reserve(n_params());
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        const auto& s = weights_[l].storage();
        flat.insert(flat.end(), s.begin(), s.end());
        flat.insert(flat.end(), biases_[l].begin(), biases_[l].end());
    }
    return flat;
}

void MLPClassifier::unflatten_params(std::span<const double> flat) {
    if (flat.size() != n_params()) throw dim_error("unflatten_params: size mismatch");
    std::size_t pos = 0;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
        auto& s = weights_[l].storage();
        std::copy(flat.begin() + pos, flat.begin() + pos + s.size(), s.begin());
        pos += s.size();
        std::copy(flat.begin() + pos, flat.begin() + pos + biases_[l].size(), biases_[l].begin());
        pos += biases_[l].size();
    }
}

Vec MLPClassifier::Gradients::flatten() const {
    Vec flat;
    for (std::size_t l = 0; l < dw.size(); ++l) {
        const auto& s = dw[l].storage();
        flat.insert(flat.end(), s.begin(), s.end());
        flat.insert(flat.end(), db[l].begin(), db[l].end());
    }
    return flat;
}

AdamState::AdamState(std::size_t n_params, double lr)
    : learning_rate(lr), m(n_params, 0.0), v(n_params, 0.0) {}

void AdamState::step(std::span<double> params, std::span<const double> grads) {
    if (params.size() != m.size() || grads.size() != m.size())
        throw dim_error("AdamState::step: size mismatch");
    ++step_count;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
    for (std::size_t i = 0; i < m.size(); ++i) {
        m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
        v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i] * grads[i];
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        params[i] -= learning_rate * mhat / (std::sqrt(vhat) + epsilon);
    }
}

Matrix RidgeRegressor::predict(const Matrix& inputs) const {
    if (inputs.cols() != coefficients.cols()) throw dim_error("RidgeRegressor: input width");
    Matrix ct = kernels::transpose(coefficients);
    Matrix out(inputs.rows(), coefficients.rows());
    kernels::gemm_nn(inputs, ct, out);
    kernels::add_bias(out, intercept);
    return out;
}

Vec RidgeRegressor::predict_row(std::span<const double> row) const {
    Vec out(coefficients.rows());
    kernels::gemv(coefficients, row, out);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += intercept[i];
    return out;
}

namespace {

// In-place Cholesky solve of A X = B for symmetric positive definite A.
void cholesky_solve(Matrix& a, Matrix& b) {
    const std::size_t n = a.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= a(j, k) * a(j, k);
        if (diag <= 0.0) throw Error(Error::Kind::Dimension, "cholesky: matrix not positive definite");
        diag = std::sqrt(diag);
        a(j, j) = diag;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= a(i, k) * a(j, k);
            a(i, j) = v / diag;
        }
    }
    const std::size_t q = b.cols();
    // forward substitution L y = b
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t c = 0; c < q; ++c) {
            double v = b(i, c);
            for (std::size_t k = 0; k < i; ++k) v -= a(i, k) * b(k, c);
            b(i, c) = v / a(i, i);
        }
    // back substitution L^T x = y
    for (std::size_t i = n; i-- > 0;)
        for (std::size_t c = 0; c < q; ++c) {
            double v = b(i, c);
            for (std::size_t k = i + 1; k < n; ++k) v -= a(k, i) * b(k, c);
            b(i, c) = v / a(i, i);
        }
}

}  // namespace

RidgeRegressor fit_ridge(const Matrix& inputs, const Matrix& targets,
                         std::span<const double> sample_weights, double regularization) {
    if (regularization <= 0.0) throw config_error("fit_ridge: regularization must be positive");
    const std::size_t n = inputs.rows(), d = inputs.cols(), q = targets.cols();
    if (targets.rows() != n || sample_weights.size() != n)
        throw dim_error("fit_ridge: row counts disagree");

    // augmented design [X 1] with rows pre-scaled by their weight
    Matrix xw(n, d + 1);
    Matrix xplain(n, d + 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = sample_weights[i];
        for (std::size_t j = 0; j < d; ++j) {
            xplain(i, j) = inputs(i, j);
            xw(i, j) = w * inputs(i, j);
        }
        xplain(i, d) = 1.0;
        xw(i, d) = w;
    }

    Matrix gram(d + 1, d + 1);
    kernels::gemm_tn(xw, xplain, gram);
    for (std::size_t j = 0; j < d; ++j) gram(j, j) += regularization;
    gram(d, d) += 1e-12;  // keeps the system positive definite when all weights vanish

    Matrix rhs(d + 1, q);
    kernels::gemm_tn(xw, targets, rhs);
    cholesky_solve(gram, rhs);

    RidgeRegressor model;
    model.regularization = regularization;
    model.coefficients = Matrix(q, d);
    model.intercept = Vec(q);
    for (std::size_t c = 0; c < q; ++c) {
        for (std::size_t j = 0; j < d; ++j) model.coefficients(c, j) = rhs(j, c);
        model.intercept[c] = rhs(d, c);
    }
    return model;
}

}  // namespace putree
