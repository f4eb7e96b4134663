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

#include <cstdint>
#include <span>
#include <vector>

#include "putree/matrix.hpp"

namespace putree {

/// Logit magnitude is clamped here before exponentiation so probabilities
/// stay strictly inside (0, 1).
inline constexpr double kLogitClamp = 30.0;

double sigmoid(double logit);

struct MLPConfig {
    std::size_t input_dim = 0;
    std::size_t hidden_width = 300;
    std::size_t n_hidden = 5;  // five hidden layers + linear output = 6 weight layers
};

/// Feedforward scorer: rectifier hidden layers, single linear output
/// (a real logit). Also exposes the last hidden representation, which the
/// path fusion network consumes.
class MLPClassifier {
public:
    struct Cache {
        std::vector<Matrix> act;  // act[0] = input batch, act[l] = post-rectifier
    };

    struct Gradients {
        std::vector<Matrix> dw;
        std::vector<Vec> db;
        Vec flatten() const;
    };

    MLPClassifier() = default;
    MLPClassifier(const MLPConfig& cfg, std::uint64_t seed);

    std::size_t input_dim() const { return widths_.empty() ? 0 : widths_.front(); }
    std::size_t hidden_dim() const { return widths_.size() < 2 ? 0 : widths_[widths_.size() - 2]; }
    std::size_t n_layers() const { return weights_.size(); }
    const std::vector<std::size_t>& widths() const { return widths_; }
    const std::vector<Matrix>& weights() const { return weights_; }
    const std::vector<Vec>& biases() const { return biases_; }

    /// One logit per batch row.
    Vec forward(const Matrix& batch) const;
    Vec forward(const Matrix& batch, Cache& cache) const;
    Vec probabilities(const Matrix& batch) const;
    double forward_row(std::span<const double> row) const;

    /// Activations of the final hidden layer, one row per batch row.
    Matrix last_hidden(const Matrix& batch) const;

    /// Reverse accumulation. dlogit holds the loss derivative w.r.t. each
    /// row's output logit; cache must come from forward() on the same batch.
    Gradients backward(const Cache& cache, std::span<const double> dlogit) const;

    std::size_t n_params() const;
    Vec flatten_params() const;
    void unflatten_params(std::span<const double> flat);

    bool operator==(const MLPClassifier& o) const = default;

    // io.cpp builds models directly from parsed parts.
    static MLPClassifier from_parts(std::vector<std::size_t> widths, std::vector<Matrix> weights,
                                    std::vector<Vec> biases);

private:
    std::vector<std::size_t> widths_;
    std::vector<Matrix> weights_;  // weights_[l] has shape widths_[l] x widths_[l+1]
    std::vector<Vec> biases_;
};

/// First/second moment optimizer state over a flat parameter vector.
struct AdamState {
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    Vec m, v;
    long step_count = 0;

    explicit AdamState(std::size_t n_params, double lr = 1e-4);
    void step(std::span<double> params, std::span<const double> grads);
};

/// Multi-output linear model fit by weighted ridge regression. Used both
/// as the local explainer surrogate and as the mask-recovery model.
struct RidgeRegressor {
    Matrix coefficients;  // n_outputs x n_inputs
    Vec intercept;        // n_outputs
    double regularization = 0.0;

    Matrix predict(const Matrix& inputs) const;
    Vec predict_row(std::span<const double> row) const;
};

/// Minimizes sum_i w_i * ||y_i - (W x_i + b)||^2 + reg * ||W||^2 by the
/// normal equations (intercept unpenalized). regularization must be > 0.
RidgeRegressor fit_ridge(const Matrix& inputs, const Matrix& targets,
                         std::span<const double> sample_weights, double regularization);

}  // namespace putree
