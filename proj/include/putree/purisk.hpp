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

#include <iosfwd>
#include <optional>

#include "putree/dataset.hpp"
#include "putree/mlp.hpp"

namespace putree {

/// Surrogate of the zero-one loss. Sigmoid: l(z, y) = 1 / (1 + exp(y z)),
/// so l(0, y) = 0.5 and l decreases in the correct-class direction.
struct SurrogateLoss {
    enum class Kind { Sigmoid };
    Kind kind = Kind::Sigmoid;

    double value(double z, int y) const;
    double derivative(double z, int y) const;  // d l / d z
};

enum class RiskKind { Upu, Nnpu, Adversarial };

struct RiskConfig {
    RiskKind kind = RiskKind::Nnpu;
    double class_prior = 0.5;
    double consistency_weight = 0.5;               // ignored unless adversarial
    const MLPClassifier* parent_model = nullptr;   // required iff adversarial
    void validate() const;
};

struct RiskParts {
    double total = 0.0;
    double positive_part = 0.0;   // (pi/n_p) sum l(g(x_p), +1)
    double bracket = 0.0;         // (1/n_u) sum l(g(x_u), -1) - (pi/n_p) sum l(g(x_p), -1)
    double consistency = 0.0;     // mean squared probability gap to the parent
};

/// Unbiased PU risk. May be negative.
double upu_risk(const MLPClassifier& model, const Matrix& features,
                std::span<const PULabel> labels, const SurrogateLoss& loss, double prior);

/// Non-negative PU risk: the bracket is clamped at zero. Parts are returned
/// so training can apply the defensive gradient policy.
RiskParts nnpu_risk(const MLPClassifier& model, const Matrix& features,
                    std::span<const PULabel> labels, const SurrogateLoss& loss, double prior);

/// Mean squared gap between the two models' probability outputs over the batch.
double consistency_risk(const MLPClassifier& child_model, const MLPClassifier& parent_model,
                        const Matrix& features);

/// Non-negative risk plus lambda times the consistency to the parent model.
RiskParts adversarial_risk(const MLPClassifier& child_model, const MLPClassifier& parent_model,
                           const Matrix& features, std::span<const PULabel> labels,
                           const SurrogateLoss& loss, double prior, double lambda);

// ---------------------------------------------------------------------------
// Shared batch-level arithmetic. Logits must be ordered positives-first.
// parent_probs is consulted only for the adversarial kind. This is the one
// place the risk formulas and their gradient policy live; the public risk
// functions and both training loops (node models, fusion) call it.

struct PuBatchGrad {
    RiskParts parts;
    Vec dlogit;  // per row, already following the clamp policy
};

PuBatchGrad pu_risk_and_gradient(std::span<const double> logits, std::size_t n_pos_rows,
                                 const SurrogateLoss& loss, double prior, RiskKind kind,
                                 std::span<const double> parent_probs, double lambda);

/// Mini-batch index plan preserving the positive:unlabeled ratio. Every
/// batch gets at least one row from each side.
struct BatchSlices {
    std::vector<std::pair<std::size_t, std::size_t>> pos;  // [begin, end) into the positive list
    std::vector<std::pair<std::size_t, std::size_t>> unl;
    std::size_t n_batches() const { return pos.size(); }
};
BatchSlices stratified_batches(std::size_t n_pos, std::size_t n_unl, std::size_t batch_size);

// ---------------------------------------------------------------------------

struct TrainHyper {
    std::size_t epochs = 100;
    std::size_t batch_size = 4000;
    double learning_rate = 1e-4;
    std::size_t hidden_width = 300;
    std::size_t n_hidden = 5;
    std::uint64_t seed = 1;
    std::ostream* trace = nullptr;  // per-epoch risk trace when set
};

/// Trains a fresh scorer on the PU data under the configured risk.
/// Deterministic in the seed: two identical calls produce bit-identical
/// parameters. epochs = 0 returns the seeded initialization untouched.
MLPClassifier train_pu(const PUDataset& data, const RiskConfig& config, const TrainHyper& hyper);

}  // namespace putree
