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
#include "putree/purisk.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace putree {

double SurrogateLoss::value(double z, int y) const {
    const double yz = std::clamp(static_cast<double>(y) * z, -kLogitClamp, kLogitClamp);
    return 1.0 / (1.0 + std::exp(yz));
}

double SurrogateLoss::derivative(double z, int y) const {
    const double l = value(z, y);
    return -static_cast<double>(y) * l * (1.0 - l);
}

void RiskConfig::validate() const {
    if (!(class_prior > 0.0 && class_prior < 1.0))
        throw config_error("RiskConfig: class prior must be in (0,1)");
    if (consistency_weight < 0.0)
        throw config_error("RiskConfig: consistency weight must be >= 0");
    if (kind == RiskKind::Adversarial && parent_model == nullptr)
        throw config_error("RiskConfig: adversarial risk requires a parent model");
}

namespace {

// Reorders the batch positives-first and returns (logits, n_pos).
std::pair<Vec, std::size_t> ordered_logits(const MLPClassifier& model, const Matrix& features,
                                           std::span<const PULabel> labels) {
    if (features.rows() != labels.size()) throw dim_error("risk: rows != labels");
    std::vector<std::size_t> order;
    order.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == PULabel::Positive) order.push_back(i);
    const std::size_t n_pos = order.size();
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == PULabel::Unlabeled) order.push_back(i);
    if (n_pos == 0) throw capacity_error("risk: batch has no positive rows");
    if (n_pos == labels.size()) throw capacity_error("risk: batch has no unlabeled rows");
    return {model.forward(features.take_rows(order)), n_pos};
}

Vec ordered_parent_probs(const MLPClassifier& parent, const Matrix& features,
                         std::span<const PULabel> labels) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == PULabel::Positive) order.push_back(i);
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == PULabel::Unlabeled) order.push_back(i);
    return parent.probabilities(features.take_rows(order));
}

}  // namespace

PuBatchGrad pu_risk_and_gradient(std::span<const double> logits, std::size_t n_pos_rows,
                                 const SurrogateLoss& loss, double prior, RiskKind kind,
                                 std::span<const double> parent_probs, double lambda) {
    const std::size_t n = logits.size();
    if (n_pos_rows == 0 || n_pos_rows >= n)
        throw capacity_error("pu_risk_and_gradient: need both positives and unlabeled");
    const auto n_p = static_cast<double>(n_pos_rows);
    const auto n_u = static_cast<double>(n - n_pos_rows);

    double pos_sum = 0.0, pos_as_neg_sum = 0.0, unl_sum = 0.0;
    for (std::size_t i = 0; i < n_pos_rows; ++i) {
        pos_sum += loss.value(logits[i], +1);
        pos_as_neg_sum += loss.value(logits[i], -1);
    }
    for (std::size_t i = n_pos_rows; i < n; ++i) unl_sum += loss.value(logits[i], -1);

    PuBatchGrad out;
    out.parts.positive_part = prior / n_p * pos_sum;
    out.parts.bracket = unl_sum / n_u - prior / n_p * pos_as_neg_sum;

    // per-row derivatives of the two terms
    Vec dpos(n, 0.0), dbracket(n, 0.0);
    for (std::size_t i = 0; i < n_pos_rows; ++i) {
        dpos[i] = prior / n_p * loss.derivative(logits[i], +1);
        dbracket[i] = -prior / n_p * loss.derivative(logits[i], -1);
    }
    for (std::size_t i = n_pos_rows; i < n; ++i)
        dbracket[i] = loss.derivative(logits[i], -1) / n_u;

    double consistency = 0.0;
    Vec dcons(n, 0.0);
    if (kind == RiskKind::Adversarial) {
        if (parent_probs.size() != n)
            throw dim_error("pu_risk_and_gradient: parent probabilities missing");
        for (std::size_t i = 0; i < n; ++i) {
            const double p = sigmoid(logits[i]);
            const double gap = p - parent_probs[i];
            consistency += gap * gap;
            dcons[i] = 2.0 * gap * p * (1.0 - p) / static_cast<double>(n);
        }
        consistency /= static_cast<double>(n);
    }
    out.parts.consistency = consistency;

    out.dlogit.assign(n, 0.0);
    switch (kind) {
        case RiskKind::Upu:
            out.parts.total = out.parts.positive_part + out.parts.bracket;
            for (std::size_t i = 0; i < n; ++i) out.dlogit[i] = dpos[i] + dbracket[i];
            break;
        case RiskKind::Nnpu:
        case RiskKind::Adversarial: {
            out.parts.total = out.parts.positive_part + std::max(0.0, out.parts.bracket) +
                              lambda * consistency;
            if (out.parts.bracket >= 0.0) {
                for (std::size_t i = 0; i < n; ++i)
                    out.dlogit[i] = dpos[i] + dbracket[i] + lambda * dcons[i];
            } else {
                // defensive step: descend on the negated bracket to undo
                // overfitting of the clamped negative term
                for (std::size_t i = 0; i < n; ++i)
                    out.dlogit[i] = -dbracket[i] + lambda * dcons[i];
            }
            break;
        }
    }
    return out;
}

double upu_risk(const MLPClassifier& model, const Matrix& features,
                std::span<const PULabel> labels, const SurrogateLoss& loss, double prior) {
    auto [logits, n_pos] = ordered_logits(model, features, labels);
    return pu_risk_and_gradient(logits, n_pos, loss, prior, RiskKind::Upu, {}, 0.0).parts.total;
}

RiskParts nnpu_risk(const MLPClassifier& model, const Matrix& features,
                    std::span<const PULabel> labels, const SurrogateLoss& loss, double prior) {
    auto [logits, n_pos] = ordered_logits(model, features, labels);
    auto g = pu_risk_and_gradient(logits, n_pos, loss, prior, RiskKind::Nnpu, {}, 0.0);
    return g.parts;
}

double consistency_risk(const MLPClassifier& child_model, const MLPClassifier& parent_model,
                        const Matrix& features) {
    if (features.cols() != child_model.input_dim() || features.cols() != parent_model.input_dim())
        throw dim_error("consistency_risk: feature width mismatch");
    const Vec pc = child_model.probabilities(features);
    const Vec pp = parent_model.probabilities(features);
    double acc = 0.0;
    for (std::size_t i = 0; i < pc.size(); ++i) {
        const double gap = pc[i] - pp[i];
        acc += gap * gap;
    }
    return acc / static_cast<double>(pc.size());
}

RiskParts adversarial_risk(const MLPClassifier& child_model, const MLPClassifier& parent_model,
                           const Matrix& features, std::span<const PULabel> labels,
                           const SurrogateLoss& loss, double prior, double lambda) {
    if (lambda < 0.0) throw config_error("adversarial_risk: lambda must be >= 0");
    auto [logits, n_pos] = ordered_logits(child_model, features, labels);
    const Vec parent_probs = ordered_parent_probs(parent_model, features, labels);
    auto g = pu_risk_and_gradient(logits, n_pos, loss, prior, RiskKind::Adversarial, parent_probs,
                                  lambda);
    return g.parts;
}

BatchSlices stratified_batches(std::size_t n_pos, std::size_t n_unl, std::size_t batch_size) {
    if (batch_size == 0) throw config_error("stratified_batches: batch size must be positive");
    const std::size_t total = n_pos + n_unl;
    std::size_t n_batches = (total + batch_size - 1) / batch_size;
    n_batches = std::min({n_batches, n_pos, n_unl});
    n_batches = std::max<std::size_t>(n_batches, 1);

    BatchSlices out;
    for (std::size_t b = 0; b < n_batches; ++b) {
        const auto plo = n_pos * b / n_batches, phi = n_pos * (b + 1) / n_batches;
        const auto ulo = n_unl * b / n_batches, uhi = n_unl * (b + 1) / n_batches;
        out.pos.emplace_back(plo, phi);
        out.unl.emplace_back(ulo, uhi);
    }
    return out;
}

MLPClassifier train_pu(const PUDataset& data, const RiskConfig& config, const TrainHyper& hyper) {
    data.validate_for_training();
    config.validate();
    if (data.n_unlabeled() == 0) throw capacity_error("train_pu: no unlabeled rows");
    if (config.kind == RiskKind::Adversarial &&
        config.parent_model->input_dim() != data.dim())
        throw dim_error("train_pu: parent model width mismatch");

    MLPConfig mc{.input_dim = data.dim(), .hidden_width = hyper.hidden_width,
                 .n_hidden = hyper.n_hidden};
    MLPClassifier model(mc, hyper.seed);
    if (hyper.epochs == 0) return model;

    const SurrogateLoss loss{};
    Vec flat = model.flatten_params();
    AdamState adam(flat.size(), hyper.learning_rate);

    std::vector<std::size_t> pos_idx = data.positive_rows();
    std::vector<std::size_t> unl_idx = data.unlabeled_rows();
    const auto slices = stratified_batches(pos_idx.size(), unl_idx.size(), hyper.batch_size);

    for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
        Rng rng = Rng::stream(hyper.seed, 0x41 + epoch);
        rng.shuffle(pos_idx);
        rng.shuffle(unl_idx);

        for (std::size_t b = 0; b < slices.n_batches(); ++b) {
            std::vector<std::size_t> rows;
            const auto [plo, phi] = slices.pos[b];
            const auto [ulo, uhi] = slices.unl[b];
            rows.insert(rows.end(), pos_idx.begin() + plo, pos_idx.begin() + phi);
            const std::size_t n_pos_rows = rows.size();
            rows.insert(rows.end(), unl_idx.begin() + ulo, unl_idx.begin() + uhi);

            const Matrix batch = data.features.take_rows(rows);
            MLPClassifier::Cache cache;
            const Vec logits = model.forward(batch, cache);

            Vec parent_probs;
            if (config.kind == RiskKind::Adversarial)
                parent_probs = config.parent_model->probabilities(batch);

            auto g = pu_risk_and_gradient(logits, n_pos_rows, loss, config.class_prior,
                                          config.kind, parent_probs, config.consistency_weight);
            const Vec grad = model.backward(cache, g.dlogit).flatten();
            adam.step(flat, grad);
            model.unflatten_params(flat);
        }

        if (hyper.trace) {
            Vec parent_probs;
            if (config.kind == RiskKind::Adversarial)
                parent_probs = ordered_parent_probs(*config.parent_model, data.features,
                                                    data.pu_labels);
            auto [logits, n_pos] = ordered_logits(model, data.features, data.pu_labels);
            auto g = pu_risk_and_gradient(logits, n_pos, loss, config.class_prior, config.kind,
                                          parent_probs, config.consistency_weight);
            (*hyper.trace) << "epoch=" << epoch << " total=" << g.parts.total
                           << " positive=" << g.parts.positive_part
                           << " bracket=" << g.parts.bracket
                           << " consistency=" << g.parts.consistency << "\n";
        }
    }
    return model;
}

}  // namespace putree
