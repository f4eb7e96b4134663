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

#include <optional>

#include "putree/dataset.hpp"
#include "putree/mlp.hpp"

namespace putree {

/// Sparse linear surrogate over the binarized feature space. Each
/// coefficient corresponds to one discretizer bin, i.e. one
/// (feature, threshold, direction) triple.
struct ExplainerModel {
    Vec coefficients;       // one per binary bin (d')
    double intercept = 0.0;
    double weighted_loss = 0.0;  // weighted squared error of the fit
};

/// One candidate split evaluated by the dissimilarity-minus-imbalance
/// objective. The distribution of the > child is compared against the
/// <= child; balance is the logistic of the normalized size difference.
struct SplitScore {
    SplitCriterion candidate;
    double kl = 0.0;
    double balance = 0.0;   // in (0,1)
    double total = 0.0;     // kl - balance
    bool rejected = false;  // a child was empty or under the size guard
    std::size_t gt_rows = 0;
    std::size_t le_rows = 0;
};

struct ExplainBudget {
    std::size_t pool_size = 2000;   // neighborhood candidates per anchor
    std::size_t selected = 500;     // kept after uncertainty selection
    std::size_t n_anchors = 20;
    std::size_t top_bins = 10;      // candidate bins ranked by |coefficient|
    double ridge_reg = 1.0;
    double kernel_width_scale = 0.75;  // width = scale * sqrt(d')
    std::uint64_t seed = 1;
};

/// Candidate pool around the anchor: row 0 is the anchor itself; every
/// other row keeps each feature with probability 1/2 and otherwise redraws
/// it from the feature's empirical bins.
Matrix sample_neighborhood(std::span<const double> anchor, const Discretizer& discretizer,
                           std::size_t pool_size, std::uint64_t seed);

/// Indices of the k pool rows the sibling model is least confident about
/// (confidence = max(p, 1-p)); ties keep pool order.
std::vector<std::size_t> uncertainty_select(const Matrix& pool,
                                            const MLPClassifier& sibling_model, std::size_t k);

/// Plain neighborhood selection used when no sibling exists: k rows drawn
/// uniformly without replacement.
std::vector<std::size_t> uniform_select(std::size_t pool_rows, std::size_t k, Rng& rng);

/// Weighted ridge fit of the model's probability output against the
/// binarized neighborhood, with kernel weights exp(-||x-z||^2 / width^2).
ExplainerModel fit_explainer(const MLPClassifier& model_to_explain, const Matrix& neighborhood,
                             std::span<const double> anchor, const Discretizer& discretizer,
                             double kernel_width, double ridge_reg);

/// Scores one candidate split on the node's rows under the node's model.
SplitScore score_split(const SplitCriterion& candidate, const Matrix& node_features,
                       const MLPClassifier& node_model, std::size_t min_child_size);
/// Same, with the node model's probabilities precomputed.
SplitScore score_split(const SplitCriterion& candidate, const Matrix& node_features,
                       std::span<const double> node_probs, std::size_t min_child_size);

struct SplitSelection {
    std::optional<SplitCriterion> split;
    SplitScore chosen;                  // valid when split is set
    std::vector<SplitScore> candidates; // everything scored, best first
    Vec bin_importance;                 // aggregated |coefficient| per bin
};

/// Explains the node model at sampled anchors, turns the strongest bins
/// into candidate (feature, threshold) pairs, and returns the best-scoring
/// split, or nothing when no candidate passes the guards. With
/// use_sibling_uncertainty unset (or no sibling) the neighborhood is
/// selected uniformly instead.
SplitSelection select_split(const Matrix& node_features, const MLPClassifier& node_model,
                            const MLPClassifier* sibling_model, const Discretizer& discretizer,
                            const ExplainBudget& budget, std::size_t min_child_size,
                            bool use_sibling_uncertainty);

/// Mean over anchors of the strongest per-feature explainer coefficient;
/// bins of one feature are aggregated by the largest magnitude.
Vec explainer_feature_importance(const MLPClassifier& model, const Matrix& features,
                                 const Discretizer& discretizer, const ExplainBudget& budget);

}  // namespace putree
