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
#include <optional>
#include <string>
#include <vector>

#include "putree/matrix.hpp"
#include "putree/rng.hpp"

namespace putree {

enum class PULabel : std::uint8_t { Positive, Unlabeled };

/// Training view of the data: a handful of labeled positives plus an
/// unlabeled pool, with an assumed positive class prior.
struct PUDataset {
    Matrix features;
    std::vector<PULabel> pu_labels;
    double class_prior = 0.5;
    std::vector<std::string> feature_names;

    std::size_t n_rows() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }
    std::size_t n_positive() const;
    std::size_t n_unlabeled() const;
    std::vector<std::size_t> positive_rows() const;
    std::vector<std::size_t> unlabeled_rows() const;

    PUDataset subset(std::span<const std::size_t> rows) const;

    /// Throws unless row/label counts agree and the prior is in (0,1).
    void validate() const;
    /// validate() plus the at-least-one-positive requirement.
    void validate_for_training() const;
};

/// Fully labeled data; used for evaluation and synthesis ground truth only.
struct LabeledDataset {
    Matrix features;
    std::vector<int> pn_labels;  // +1 / -1
    std::vector<std::string> feature_names;

    std::size_t n_rows() const { return features.rows(); }
    std::size_t dim() const { return features.cols(); }
};

// ---------------------------------------------------------------------------
// CSV loading

struct ColumnSpec {
    enum class Kind { Numeric, OneHot, Index, Ignore, Label };
    std::string name;
    Kind kind = Kind::Numeric;
    std::vector<std::string> categories;  // for OneHot/Index; empty = infer
};

struct Schema {
    bool has_header = true;
    std::vector<ColumnSpec> columns;           // in file order
    std::vector<std::string> positive_classes; // label values mapped to +1
};

/// Loads a CSV per the schema. Categorical columns are expanded (one-hot)
/// or index-encoded; the label column is mapped to {+1,-1} by the schema's
/// positive-class list. Malformed cells raise a parse error naming the file
/// line; undeclared categories raise a schema error.
LabeledDataset load_csv(const std::string& path, const Schema& schema);

// ---------------------------------------------------------------------------
// PU sampling

struct MakePuResult {
    PUDataset data;
    std::vector<std::size_t> source_rows;  // row in `data` -> row in the input
};

/// Samples a PU training set: n_labeled_pos labeled positives plus an
/// unlabeled pool whose hidden positive fraction is unlabeled_pos_fraction.
/// class_prior is set to that fraction. Deterministic in the seed.
MakePuResult make_pu(const LabeledDataset& data, std::size_t n_labeled_pos,
                     std::size_t n_unlabeled, double unlabeled_pos_fraction,
                     std::uint64_t seed);

/// Two isotropic unit-variance Gaussian classes with the given mean
/// separation, spread evenly over all dimensions. Returns the PU view and
/// the row-aligned hidden ground truth.
std::pair<PUDataset, LabeledDataset> synth_gaussian_pu(std::size_t n_pos,
                                                       std::size_t n_unlabeled, double prior,
                                                       std::size_t dimension, double separation,
                                                       std::uint64_t seed);

// ---------------------------------------------------------------------------
// Discretization (feeds the local explainer)

enum class QuantileScheme { Quartile, Decile };

/// Linear-interpolation quantile of unsorted values.
double quantile(std::vector<double> values, double q);

/// Per-feature quantile bins. Binarizing an instance activates exactly one
/// bin per original feature. Bin occupancy counts and feature ranges are
/// kept so neighborhood sampling can draw values from the empirical bins.
class Discretizer {
public:
    struct FeatureBins {
        Vec cuts;                        // strictly increasing
        std::vector<std::size_t> bin_counts;
        double min = 0.0, max = 0.0;
    };

    static Discretizer fit(const Matrix& data, QuantileScheme scheme);

    std::size_t n_features() const { return features_.size(); }
    std::size_t total_bins() const { return total_bins_; }
    std::size_t n_bins(std::size_t f) const { return features_[f].bin_counts.size(); }
    std::size_t bin_offset(std::size_t f) const { return offsets_[f]; }
    const FeatureBins& feature(std::size_t f) const { return features_[f]; }
    QuantileScheme scheme() const { return scheme_; }

    /// Bin index for a value: values at a cut point fall in the lower bin.
    std::size_t bin_of(std::size_t f, double value) const;
    /// Flat index into the binary vector for (feature, bin).
    std::size_t flat_index(std::size_t f, std::size_t bin) const { return offsets_[f] + bin; }
    /// (feature, bin) for a flat binary index.
    std::pair<std::size_t, std::size_t> feature_bin(std::size_t flat) const;

    std::vector<std::uint8_t> binarize(std::span<const double> row) const;

    /// Draws a value for feature f: a bin weighted by training occupancy,
    /// then uniform within the bin's empirical range.
    double sample_value(std::size_t f, Rng& rng) const;

    /// Human-readable description of a bin, e.g. "x3 <= 1.75".
    std::string bin_label(std::size_t flat, const std::vector<std::string>& names) const;

    // io.cpp rebuilds discretizers from serialized parts.
    static Discretizer from_parts(std::vector<FeatureBins> features, QuantileScheme scheme);

private:
    std::vector<FeatureBins> features_;
    std::vector<std::size_t> offsets_;
    std::size_t total_bins_ = 0;
    QuantileScheme scheme_ = QuantileScheme::Quartile;

    void rebuild_offsets();
};

// ---------------------------------------------------------------------------
// Column standardization (fit on training data only)

struct Standardizer {
    Vec mean;
    Vec stddev;  // constant columns keep stddev 1

    static Standardizer fit(const Matrix& data);
    Matrix transform(const Matrix& data) const;
    void transform_in_place(Matrix& data) const;
    double original_threshold(std::size_t f, double standardized) const {
        return mean[f] + stddev[f] * standardized;
    }
};

// ---------------------------------------------------------------------------
// Split routing

struct SplitCriterion {
    std::size_t feature = 0;
    double threshold = 0.0;
};

/// Instances with value exactly at the threshold go to the <= side.
inline bool goes_left(const SplitCriterion& s, std::span<const double> row) {
    return row[s.feature] <= s.threshold;
}

/// Row indices of the <= child and the > child, in original order.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> partition_rows(
    const Matrix& features, const SplitCriterion& split);

}  // namespace putree
