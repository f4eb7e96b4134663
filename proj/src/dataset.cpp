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
#include "putree/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace putree {

std::size_t PUDataset::n_positive() const {
    return static_cast<std::size_t>(
        std::count(pu_labels.begin(), pu_labels.end(), PULabel::Positive));
}

std::size_t PUDataset::n_unlabeled() const { return pu_labels.size() - n_positive(); }

std::vector<std::size_t> PUDataset::positive_rows() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pu_labels.size(); ++i)
        if (pu_labels[i] == PULabel::Positive) out.push_back(i);
    return out;
}

std::vector<std::size_t> PUDataset::unlabeled_rows() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < pu_labels.size(); ++i)
        if (pu_labels[i] == PULabel::Unlabeled) out.push_back(i);
    return out;
}

PUDataset PUDataset::subset(std::span<const std::size_t> rows) const {
    PUDataset out;
    out.features = features.take_rows(rows);
    out.pu_labels.reserve(rows.size());
    for (std::size_t r : rows) out.pu_labels.push_back(pu_labels[r]);
    out.class_prior = class_prior;
    out.feature_names = feature_names;
    return out;
}

void PUDataset::validate() const {
    if (features.rows() != pu_labels.size())
        throw dim_error("PUDataset: row count != label count");
    if (!(class_prior > 0.0 && class_prior < 1.0))
        throw config_error("PUDataset: class prior must be strictly inside (0,1)");
}

void PUDataset::validate_for_training() const {
    validate();
    if (n_positive() == 0)
        throw capacity_error("PUDataset: at least one positive row required for training");
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_numeric(const std::string& cell, std::size_t line_no, const std::string& col) {
    const std::string t = trim(cell);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size())
        throw parse_error("line " + std::to_string(line_no) + ": non-numeric value '" + cell +
                          "' in numeric column '" + col + "'");
    return value;
}

}  // namespace

LabeledDataset load_csv(const std::string& path, const Schema& schema) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "'");

    std::size_t label_col = schema.columns.size();
    for (std::size_t c = 0; c < schema.columns.size(); ++c)
        if (schema.columns[c].kind == ColumnSpec::Kind::Label) {
            if (label_col != schema.columns.size())
                throw schema_error("schema declares more than one label column");
            label_col = c;
        }
    if (label_col == schema.columns.size()) throw schema_error("schema has no label column");

    // category -> code per categorical column; declared lists are closed,
    // empty lists infer codes in order of first appearance
    std::vector<std::unordered_map<std::string, std::size_t>> cats(schema.columns.size());
    std::vector<bool> closed(schema.columns.size(), false);
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        const auto& col = schema.columns[c];
        if (col.kind != ColumnSpec::Kind::OneHot && col.kind != ColumnSpec::Kind::Index) continue;
        for (std::size_t k = 0; k < col.categories.size(); ++k) cats[c][col.categories[k]] = k;
        closed[c] = !col.categories.empty();
    }

    std::string line;
    std::size_t line_no = 0;
    if (schema.has_header) {
        if (!std::getline(in, line)) throw parse_error("file is empty, header expected");
        ++line_no;
        auto header = split_csv_line(line);
        if (header.size() != schema.columns.size())
            throw schema_error("header has " + std::to_string(header.size()) +
                               " columns, schema declares " +
                               std::to_string(schema.columns.size()));
    }

    struct RawRow {
        std::vector<double> numeric;            // per schema column (categorical: code)
        int label = 0;
    };
    std::vector<RawRow> rows;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = split_csv_line(line);
        if (fields.size() != schema.columns.size())
            throw parse_error("line " + std::to_string(line_no) + ": expected " +
                              std::to_string(schema.columns.size()) + " fields, got " +
                              std::to_string(fields.size()));
        RawRow row;
        row.numeric.resize(schema.columns.size(), 0.0);
        for (std::size_t c = 0; c < schema.columns.size(); ++c) {
            const auto& col = schema.columns[c];
            switch (col.kind) {
                case ColumnSpec::Kind::Numeric:
                    row.numeric[c] = parse_numeric(fields[c], line_no, col.name);
                    break;
                case ColumnSpec::Kind::OneHot:
                case ColumnSpec::Kind::Index: {
                    const std::string v = trim(fields[c]);
                    auto it = cats[c].find(v);
                    if (it == cats[c].end()) {
                        if (closed[c])
                            throw schema_error("line " + std::to_string(line_no) +
                                               ": unknown category '" + v + "' in column '" +
                                               col.name + "'");
                        auto code = cats[c].size();
                        it = cats[c].emplace(v, code).first;
                    }
                    row.numeric[c] = static_cast<double>(it->second);
                    break;
                }
                case ColumnSpec::Kind::Label: {
                    const std::string v = trim(fields[c]);
                    row.label = std::find(schema.positive_classes.begin(),
                                          schema.positive_classes.end(),
                                          v) != schema.positive_classes.end()
                                    ? +1
                                    : -1;
                    break;
                }
                case ColumnSpec::Kind::Ignore:
                    break;
            }
        }
        rows.push_back(std::move(row));
    }

    // expand to the output feature layout
    LabeledDataset out;
    std::vector<std::size_t> width(schema.columns.size(), 0);
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        const auto& col = schema.columns[c];
        if (col.kind == ColumnSpec::Kind::Numeric || col.kind == ColumnSpec::Kind::Index)
            width[c] = 1;
        else if (col.kind == ColumnSpec::Kind::OneHot)
            width[c] = cats[c].size();
    }
    for (std::size_t c = 0; c < schema.columns.size(); ++c) {
        const auto& col = schema.columns[c];
        if (width[c] == 0) continue;
        if (col.kind == ColumnSpec::Kind::OneHot) {
            std::vector<std::string> names(cats[c].size());
            for (const auto& [cat, code] : cats[c]) names[code] = col.name + "=" + cat;
            for (auto& n : names) out.feature_names.push_back(std::move(n));
        } else {
            out.feature_names.push_back(col.name);
        }
    }

    std::size_t total_width = 0;
    for (auto w : width) total_width += w;
    out.features = Matrix(rows.size(), total_width);
    out.pn_labels.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::size_t at = 0;
        for (std::size_t c = 0; c < schema.columns.size(); ++c) {
            if (width[c] == 0) continue;
            if (schema.columns[c].kind == ColumnSpec::Kind::OneHot) {
                const auto code = static_cast<std::size_t>(rows[r].numeric[c]);
                out.features(r, at + code) = 1.0;
            } else {
                out.features(r, at) = rows[r].numeric[c];
            }
            at += width[c];
        }
        out.pn_labels.push_back(rows[r].label);
    }
    return out;
}

// ---------------------------------------------------------------------------
// PU sampling

MakePuResult make_pu(const LabeledDataset& data, std::size_t n_labeled_pos,
                     std::size_t n_unlabeled, double unlabeled_pos_fraction, std::uint64_t seed) {
    if (!(unlabeled_pos_fraction > 0.0 && unlabeled_pos_fraction < 1.0))
        throw config_error("make_pu: unlabeled positive fraction must be in (0,1)");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < data.pn_labels.size(); ++i)
        (data.pn_labels[i] > 0 ? pos : neg).push_back(i);

    const auto n_hidden_pos =
        static_cast<std::size_t>(std::llround(unlabeled_pos_fraction * n_unlabeled));
    const std::size_t n_neg = n_unlabeled - n_hidden_pos;
    if (pos.size() < n_labeled_pos + n_hidden_pos)
        throw capacity_error("make_pu: need " + std::to_string(n_labeled_pos + n_hidden_pos) +
                             " positives, have " + std::to_string(pos.size()));
    if (neg.size() < n_neg)
        throw capacity_error("make_pu: need " + std::to_string(n_neg) + " negatives, have " +
                             std::to_string(neg.size()));

    Rng rng = Rng::stream(seed, 0x21);
    rng.shuffle(pos);
    rng.shuffle(neg);

    std::vector<std::size_t> chosen(pos.begin(), pos.begin() + n_labeled_pos);
    std::vector<std::size_t> unl(pos.begin() + n_labeled_pos,
                                 pos.begin() + n_labeled_pos + n_hidden_pos);
    unl.insert(unl.end(), neg.begin(), neg.begin() + n_neg);
    rng.shuffle(unl);
    chosen.insert(chosen.end(), unl.begin(), unl.end());

    MakePuResult result;
    result.source_rows = chosen;
    result.data.features = data.features.take_rows(chosen);
    result.data.pu_labels.assign(chosen.size(), PULabel::Unlabeled);
    for (std::size_t i = 0; i < n_labeled_pos; ++i) result.data.pu_labels[i] = PULabel::Positive;
    result.data.class_prior = unlabeled_pos_fraction;
    result.data.feature_names = data.feature_names;
    result.data.validate();
    return result;
}

std::pair<PUDataset, LabeledDataset> synth_gaussian_pu(std::size_t n_pos, std::size_t n_unlabeled,
                                                       double prior, std::size_t dimension,
                                                       double separation, std::uint64_t seed) {
    if (!(prior > 0.0 && prior < 1.0))
        throw config_error("synth_gaussian_pu: prior must be in (0,1)");
    if (separation < 0.0) throw config_error("synth_gaussian_pu: separation must be >= 0");
    if (dimension == 0) throw config_error("synth_gaussian_pu: dimension must be positive");

    const double shift = separation / (2.0 * std::sqrt(static_cast<double>(dimension)));
    Rng rng = Rng::stream(seed, 0x31);

    const auto n_hidden_pos = static_cast<std::size_t>(std::llround(prior * n_unlabeled));
    const std::size_t total = n_pos + n_unlabeled;

    std::vector<int> truth(total, -1);
    for (std::size_t i = 0; i < n_pos; ++i) truth[i] = +1;
    std::vector<int> unl(n_unlabeled, -1);
    for (std::size_t i = 0; i < n_hidden_pos; ++i) unl[i] = +1;
    rng.shuffle(unl);
    std::copy(unl.begin(), unl.end(), truth.begin() + n_pos);

    Matrix features(total, dimension);
    for (std::size_t r = 0; r < total; ++r) {
        const double mu = truth[r] > 0 ? shift : -shift;
        for (std::size_t c = 0; c < dimension; ++c) features(r, c) = rng.normal(mu, 1.0);
    }

    std::vector<std::string> names(dimension);
    for (std::size_t c = 0; c < dimension; ++c) names[c] = "x" + std::to_string(c);

    PUDataset pu;
    pu.features = features;
    pu.pu_labels.assign(total, PULabel::Unlabeled);
    for (std::size_t i = 0; i < n_pos; ++i) pu.pu_labels[i] = PULabel::Positive;
    pu.class_prior = prior;
    pu.feature_names = names;
    pu.validate();

    LabeledDataset truth_ds;
    truth_ds.features = std::move(features);
    truth_ds.pn_labels = std::move(truth);
    truth_ds.feature_names = names;
    return {std::move(pu), std::move(truth_ds)};
}

// ---------------------------------------------------------------------------
// Quantiles and the discretizer

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw capacity_error("quantile: empty input");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[lo + 1] - values[lo]);
}

Discretizer Discretizer::fit(const Matrix& data, QuantileScheme scheme) {
    if (data.rows() == 0) throw capacity_error("Discretizer::fit: empty matrix");
    Discretizer d;
    d.scheme_ = scheme;
    const std::size_t n_q = scheme == QuantileScheme::Quartile ? 3 : 9;

    std::vector<double> column(data.rows());
    for (std::size_t f = 0; f < data.cols(); ++f) {
        for (std::size_t r = 0; r < data.rows(); ++r) column[r] = data(r, f);
        FeatureBins bins;
        bins.min = *std::min_element(column.begin(), column.end());
        bins.max = *std::max_element(column.begin(), column.end());
        for (std::size_t k = 1; k <= n_q; ++k) {
            const double c = quantile(column, static_cast<double>(k) / static_cast<double>(n_q + 1));
            if (bins.cuts.empty() || c > bins.cuts.back()) bins.cuts.push_back(c);
        }
        // a cut equal to the column maximum would leave the top bin empty
        while (!bins.cuts.empty() && bins.cuts.back() >= bins.max) bins.cuts.pop_back();
        bins.bin_counts.assign(bins.cuts.size() + 1, 0);
        for (double v : column) {
            const auto b = static_cast<std::size_t>(
                std::lower_bound(bins.cuts.begin(), bins.cuts.end(), v) - bins.cuts.begin());
            ++bins.bin_counts[b];
        }
        d.features_.push_back(std::move(bins));
    }
    d.rebuild_offsets();
    return d;
}

Discretizer Discretizer::from_parts(std::vector<FeatureBins> features, QuantileScheme scheme) {
    Discretizer d;
    d.features_ = std::move(features);
    d.scheme_ = scheme;
    d.rebuild_offsets();
    return d;
}

void Discretizer::rebuild_offsets() {
    offsets_.clear();
    total_bins_ = 0;
    for (const auto& f : features_) {
        offsets_.push_back(total_bins_);
        total_bins_ += f.bin_counts.size();
    }
}

std::size_t Discretizer::bin_of(std::size_t f, double value) const {
    const auto& cuts = features_[f].cuts;
    return static_cast<std::size_t>(std::lower_bound(cuts.begin(), cuts.end(), value) -
                                    cuts.begin());
}

std::pair<std::size_t, std::size_t> Discretizer::feature_bin(std::size_t flat) const {
    auto it = std::upper_bound(offsets_.begin(), offsets_.end(), flat);
    const auto f = static_cast<std::size_t>(it - offsets_.begin()) - 1;
    return {f, flat - offsets_[f]};
}

std::vector<std::uint8_t> Discretizer::binarize(std::span<const double> row) const {
    if (row.size() != features_.size()) throw dim_error("binarize: row width mismatch");
    std::vector<std::uint8_t> out(total_bins_, 0);
    for (std::size_t f = 0; f < features_.size(); ++f) out[flat_index(f, bin_of(f, row[f]))] = 1;
    return out;
}

double Discretizer::sample_value(std::size_t f, Rng& rng) const {
    const auto& fb = features_[f];
    if (fb.cuts.empty()) {
        return fb.min == fb.max ? fb.min : rng.uniform(fb.min, fb.max);
    }
    std::size_t total = 0;
    for (auto c : fb.bin_counts) total += c;
    std::size_t pick = rng.below(total);
    std::size_t bin = 0;
    while (pick >= fb.bin_counts[bin]) {
        pick -= fb.bin_counts[bin];
        ++bin;
    }
    const double lo = bin == 0 ? fb.min : fb.cuts[bin - 1];
    const double hi = bin == fb.cuts.size() ? fb.max : fb.cuts[bin];
    return lo == hi ? lo : rng.uniform(lo, hi);
}

std::string Discretizer::bin_label(std::size_t flat, const std::vector<std::string>& names) const {
    const auto [f, bin] = feature_bin(flat);
    const std::string name = f < names.size() ? names[f] : "x" + std::to_string(f);
    const auto& fb = features_[f];
    std::ostringstream os;
    if (fb.cuts.empty()) {
        os << name << " (constant)";
    } else if (bin == 0) {
        os << name << " <= " << fb.cuts[0];
    } else if (bin == fb.cuts.size()) {
        os << name << " > " << fb.cuts.back();
    } else {
        os << fb.cuts[bin - 1] << " < " << name << " <= " << fb.cuts[bin];
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Standardizer

Standardizer Standardizer::fit(const Matrix& data) {
    if (data.rows() == 0) throw capacity_error("Standardizer::fit: empty matrix");
    Standardizer s;
    s.mean.assign(data.cols(), 0.0);
    s.stddev.assign(data.cols(), 1.0);
    const auto n = static_cast<double>(data.rows());
    for (std::size_t f = 0; f < data.cols(); ++f) {
        double acc = 0.0;
        for (std::size_t r = 0; r < data.rows(); ++r) acc += data(r, f);
        const double mu = acc / n;
        double sq = 0.0;
        for (std::size_t r = 0; r < data.rows(); ++r) {
            const double d = data(r, f) - mu;
            sq += d * d;
        }
        const double sd = std::sqrt(sq / n);
        s.mean[f] = mu;
        s.stddev[f] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

Matrix Standardizer::transform(const Matrix& data) const {
    Matrix out = data;
    transform_in_place(out);
    return out;
}

void Standardizer::transform_in_place(Matrix& data) const {
    if (data.cols() != mean.size()) throw dim_error("Standardizer: width mismatch");
    for (std::size_t r = 0; r < data.rows(); ++r)
        for (std::size_t f = 0; f < data.cols(); ++f)
            data(r, f) = (data(r, f) - mean[f]) / stddev[f];
}

// ---------------------------------------------------------------------------

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> partition_rows(
    const Matrix& features, const SplitCriterion& split) {
    if (split.feature >= features.cols()) throw dim_error("partition_rows: feature out of range");
    std::vector<std::size_t> left, right;
    for (std::size_t r = 0; r < features.rows(); ++r)
        (goes_left(split, features.row(r)) ? left : right).push_back(r);
    return {std::move(left), std::move(right)};
}

}  // namespace putree
