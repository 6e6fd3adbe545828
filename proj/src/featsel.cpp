#include "gripsense/featsel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace gripsense {

std::vector<std::string> LabeledFeatures::distinct_labels() const {
    std::vector<std::string> out;
    for (const std::string& l : labels) {
        if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(l);
    }
    return out;
}

void LabeledFeatures::validate() const {
    if (static_cast<Eigen::Index>(labels.size()) != rows.rows()) {
        throw std::invalid_argument("LabeledFeatures: label count does not match row count");
    }
    std::map<std::string, int> counts;
    for (const std::string& l : labels) ++counts[l];
    if (counts.size() < 2) {
        throw std::invalid_argument("LabeledFeatures: need at least 2 distinct labels");
    }
    for (const auto& [label, c] : counts) {
        if (c < 2) {
            throw std::invalid_argument("LabeledFeatures: label '" + label +
                                        "' has fewer than 2 rows");
        }
    }
}

Eigen::VectorXd score_features(const LabeledFeatures& data) {
    data.validate();
    const std::vector<std::string> groups = data.distinct_labels();
    const Eigen::Index n = data.count();
    const Eigen::Index d = data.dim();
    const int g = static_cast<int>(groups.size());

    // Row index -> group index.
    std::vector<int> group_of(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        group_of[i] = static_cast<int>(
            std::find(groups.begin(), groups.end(), data.labels[i]) - groups.begin());
    }

    // Per-dimension group centroids.
    Eigen::MatrixXd centroids = Eigen::MatrixXd::Zero(g, d);
    Eigen::VectorXd counts = Eigen::VectorXd::Zero(g);
    for (Eigen::Index i = 0; i < n; ++i) {
        centroids.row(group_of[i]) += data.rows.row(i);
        counts[group_of[i]] += 1.0;
    }
    centroids.array().colwise() /= counts.array();

    Eigen::VectorXd scores(d);
    for (Eigen::Index k = 0; k < d; ++k) {
        double intra = 0.0;
        double inter = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double x = data.rows(i, k);
            intra += std::abs(x - centroids(group_of[i], k));
            for (int c = 0; c < g; ++c) {
                if (c != group_of[i]) inter += std::abs(x - centroids(c, k));
            }
        }
        intra /= static_cast<double>(n);
        inter /= static_cast<double>(n * (g - 1));
        scores[k] = inter > 0.0 ? intra / inter
                                : std::numeric_limits<double>::infinity();
    }
    return scores;
}

SelectionMask select(const LabeledFeatures& data, double threshold) {
    if (!(threshold > 0.0)) {
        throw std::invalid_argument("select: threshold must be positive");
    }
    SelectionMask mask;
    mask.scores = score_features(data);
    mask.threshold = threshold;
    mask.selected = mask.scores.array() < threshold;
    if (mask.count() == 0) {
        throw SelectionError(
            "select: no dimension scored below the threshold; increase it");
    }
    return mask;
}

Eigen::MatrixXd apply_mask(const Eigen::MatrixXd& rows, const SelectionMask& mask) {
    if (rows.cols() != mask.dim()) {
        throw std::invalid_argument("apply_mask: dimension mismatch");
    }
    Eigen::MatrixXd out(rows.rows(), mask.count());
    Eigen::Index j = 0;
    for (Eigen::Index k = 0; k < mask.dim(); ++k) {
        if (mask.selected[k]) out.col(j++) = rows.col(k);
    }
    return out;
}

Eigen::VectorXd apply_mask(const Eigen::VectorXd& row, const SelectionMask& mask) {
    if (row.size() != mask.dim()) {
        throw std::invalid_argument("apply_mask: dimension mismatch");
    }
    Eigen::VectorXd out(mask.count());
    Eigen::Index j = 0;
    for (Eigen::Index k = 0; k < mask.dim(); ++k) {
        if (mask.selected[k]) out[j++] = row[k];
    }
    return out;
}

}  // namespace gripsense
