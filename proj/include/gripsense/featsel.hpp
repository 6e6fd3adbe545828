#pragma once

#include <string>
#include <vector>

#include "gripsense/types.hpp"

// Per-dimension feature selection by cluster-distance ratio: dimensions whose
// within-user spread is small relative to their between-user spread survive.

namespace gripsense {

inline constexpr double kDefaultSelectThreshold = 0.5;

// Feature rows with one user label per row.
struct LabeledFeatures {
    Eigen::MatrixXd rows;             // one feature vector per row
    std::vector<std::string> labels;  // size == rows.rows()

    Eigen::Index count() const { return rows.rows(); }
    Eigen::Index dim() const { return rows.cols(); }
    std::vector<std::string> distinct_labels() const;
    // Requires >= 2 distinct labels with >= 2 rows each; throws otherwise.
    void validate() const;
};

struct SelectionMask {
    Eigen::VectorXd scores;              // intra/inter ratio per dimension
    Eigen::Array<bool, Eigen::Dynamic, 1> selected;
    double threshold = kDefaultSelectThreshold;

    int count() const { return static_cast<int>(selected.count()); }
    Eigen::Index dim() const { return selected.size(); }
};

// Per dimension: label-group centroids; score = (mean |x - own centroid|) /
// (mean |x - other centroids|), lower is better.  A dimension where all
// centroids coincide scores +infinity and is never selected.
Eigen::VectorXd score_features(const LabeledFeatures& data);

// selected[i] <=> scores[i] < threshold.  Throws SelectionError when no
// dimension qualifies.
SelectionMask select(const LabeledFeatures& data, double threshold = kDefaultSelectThreshold);

// Keep only the selected columns of a full-width matrix / vector.
Eigen::MatrixXd apply_mask(const Eigen::MatrixXd& rows, const SelectionMask& mask);
Eigen::VectorXd apply_mask(const Eigen::VectorXd& row, const SelectionMask& mask);

}  // namespace gripsense
