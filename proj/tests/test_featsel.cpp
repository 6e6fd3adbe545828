#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "doctest.h"
#include "gripsense/featsel.hpp"
#include "gripsense/rng.hpp"
#include "oracle.hpp"

using namespace gripsense;

namespace {

// Rows drawn per label: column 0 separates the labels cleanly, column 1 is
// the same noise for everyone, column 2 is constant.
LabeledFeatures make_dataset(int per_label, int labels, std::uint64_t seed,
                             double separation = 3.0) {
    rng::Stream stream(seed);
    LabeledFeatures data;
    data.rows.resize(per_label * labels, 3);
    for (int g = 0; g < labels; ++g) {
        for (int i = 0; i < per_label; ++i) {
            const int r = g * per_label + i;
            data.rows(r, 0) = separation * g + stream.gaussian();
            data.rows(r, 1) = stream.gaussian();
            data.rows(r, 2) = 7.0;
            data.labels.push_back("user" + std::to_string(g));
        }
    }
    return data;
}

}  // namespace

TEST_CASE("a perfectly separating dimension scores zero") {
    LabeledFeatures data;
    data.rows.resize(4, 2);
    data.rows << 0.0, 5.0,
                 0.0, 6.0,
                 1.0, 5.5,
                 1.0, 6.5;
    data.labels = {"a", "a", "b", "b"};
    const Eigen::VectorXd scores = score_features(data);
    CHECK(scores[0] == 0.0);  // zero intra spread, nonzero inter spread
    CHECK(scores[1] > 0.0);
}

TEST_CASE("an uninformative dimension scores near one") {
    const LabeledFeatures data = make_dataset(200, 2, 11, /*separation=*/0.0);
    const Eigen::VectorXd scores = score_features(data);
    CHECK(std::fabs(scores[0] - 1.0) < 0.25);
    CHECK(std::fabs(scores[1] - 1.0) < 0.25);
}

TEST_CASE("separable beats noisy and the default threshold splits them") {
    const LabeledFeatures data = make_dataset(60, 4, 21, /*separation=*/6.0);
    const Eigen::VectorXd scores = score_features(data);
    CHECK(scores[0] < scores[1]);
    CHECK(scores[0] < kDefaultSelectThreshold);
    CHECK(scores[1] > kDefaultSelectThreshold);

    const SelectionMask mask = select(data);
    CHECK(mask.selected[0]);
    CHECK_FALSE(mask.selected[1]);
    CHECK_FALSE(mask.selected[2]);  // coinciding centroids -> +inf
    CHECK(mask.threshold == kDefaultSelectThreshold);
    CHECK(mask.count() == 1);
}

TEST_CASE("scores agree with the brute-force reference") {
    const LabeledFeatures data = make_dataset(15, 3, 31);
    const Eigen::VectorXd scores = score_features(data);

    std::vector<std::vector<double>> rows;
    for (Eigen::Index r = 0; r < data.count(); ++r) {
        rows.emplace_back(data.rows.row(r).begin(), data.rows.row(r).end());
    }
    const std::vector<double> ref = oracle::selection_scores(rows, data.labels);
    REQUIRE(static_cast<Eigen::Index>(ref.size()) == scores.size());
    for (Eigen::Index i = 0; i < scores.size(); ++i) {
        if (std::isinf(ref[i])) {
            CHECK(std::isinf(scores[i]));
        } else {
            CHECK(scores[i] == doctest::Approx(ref[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("degenerate dimensions stay unselected at any finite threshold") {
    const LabeledFeatures data = make_dataset(10, 2, 41);
    CHECK(std::isinf(score_features(data)[2]));

    const SelectionMask all =
        select(data, std::numeric_limits<double>::infinity());
    CHECK(all.selected[0]);
    CHECK(all.selected[1]);
    CHECK_FALSE(all.selected[2]);
    CHECK(all.count() == 2);
}

TEST_CASE("an unreachable threshold raises a selection error") {
    const LabeledFeatures data = make_dataset(10, 2, 51);
    const double min_score = score_features(data).minCoeff();
    CHECK_THROWS_AS(select(data, min_score * 0.5), SelectionError);
}

TEST_CASE("scores ignore row order and per-dimension affine maps") {
    const LabeledFeatures data = make_dataset(12, 3, 61);
    const Eigen::VectorXd base = score_features(data);

    LabeledFeatures shuffled = data;
    rng::Stream stream(777);
    for (Eigen::Index i = shuffled.count() - 1; i > 0; --i) {
        const auto j = static_cast<Eigen::Index>(stream.below(i + 1));
        shuffled.rows.row(i).swap(shuffled.rows.row(j));
        std::swap(shuffled.labels[i], shuffled.labels[j]);
    }
    const Eigen::VectorXd perm = score_features(shuffled);
    for (Eigen::Index i = 0; i < base.size(); ++i) {
        if (!std::isinf(base[i])) CHECK(perm[i] == doctest::Approx(base[i]).epsilon(1e-9));
    }

    LabeledFeatures affine = data;
    affine.rows = affine.rows * 3.7;
    affine.rows.array() -= 5.0;
    const Eigen::VectorXd mapped = score_features(affine);
    for (Eigen::Index i = 0; i < base.size(); ++i) {
        if (std::isinf(base[i])) {
            CHECK(std::isinf(mapped[i]));
        } else {
            CHECK(mapped[i] == doctest::Approx(base[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("lowering the threshold never adds dimensions") {
    const LabeledFeatures data = make_dataset(30, 3, 71);
    const SelectionMask loose = select(data, 1.5);
    const SelectionMask tight = select(data, 0.5);
    CHECK(tight.count() <= loose.count());
    for (Eigen::Index i = 0; i < tight.dim(); ++i) {
        if (tight.selected[i]) CHECK(loose.selected[i]);
    }
}

TEST_CASE("datasets without enough structure are rejected") {
    LabeledFeatures one_label;
    one_label.rows = Eigen::MatrixXd::Random(4, 2);
    one_label.labels = {"a", "a", "a", "a"};
    CHECK_THROWS_AS(one_label.validate(), std::invalid_argument);
    CHECK_THROWS_AS(score_features(one_label), std::invalid_argument);

    LabeledFeatures lonely;
    lonely.rows = Eigen::MatrixXd::Random(3, 2);
    lonely.labels = {"a", "a", "b"};  // "b" has a single row
    CHECK_THROWS_AS(lonely.validate(), std::invalid_argument);

    LabeledFeatures skewed;
    skewed.rows = Eigen::MatrixXd::Random(4, 2);
    skewed.labels = {"a", "a", "b"};  // label count mismatch
    CHECK_THROWS_AS(skewed.validate(), std::invalid_argument);
}

TEST_CASE("masking keeps exactly the selected columns") {
    const LabeledFeatures data = make_dataset(10, 2, 81);
    const SelectionMask mask = select(data, 1.5);

    const Eigen::MatrixXd kept = apply_mask(data.rows, mask);
    CHECK(kept.rows() == data.count());
    CHECK(kept.cols() == mask.count());
    Eigen::Index out = 0;
    for (Eigen::Index i = 0; i < mask.dim(); ++i) {
        if (!mask.selected[i]) continue;
        CHECK((kept.col(out) - data.rows.col(i)).cwiseAbs().maxCoeff() == 0.0);
        ++out;
    }

    const Eigen::VectorXd row =
        apply_mask(Eigen::VectorXd(data.rows.row(0).transpose()), mask);
    CHECK(row.size() == mask.count());
    CHECK((row - kept.row(0).transpose()).cwiseAbs().maxCoeff() == 0.0);
}
