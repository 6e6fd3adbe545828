#include "gripsense/classify.hpp"


#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace gripsense {

ModelKind model_kind_from_name(const std::string& name) {
    if (name == "lda") return ModelKind::Lda;
    if (name == "svm") return ModelKind::Svm;
    throw std::invalid_argument("unknown classifier kind: " + name);
}

std::string model_kind_name(ModelKind kind) {
    return kind == ModelKind::Lda ? "lda" : "svm";
}

Eigen::VectorXd Standardizer::apply(const Eigen::VectorXd& v) const {
    return (v - mean).cwiseQuotient(scale);
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& rows) const {
    return (rows.rowwise() - mean.transpose()).array().rowwise() /
           scale.transpose().array();
}

Standardizer fit_standardizer(const Eigen::MatrixXd& rows) {
    Standardizer s;
    s.mean = rows.colwise().mean();
    const Eigen::ArrayXd var =
        (rows.rowwise() - s.mean.transpose()).array().square().colwise().mean();
    s.scale = var.sqrt().max(0.0).matrix();
    for (Eigen::Index i = 0; i < s.scale.size(); ++i) {
        if (s.scale[i] == 0.0) s.scale[i] = 1.0;
    }
    return s;
}

void TrainingSet::validate() const {
    data.validate();
    if (data.dim() != mask.dim()) {
        throw std::invalid_argument("TrainingSet: mask dimension does not match rows");
    }
    if (mask.count() < 1) {
        throw std::invalid_argument("TrainingSet: empty selection mask");
    }
}

void LdaModel::finalize() {
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) {
        throw TrainingError("LDA: covariance not positive definite after ridge");
    }
    coef = llt.solve(means.transpose()).transpose();  // class x dim
    intercept.resize(means.rows());
    for (Eigen::Index c = 0; c < means.rows(); ++c) {
        intercept[c] = -0.5 * means.row(c).dot(coef.row(c)) + std::log(priors[c]);
    }
}

namespace {

// Shared trainer preamble: validate, mask, standardize, group rows by class.
struct Prepared {
    std::vector<std::string> classes;
    std::vector<int> class_of;  // per row
    Eigen::MatrixXd z;          // masked + standardized rows
    Standardizer standardizer;
};

Prepared prepare(const TrainingSet& ts) {
    ts.validate();
    Prepared p;
    const Eigen::MatrixXd masked = apply_mask(ts.data.rows, ts.mask);
    p.standardizer = fit_standardizer(masked);
    p.z = p.standardizer.apply(masked);
    p.classes = ts.data.distinct_labels();
    p.class_of.resize(ts.data.count());
    for (Eigen::Index i = 0; i < ts.data.count(); ++i) {
        p.class_of[i] = static_cast<int>(
            std::find(p.classes.begin(), p.classes.end(), ts.data.labels[i]) -
            p.classes.begin());
    }
    return p;
}

// Logistic calibration of decision scores (Platt scaling, Newton iterations
// with smoothed targets so probabilities stay off 0 and 1).
void fit_platt(const Eigen::VectorXd& scores, const std::vector<char>& positive,
               double& a_out, double& b_out) {
    const Eigen::Index n = scores.size();
    double n_pos = 0.0, n_neg = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) (positive[i] ? n_pos : n_neg) += 1.0;
    const double t_pos = (n_pos + 1.0) / (n_pos + 2.0);
    const double t_neg = 1.0 / (n_neg + 2.0);

    double a = 1.0, b = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
        double g_a = 0.0, g_b = 0.0, h_aa = 1e-12, h_ab = 0.0, h_bb = 1e-12;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double t = positive[i] ? t_pos : t_neg;
            const double f = a * scores[i] + b;
            const double p = 1.0 / (1.0 + std::exp(-f));
            const double d = p - t;
            g_a += d * scores[i];
            g_b += d;
            const double w = p * (1.0 - p);
            h_aa += w * scores[i] * scores[i];
            h_ab += w * scores[i];
            h_bb += w;
        }
        const double det = h_aa * h_bb - h_ab * h_ab;
        const double da = (g_a * h_bb - g_b * h_ab) / det;
        const double db = (g_b * h_aa - g_a * h_ab) / det;
        a -= da;
        b -= db;
        if (std::abs(da) < 1e-12 && std::abs(db) < 1e-12) break;
    }
    a_out = a;
    b_out = b;
}

}  // namespace

VerifierModel train_lda(const TrainingSet& ts, const TrainOptions& opt) {
    Prepared p = prepare(ts);
    const int n_classes = static_cast<int>(p.classes.size());
    const Eigen::Index dim = p.z.cols();
    const Eigen::Index n = p.z.rows();

    LdaModel m;
    m.means = Eigen::MatrixXd::Zero(n_classes, dim);
    m.priors = Eigen::VectorXd::Zero(n_classes);
    for (Eigen::Index i = 0; i < n; ++i) {
        m.means.row(p.class_of[i]) += p.z.row(i);
        m.priors[p.class_of[i]] += 1.0;
    }
    for (int c = 0; c < n_classes; ++c) m.means.row(c) /= m.priors[c];
    m.priors /= static_cast<double>(n);

    m.covariance = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd d = p.z.row(i).transpose() - m.means.row(p.class_of[i]).transpose();
        m.covariance += d * d.transpose();
    }
    m.covariance /= static_cast<double>(n);

    const double ridge = std::max(
        kLdaRidgeFraction * m.covariance.trace() / static_cast<double>(dim), 1e-12);
    m.covariance += ridge * Eigen::MatrixXd::Identity(dim, dim);
    m.finalize();

    VerifierModel model;
    model.kind = ModelKind::Lda;
    model.classes = p.classes;
    model.mask = ts.mask;
    model.standardizer = p.standardizer;
    model.lda = std::move(m);
    model.confidence_threshold = opt.confidence_threshold;
    return model;
}

namespace {

// Sweeps over the still-active coordinates between two full passes.
constexpr int kSvmInnerSweeps = 500;

// Deterministic dual coordinate descent for the L1-loss linear SVM
// min 0.5|w|^2 + C * sum hinge(y_i w.x_i), bias folded in as a constant
// feature.  Each budgeted epoch is one cyclic pass over every coordinate
// followed by up to kSvmInnerSweeps passes over the coordinates still off
// their optimality condition (the rest are temporarily shrunk away, which is
// where nearly all the time would otherwise go).  Converged when no
// projected gradient exceeds the tolerance or the relative duality gap --
// primal minus dual objective over max(1, primal) -- falls below it; the
// gap is the certificate that survives degenerate optimal faces, where the
// worst projected gradient decays arbitrarily slowly.  Returns false (with
// the final relative gap) on budget exhaustion.
bool solve_svm_binary(const Eigen::MatrixXd& x_in, const std::vector<double>& y,
                      double c_param, double tol, int max_epochs,
                      Eigen::VectorXd& w_out, double& gap_out) {
    // Row-major copy: the inner loops only ever touch whole rows.
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> x = x_in;
    const Eigen::Index n = x.rows();
    const Eigen::Index dim = x.cols();
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd w = Eigen::VectorXd::Zero(dim);
    Eigen::VectorXd qii(n);
    for (Eigen::Index i = 0; i < n; ++i) qii[i] = x.row(i).squaredNorm();

    const auto sweep = [&](const std::vector<Eigen::Index>& idx) {
        double worst = 0.0;
        for (const Eigen::Index i : idx) {
            if (qii[i] == 0.0) continue;
            const double g = y[i] * w.dot(x.row(i)) - 1.0;
            double pg = g;
            if (alpha[i] <= 0.0 && g > 0.0) pg = 0.0;
            if (alpha[i] >= c_param && g < 0.0) pg = 0.0;
            worst = std::max(worst, std::abs(pg));
            if (pg != 0.0) {
                const double prev = alpha[i];
                alpha[i] = std::clamp(prev - g / qii[i], 0.0, c_param);
                if (alpha[i] != prev) w += (alpha[i] - prev) * y[i] * x.row(i).transpose();
            }
        }
        return worst;
    };

    const auto relative_gap = [&] {
        double hinge = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            hinge += std::max(0.0, 1.0 - y[i] * w.dot(x.row(i)));
        }
        const double primal = 0.5 * w.squaredNorm() + c_param * hinge;
        const double dual = alpha.sum() - 0.5 * w.squaredNorm();
        return (primal - dual) / std::max(1.0, primal);
    };

    std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
    std::vector<Eigen::Index> active;

    bool converged = false;
    for (int epoch = 0; epoch < max_epochs && !converged; ++epoch) {
        const double worst_full = sweep(all);
        if (worst_full < tol || relative_gap() <= tol) {
            converged = true;
            break;
        }
        active.clear();
        for (Eigen::Index i = 0; i < n; ++i) {
            if (qii[i] == 0.0) continue;
            const double g = y[i] * w.dot(x.row(i)) - 1.0;
            const bool at_rest = (alpha[i] <= 0.0 && g > tol) ||
                                 (alpha[i] >= c_param && g < -tol);
            if (!at_rest) active.push_back(i);
        }
        for (int inner = 0; inner < kSvmInnerSweeps; ++inner) {
            if (sweep(active) < 0.5 * tol) break;
        }
    }

    gap_out = relative_gap();
    w_out = std::move(w);
    return converged;
}

}  // namespace

VerifierModel train_svm(const TrainingSet& ts, const TrainOptions& opt) {
    Prepared p = prepare(ts);
    const int n_classes = static_cast<int>(p.classes.size());
    const Eigen::Index n = p.z.rows();
    const Eigen::Index dim = p.z.cols();

    Eigen::MatrixXd augmented(n, dim + 1);
    augmented.leftCols(dim) = p.z;
    augmented.col(dim).setOnes();

    SvmModel m;
    m.weights.resize(n_classes, dim);
    m.bias.resize(n_classes);
    m.calib_a.resize(n_classes);
    m.calib_b.resize(n_classes);

    for (int c = 0; c < n_classes; ++c) {
        std::vector<double> y(n);
        std::vector<char> positive(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            positive[i] = p.class_of[i] == c;
            y[i] = positive[i] ? 1.0 : -1.0;
        }
        Eigen::VectorXd w;
        double gap = 0.0;
        if (!solve_svm_binary(augmented, y, opt.svm_c, opt.tolerance,
                              opt.max_epochs, w, gap)) {
            throw TrainingError("SVM: class '" + p.classes[c] +
                                    "' did not converge within the epoch budget",
                                gap);
        }
        m.weights.row(c) = w.head(dim);
        m.bias[c] = w[dim];

        Eigen::VectorXd scores = augmented * w;
        fit_platt(scores, positive, m.calib_a[c], m.calib_b[c]);
    }

    VerifierModel model;
    model.kind = ModelKind::Svm;
    model.classes = p.classes;
    model.mask = ts.mask;
    model.standardizer = p.standardizer;
    model.svm = std::move(m);
    model.confidence_threshold = opt.confidence_threshold;
    return model;
}

VerifierModel train_model(ModelKind kind, const TrainingSet& ts,
                          const TrainOptions& opt) {
    return kind == ModelKind::Lda ? train_lda(ts, opt) : train_svm(ts, opt);
}

Eigen::VectorXd class_probabilities(const VerifierModel& model,
                                    const Eigen::VectorXd& fv) {
    if (fv.size() != model.mask.dim()) {
        throw std::invalid_argument("verify: feature dimension does not match profile mask");
    }
    const Eigen::VectorXd z = model.standardizer.apply(apply_mask(fv, model.mask));
    const int n_classes = static_cast<int>(model.classes.size());
    Eigen::VectorXd probs(n_classes);

    if (model.kind == ModelKind::Lda) {
        Eigen::VectorXd disc = model.lda.coef * z + model.lda.intercept;
        const double top = disc.maxCoeff();
        probs = (disc.array() - top).exp();
        probs /= probs.sum();
    } else {
        for (int c = 0; c < n_classes; ++c) {
            const double s = model.svm.weights.row(c).dot(z) + model.svm.bias[c];
            const double f = model.svm.calib_a[c] * s + model.svm.calib_b[c];
            probs[c] = 1.0 / (1.0 + std::exp(-f));
        }
        const double total = probs.sum();
        if (total > 0.0) {
            probs /= total;
        } else {
            probs.setConstant(1.0 / n_classes);
        }
    }
    return probs;
}

Decision verify(const VerifierModel& model, const Eigen::VectorXd& fv) {
    Decision d;
    d.probabilities = class_probabilities(model, fv);
    Eigen::Index best = 0;
    d.confidence = d.probabilities.maxCoeff(&best);
    const std::string& winner = model.classes[static_cast<std::size_t>(best)];
    // Winning the pooled negative class means "none of the enrolled users".
    if (d.confidence >= model.confidence_threshold && winner != kNegativeLabel) {
        d.identified = winner;
    }
    return d;
}

}  // namespace gripsense
