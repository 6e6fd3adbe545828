#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gripsense/featsel.hpp"
#include "gripsense/signal.hpp"
#include "gripsense/types.hpp"

// Holder verification: LDA and linear-SVM trainers over selected features,
// confidence-thresholded decisions, and a persistent profile store.

namespace gripsense {

// Reserved class label for the pooled non-user cohort bundled into training
// sets; verify() reports it as Unknown rather than as an identified holder.
inline constexpr const char* kNegativeLabel = "negative";

inline constexpr double kDefaultConfidenceThreshold = 0.6;
inline constexpr double kLdaRidgeFraction = 1e-3;  // lambda = frac*tr(Cov)/dim
inline constexpr double kSvmDefaultC = 1.0;
inline constexpr double kSvmTolerance = 1e-6;
inline constexpr int kSvmMaxEpochs = 2000;

enum class ModelKind : std::uint8_t { Lda = 0, Svm = 1 };

ModelKind model_kind_from_name(const std::string& name);  // "lda" | "svm"
std::string model_kind_name(ModelKind kind);

// Per-dimension z-scoring fitted on training data; constant dimensions get
// unit scale so they pass through unchanged.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;

    Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
    Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
};

Standardizer fit_standardizer(const Eigen::MatrixXd& rows);

// Full-width labeled rows plus the mask restricting them to selected
// dimensions.  Class list = registered users plus a negative cohort label.
struct TrainingSet {
    LabeledFeatures data;
    SelectionMask mask;

    void validate() const;
};

struct LdaModel {
    Eigen::MatrixXd means;       // class x dim, standardized space
    Eigen::MatrixXd covariance;  // pooled + ridge
    Eigen::VectorXd priors;
    // Derived discriminant form; rebuilt deterministically from the fields
    // above (also after load), never serialized.
    Eigen::MatrixXd coef;
    Eigen::VectorXd intercept;

    void finalize();  // throws TrainingError if covariance is not SPD
};

struct SvmModel {
    Eigen::MatrixXd weights;  // class x dim, one-vs-rest
    Eigen::VectorXd bias;
    Eigen::VectorXd calib_a;  // per-class logistic calibration p = s(a*score+b)
    Eigen::VectorXd calib_b;
};

struct VerifierModel {
    ModelKind kind = ModelKind::Lda;
    std::vector<std::string> classes;
    SelectionMask mask;
    Standardizer standardizer;
    LdaModel lda;  // populated when kind == Lda
    SvmModel svm;  // populated when kind == Svm
    double confidence_threshold = kDefaultConfidenceThreshold;
};

struct TrainOptions {
    double svm_c = kSvmDefaultC;
    double tolerance = kSvmTolerance;
    int max_epochs = kSvmMaxEpochs;
    double confidence_threshold = kDefaultConfidenceThreshold;
};

VerifierModel train_lda(const TrainingSet& ts, const TrainOptions& opt = {});
VerifierModel train_svm(const TrainingSet& ts, const TrainOptions& opt = {});
VerifierModel train_model(ModelKind kind, const TrainingSet& ts,
                          const TrainOptions& opt = {});

struct Decision {
    std::optional<std::string> identified;  // nullopt = Unknown
    double confidence = 0.0;                // top class probability
    Eigen::VectorXd probabilities;          // aligned with model classes
};

// Per-class probabilities for a full-width feature vector (mask and
// standardization applied internally).  Throws on dimension mismatch.
Eigen::VectorXd class_probabilities(const VerifierModel& model,
                                    const Eigen::VectorXd& fv);

// Argmax of class_probabilities; Unknown when below confidence_threshold.
Decision verify(const VerifierModel& model, const Eigen::VectorXd& fv);

// --- Profile store ---

struct ProfileMetadata {
    SignalSpec signal;          // probe design the profile was enrolled with
    std::string device;         // preset name
    std::string environment;
    double jam_threshold_db = 0.0;  // calibrated gap-energy alarm level
    std::uint64_t enroll_seed = 0;
};

struct Profile {
    VerifierModel model;
    ProfileMetadata meta;
};

// Versioned binary container (magic "ECHL", u16 version, payload, CRC32).
// Writes are atomic (temp file + rename); round-trips are bit-exact.
void save_profile(const VerifierModel& model, const ProfileMetadata& meta,
                  const std::string& path);
Profile load_profile(const std::string& path);

}  // namespace gripsense
