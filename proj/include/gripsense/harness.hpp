#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gripsense/classify.hpp"
#include "gripsense/features.hpp"
#include "gripsense/simchan.hpp"

// Experiment harness: synthetic-cohort dataset builds, cross-validation,
// metrics, ROC, sequence-length studies, and scripted attack scenarios.

namespace gripsense {

// --- Metrics ---

// Identification outcomes per true class; the extra last column counts
// Unknown decisions (a miss for the true class, never a false positive).
struct ConfusionMatrix {
    std::vector<std::string> classes;
    Eigen::MatrixXi counts;  // classes x (classes + 1)

    explicit ConfusionMatrix(std::vector<std::string> class_labels);
    void add(const std::string& true_label,
             const std::optional<std::string>& predicted);
    int class_index(const std::string& label) const;  // -1 if absent
    int total() const;
    double accuracy() const;
};

// precision is NaN when the class was never predicted (TP+FP = 0).
struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
};

PrecisionRecall precision_recall(const ConfusionMatrix& cm, const std::string& cls);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

// Threshold sweep over the pooled score set; a step curve from (0,0) to (1,1).
std::vector<RocPoint> roc_points(const std::vector<double>& positive_scores,
                                 const std::vector<double>& negative_scores);

// --- Synthetic cohort pipeline ---

struct CohortConfig {
    SignalSpec signal;        // signal.n_chirps = chirps per sequence
    DevicePreset device;
    Environment env;
    int cohort = 20;
    int sequences_per_user = 40;
    std::uint64_t seed = 1;
};

// capture -> bandpass -> matched-filter segmentation -> per-segment features
// averaged into one row.  Throws SegmentationError when chirps are missing.
FeatureVector sequence_features(const Recording& rec, const SignalSpec& signal);

// Simulate every sequence of every cohort member and stack the rows.
LabeledFeatures build_cohort_dataset(const CohortConfig& cfg);

// Mean clean-capture gap band energy over `runs` seeded simulations, plus
// the alarm offset: the jamming detection threshold for this setup.
double calibrate_jam_threshold(const CohortConfig& cfg, int runs = 20);

// --- Cross-validation ---

struct EvalOptions {
    ModelKind classifier = ModelKind::Lda;
    double select_threshold = kDefaultSelectThreshold;
    double confidence_threshold = kDefaultConfidenceThreshold;
};

struct EvalReport {
    ConfusionMatrix cm;
    double accuracy = 0.0;
    std::vector<PrecisionRecall> per_class;  // aligned with cm.classes
    std::string mode;                        // e.g. "kfold-10", "holdout-50"
    std::string classifier;
    std::uint64_t seed = 0;
};

// Deterministic stratified assignment of rows to folds (exposed so tests can
// reproduce the exact split).
std::vector<int> stratified_fold_assignment(const std::vector<std::string>& labels,
                                            int k, std::uint64_t seed);

// Stratified k-fold cross-validation.  Selection mask and standardization are
// refitted on each fold's training split only.
EvalReport kfold(const LabeledFeatures& data, int k, std::uint64_t seed,
                 const EvalOptions& opt = {});

// Stratified single split (train_fraction of each class trains the model).
EvalReport holdout(const LabeledFeatures& data, double train_fraction,
                   std::uint64_t seed, const EvalOptions& opt = {});

// Accuracy per sequence length n (other config fields held fixed; the same
// cohort is reused across n values).
std::vector<std::pair<int, double>> nchirp_study(const CohortConfig& base,
                                                 const std::vector<int>& n_values,
                                                 int folds, const EvalOptions& opt = {});

// --- Attack scenarios ---

enum class AttackKind {
    ImpersonationInformed,    // attacker hand within one jitter of the victim
    ImpersonationUninformed,  // attacker hands drawn at random
    Replay,                   // eavesdrop + re-broadcast over two air hops
    Jamming,                  // in-band sweep flooding
};

AttackKind attack_kind_from_name(const std::string& name);
std::string attack_kind_name(AttackKind kind);

struct AttackSpec {
    AttackKind kind = AttackKind::ImpersonationUninformed;
    int attackers = 20;
    int attempts = 10;
    int legit_trials = 50;         // fresh victim captures for the TP side
    double eavesdrop_m = 0.2;      // replay hop 1
    double replay_m = 0.2;         // replay hop 2
    int replay_trials = 90;
    double jam_distance_m = 0.2;
    double jam_power_db = 0.0;
    int jam_trials = 100;
};

// A victim profile trained against the rest of the cohort merged into the
// negative class, plus everything needed to run fresh verification attempts.
struct VictimSetup {
    VerifierModel model;
    HandProfile victim;
    std::vector<HandProfile> decoys;  // rest of the cohort
    CohortConfig cfg;
    double jam_threshold_db = 0.0;
};

VictimSetup enroll_victim(const CohortConfig& cfg, int victim_index,
                          const EvalOptions& opt = {});

struct AttackReport {
    AttackKind kind = AttackKind::ImpersonationUninformed;
    int legit_trials = 0;
    int legit_accepted = 0;
    int attack_trials = 0;
    int attack_accepted = 0;
    std::vector<RocPoint> roc;   // victim-probability sweep (impersonation)
    int jam_trials = 0;
    int jam_detected = 0;
    int clean_trials = 0;
    int clean_false_alarms = 0;
    int suppressed_identifications = 0;  // jammed trials that broke the pipeline

    double tp_rate() const {
        return legit_trials > 0 ? static_cast<double>(legit_accepted) / legit_trials : 0.0;
    }
    double fp_rate() const {
        return attack_trials > 0 ? static_cast<double>(attack_accepted) / attack_trials : 0.0;
    }
};

AttackReport run_attack_suite(const VictimSetup& victim, const AttackSpec& spec,
                              std::uint64_t seed);

// --- Report files ---

void write_eval_csv(const std::string& path, const EvalReport& report);
void write_roc_points(const std::string& path, const std::vector<RocPoint>& roc);
void write_attack_csv(const std::string& path, const AttackReport& report);
std::string summarize(const EvalReport& report);
std::string summarize(const AttackReport& report);
void write_features_csv(const std::string& path, const LabeledFeatures& data);

}  // namespace gripsense
