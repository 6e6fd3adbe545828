#include "gripsense/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

#include "gripsense/dsp.hpp"
#include "gripsense/rng.hpp"

namespace gripsense {

// --- Metrics ---

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> class_labels)
    : classes(std::move(class_labels)) {
    counts = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(classes.size()),
                                   static_cast<Eigen::Index>(classes.size()) + 1);
}

int ConfusionMatrix::class_index(const std::string& label) const {
    const auto it = std::find(classes.begin(), classes.end(), label);
    return it == classes.end() ? -1 : static_cast<int>(it - classes.begin());
}

void ConfusionMatrix::add(const std::string& true_label,
                          const std::optional<std::string>& predicted) {
    const int r = class_index(true_label);
    if (r < 0) throw std::invalid_argument("ConfusionMatrix: unknown true label " + true_label);
    if (!predicted.has_value()) {
        counts(r, counts.cols() - 1) += 1;  // Unknown column
        return;
    }
    const int c = class_index(*predicted);
    if (c < 0) throw std::invalid_argument("ConfusionMatrix: unknown predicted label " + *predicted);
    counts(r, c) += 1;
}

int ConfusionMatrix::total() const { return counts.sum(); }

double ConfusionMatrix::accuracy() const {
    const int t = total();
    if (t == 0) return 0.0;
    int correct = 0;
    for (Eigen::Index i = 0; i < counts.rows(); ++i) correct += counts(i, i);
    return static_cast<double>(correct) / t;
}

PrecisionRecall precision_recall(const ConfusionMatrix& cm, const std::string& cls) {
    const int idx = cm.class_index(cls);
    if (idx < 0) throw std::invalid_argument("precision_recall: unknown class " + cls);
    const int tp = cm.counts(idx, idx);
    const int predicted = cm.counts.col(idx).sum();           // TP + FP
    const int actual = cm.counts.row(idx).sum();              // TP + FN (incl Unknown)
    PrecisionRecall pr;
    pr.precision = predicted > 0 ? static_cast<double>(tp) / predicted
                                 : std::numeric_limits<double>::quiet_NaN();
    pr.recall = actual > 0 ? static_cast<double>(tp) / actual
                           : std::numeric_limits<double>::quiet_NaN();
    return pr;
}

std::vector<RocPoint> roc_points(const std::vector<double>& positive_scores,
                                 const std::vector<double>& negative_scores) {
    std::vector<RocPoint> out;
    out.push_back({0.0, 0.0});
    if (!positive_scores.empty() && !negative_scores.empty()) {
        std::vector<double> thresholds = positive_scores;
        thresholds.insert(thresholds.end(), negative_scores.begin(),
                          negative_scores.end());
        std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
        thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                         thresholds.end());
        const double np = static_cast<double>(positive_scores.size());
        const double nn = static_cast<double>(negative_scores.size());
        for (double t : thresholds) {
            const auto geq = [t](double s) { return s >= t; };
            const double tp = std::count_if(positive_scores.begin(),
                                            positive_scores.end(), geq);
            const double fp = std::count_if(negative_scores.begin(),
                                            negative_scores.end(), geq);
            out.push_back({fp / nn, tp / np});
        }
    }
    out.push_back({1.0, 1.0});
    return out;
}

// --- Synthetic cohort pipeline ---

FeatureVector sequence_features(const Recording& rec, const SignalSpec& signal) {
    const Waveform tmpl = make_chirp(signal);
    const Recording banded = bandpass(rec, signal.f_start, signal.f_end);
    const std::vector<Segment> segs = segment(banded, tmpl, signal.n_chirps);
    FeatureVector acc = FeatureVector::Zero();
    for (const Segment& s : segs) acc += extract(s);
    return acc / static_cast<double>(segs.size());
}

LabeledFeatures build_cohort_dataset(const CohortConfig& cfg) {
    if (cfg.cohort < 1) throw std::invalid_argument("build_cohort_dataset: cohort must be >= 1");
    if (cfg.sequences_per_user < 1) {
        throw std::invalid_argument("build_cohort_dataset: sequences_per_user must be >= 1");
    }
    const std::vector<HandProfile> cohort =
        make_hand_cohort(cfg.cohort, rng::derive(cfg.seed, "cohort"));
    const Waveform tx = make_sequence(cfg.signal);

    LabeledFeatures data;
    data.rows.resize(static_cast<Eigen::Index>(cfg.cohort) * cfg.sequences_per_user,
                     kFeatureDim);
    data.labels.reserve(static_cast<std::size_t>(data.rows.rows()));

    Eigen::Index row = 0;
    for (int u = 0; u < cfg.cohort; ++u) {
        for (int s = 0; s < cfg.sequences_per_user; ++s) {
            const std::uint64_t sim_seed = rng::derive(
                cfg.seed, "sim",
                static_cast<std::uint64_t>(u) * 1000000ULL + static_cast<std::uint64_t>(s));
            const Recording rec =
                simulate_hold(tx, cohort[u], cfg.device, cfg.env, sim_seed);
            data.rows.row(row++) = sequence_features(rec, cfg.signal).transpose();
            data.labels.push_back(cohort[u].user_id);
        }
    }
    return data;
}

double calibrate_jam_threshold(const CohortConfig& cfg, int runs) {
    if (runs < 1) throw std::invalid_argument("calibrate_jam_threshold: runs must be >= 1");
    const std::vector<HandProfile> cohort =
        make_hand_cohort(cfg.cohort, rng::derive(cfg.seed, "cohort"));
    const Waveform tx = make_sequence(cfg.signal);
    double mean = 0.0;
    for (int i = 0; i < runs; ++i) {
        const Recording rec = simulate_hold(
            tx, cohort[static_cast<std::size_t>(i) % cohort.size()], cfg.device,
            cfg.env, rng::derive(cfg.seed, "jamcal", static_cast<std::uint64_t>(i)));
        mean += gap_band_energy_db(rec, cfg.signal.chirp_len);
    }
    return mean / runs + kJamThresholdOffsetDb;
}

// --- Cross-validation ---

std::vector<int> stratified_fold_assignment(const std::vector<std::string>& labels,
                                            int k, std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("fold assignment: k must be >= 2");
    std::map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < labels.size(); ++i) groups[labels[i]].push_back(i);

    rng::Stream rs(rng::derive(seed, "folds"));
    std::vector<int> fold_of(labels.size(), -1);
    for (auto& [label, idx] : groups) {
        if (static_cast<int>(idx.size()) < k) {
            throw std::invalid_argument("fold assignment: class '" + label +
                                        "' has fewer rows than folds");
        }
        for (std::size_t i = idx.size(); i > 1; --i) {  // Fisher-Yates
            std::swap(idx[i - 1], idx[rs.below(i)]);
        }
        for (std::size_t i = 0; i < idx.size(); ++i) {
            fold_of[idx[i]] = static_cast<int>(i % static_cast<std::size_t>(k));
        }
    }
    return fold_of;
}

namespace {

LabeledFeatures take_rows(const LabeledFeatures& data,
                          const std::vector<Eigen::Index>& which) {
    LabeledFeatures out;
    out.rows.resize(static_cast<Eigen::Index>(which.size()), data.dim());
    out.labels.reserve(which.size());
    Eigen::Index r = 0;
    for (Eigen::Index i : which) {
        out.rows.row(r++) = data.rows.row(i);
        out.labels.push_back(data.labels[static_cast<std::size_t>(i)]);
    }
    return out;
}

EvalReport evaluate_splits(const LabeledFeatures& data,
                           const std::vector<std::vector<Eigen::Index>>& train_sets,
                           const std::vector<std::vector<Eigen::Index>>& test_sets,
                           const EvalOptions& opt, std::string mode,
                           std::uint64_t seed) {
    const std::vector<std::string> classes = data.distinct_labels();
    ConfusionMatrix cm(classes);

    TrainOptions topt;
    topt.confidence_threshold = opt.confidence_threshold;
    for (std::size_t split = 0; split < train_sets.size(); ++split) {
        const LabeledFeatures train = take_rows(data, train_sets[split]);
        const SelectionMask mask = select(train, opt.select_threshold);
        const VerifierModel model =
            train_model(opt.classifier, TrainingSet{train, mask}, topt);
        for (Eigen::Index i : test_sets[split]) {
            const Decision d = verify(model, data.rows.row(i).transpose());
            cm.add(data.labels[static_cast<std::size_t>(i)], d.identified);
        }
    }

    EvalReport report{std::move(cm), 0.0, {}, std::move(mode),
                      model_kind_name(opt.classifier), seed};
    report.accuracy = report.cm.accuracy();
    for (const std::string& c : classes) {
        report.per_class.push_back(precision_recall(report.cm, c));
    }
    return report;
}

}  // namespace

EvalReport kfold(const LabeledFeatures& data, int k, std::uint64_t seed,
                 const EvalOptions& opt) {
    data.validate();
    const std::vector<int> fold_of = stratified_fold_assignment(data.labels, k, seed);
    std::vector<std::vector<Eigen::Index>> train_sets(static_cast<std::size_t>(k));
    std::vector<std::vector<Eigen::Index>> test_sets(static_cast<std::size_t>(k));
    for (Eigen::Index i = 0; i < data.count(); ++i) {
        for (int f = 0; f < k; ++f) {
            if (fold_of[static_cast<std::size_t>(i)] == f) {
                test_sets[static_cast<std::size_t>(f)].push_back(i);
            } else {
                train_sets[static_cast<std::size_t>(f)].push_back(i);
            }
        }
    }
    return evaluate_splits(data, train_sets, test_sets, opt,
                           "kfold-" + std::to_string(k), seed);
}

EvalReport holdout(const LabeledFeatures& data, double train_fraction,
                   std::uint64_t seed, const EvalOptions& opt) {
    data.validate();
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw std::invalid_argument("holdout: train_fraction must be in (0,1)");
    }
    std::map<std::string, std::vector<Eigen::Index>> groups;
    for (Eigen::Index i = 0; i < data.count(); ++i) groups[data.labels[static_cast<std::size_t>(i)]].push_back(i);

    rng::Stream rs(rng::derive(seed, "holdout"));
    std::vector<Eigen::Index> train_idx, test_idx;
    for (auto& [label, idx] : groups) {
        for (std::size_t i = idx.size(); i > 1; --i) {
            std::swap(idx[i - 1], idx[rs.below(i)]);
        }
        const std::size_t n_train = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::lround(train_fraction * idx.size())));
        if (n_train >= idx.size()) {
            throw std::invalid_argument("holdout: class '" + label + "' has no test rows");
        }
        for (std::size_t i = 0; i < idx.size(); ++i) {
            (i < n_train ? train_idx : test_idx).push_back(idx[i]);
        }
    }
    const int pct = static_cast<int>(std::lround(train_fraction * 100));
    return evaluate_splits(data, {train_idx}, {test_idx}, opt,
                           "holdout-" + std::to_string(pct), seed);
}

std::vector<std::pair<int, double>> nchirp_study(const CohortConfig& base,
                                                 const std::vector<int>& n_values,
                                                 int folds, const EvalOptions& opt) {
    if (n_values.empty()) throw std::invalid_argument("nchirp_study: no n values");
    std::vector<std::pair<int, double>> out;
    for (int n : n_values) {
        CohortConfig cfg = base;
        cfg.signal.n_chirps = n;
        const LabeledFeatures data = build_cohort_dataset(cfg);
        const EvalReport report = kfold(data, folds, cfg.seed, opt);
        out.emplace_back(n, report.accuracy);
    }
    return out;
}

// --- Attack scenarios ---

AttackKind attack_kind_from_name(const std::string& name) {
    if (name == "impersonation" || name == "impersonation_uninformed") {
        return AttackKind::ImpersonationUninformed;
    }
    if (name == "impersonation_informed") return AttackKind::ImpersonationInformed;
    if (name == "replay") return AttackKind::Replay;
    if (name == "jamming") return AttackKind::Jamming;
    throw std::invalid_argument("unknown attack kind: " + name);
}

std::string attack_kind_name(AttackKind kind) {
    switch (kind) {
        case AttackKind::ImpersonationInformed: return "impersonation_informed";
        case AttackKind::ImpersonationUninformed: return "impersonation_uninformed";
        case AttackKind::Replay: return "replay";
        case AttackKind::Jamming: return "jamming";
    }
    return "unknown";
}

VictimSetup enroll_victim(const CohortConfig& cfg, int victim_index,
                          const EvalOptions& opt) {
    if (victim_index < 0 || victim_index >= cfg.cohort) {
        throw std::invalid_argument("enroll_victim: victim index out of range");
    }
    const std::vector<HandProfile> cohort =
        make_hand_cohort(cfg.cohort, rng::derive(cfg.seed, "cohort"));

    LabeledFeatures data = build_cohort_dataset(cfg);
    const SelectionMask mask = select(data, opt.select_threshold);
    // Every cohort member stays its own class: a pooled rest class would
    // leave the victim's acceptance region a halfspace, and fresh hands on
    // the victim's side of that single boundary would sail through.  With
    // per-user classes the region is hemmed in from every direction the
    // cohort covers, and any non-victim winner counts as rejection.

    TrainOptions topt;
    topt.confidence_threshold = opt.confidence_threshold;
    VictimSetup setup;
    setup.model = train_model(opt.classifier, TrainingSet{data, mask}, topt);
    setup.victim = cohort[static_cast<std::size_t>(victim_index)];
    for (int i = 0; i < cfg.cohort; ++i) {
        if (i != victim_index) setup.decoys.push_back(cohort[static_cast<std::size_t>(i)]);
    }
    setup.cfg = cfg;
    setup.jam_threshold_db = calibrate_jam_threshold(cfg);
    return setup;
}

AttackReport run_attack_suite(const VictimSetup& victim, const AttackSpec& spec,
                              std::uint64_t seed) {
    const CohortConfig& cfg = victim.cfg;
    const Waveform tx = make_sequence(cfg.signal);
    const Waveform tmpl = make_chirp(cfg.signal);
    const std::string& victim_id = victim.victim.user_id;
    const int victim_class = [&] {
        const auto it = std::find(victim.model.classes.begin(),
                                  victim.model.classes.end(), victim_id);
        if (it == victim.model.classes.end()) {
            throw std::invalid_argument("run_attack_suite: victim class missing from model");
        }
        return static_cast<int>(it - victim.model.classes.begin());
    }();

    // Returns the victim-class probability, or nothing when the capture
    // cannot be segmented (counted as a rejection).
    const auto score_recording = [&](const Recording& rec) -> std::optional<double> {
        try {
            const FeatureVector fv = sequence_features(rec, cfg.signal);
            return class_probabilities(victim.model, fv)[victim_class];
        } catch (const SegmentationError&) {
            return std::nullopt;
        }
    };
    const auto accepted = [&](double score) {
        // Accepting as the victim requires the victim class to win the argmax
        // and clear the confidence threshold; probability above 0.5 already
        // implies the argmax, so both collapse to one probability test.
        return score >= victim.model.confidence_threshold && score > 0.5;
    };

    AttackReport report;
    report.kind = spec.kind;

    if (spec.kind == AttackKind::ImpersonationInformed ||
        spec.kind == AttackKind::ImpersonationUninformed) {
        std::vector<double> legit_scores, attack_scores;
        for (int i = 0; i < spec.legit_trials; ++i) {
            const Recording rec =
                simulate_hold(tx, victim.victim, cfg.device, cfg.env,
                              rng::derive(seed, "legit", static_cast<std::uint64_t>(i)));
            const auto s = score_recording(rec);
            report.legit_trials += 1;
            if (s.has_value()) {
                legit_scores.push_back(*s);
                if (accepted(*s)) report.legit_accepted += 1;
            } else {
                legit_scores.push_back(0.0);
            }
        }

        std::vector<HandProfile> attackers;
        if (spec.kind == AttackKind::ImpersonationUninformed) {
            attackers = make_hand_cohort(spec.attackers, rng::derive(seed, "attackers"));
        } else {
            for (int a = 0; a < spec.attackers; ++a) {
                rng::Stream rs(rng::derive(seed, "attacker", static_cast<std::uint64_t>(a)));
                HandProfile h = victim.victim;
                char id[24];
                std::snprintf(id, sizeof id, "attacker%02d", a);
                h.user_id = id;
                for (Contact& c : h.contacts) {
                    c.position = std::clamp(c.position + rs.uniform(-h.jitter_sigma, h.jitter_sigma), 0.0, 1.0);
                    c.pressure = std::clamp(c.pressure + rs.uniform(-h.jitter_sigma, h.jitter_sigma), 0.0, 1.0);
                }
                attackers.push_back(std::move(h));
            }
        }

        for (int a = 0; a < spec.attackers; ++a) {
            for (int t = 0; t < spec.attempts; ++t) {
                const std::uint64_t s = rng::derive(
                    seed, "attack",
                    static_cast<std::uint64_t>(a) * 1000ULL + static_cast<std::uint64_t>(t));
                const Recording rec = simulate_hold(tx, attackers[static_cast<std::size_t>(a)],
                                                    cfg.device, cfg.env, s);
                const auto sc = score_recording(rec);
                report.attack_trials += 1;
                if (sc.has_value()) {
                    attack_scores.push_back(*sc);
                    if (accepted(*sc)) report.attack_accepted += 1;
                } else {
                    attack_scores.push_back(0.0);
                }
            }
        }
        report.roc = roc_points(legit_scores, attack_scores);
        return report;
    }

    if (spec.kind == AttackKind::Replay) {
        // The attacker holds the device while replaying the eavesdropped
        // sample, and the device keeps transmitting its own probe during the
        // attempt; the mic therefore hears the attacker's hand plus the
        // doubly-attenuated replayed capture.
        const HandProfile holder =
            make_hand_cohort(1, rng::derive(seed, "replay_holder"))[0];
        for (int i = 0; i < spec.replay_trials; ++i) {
            const Recording fresh =
                simulate_hold(tx, victim.victim, cfg.device, cfg.env,
                              rng::derive(seed, "victim", static_cast<std::uint64_t>(i)));
            const Recording replayed =
                simulate_replay(fresh, spec.eavesdrop_m, spec.replay_m,
                                rng::derive(seed, "replay", static_cast<std::uint64_t>(i)));
            Recording attempt =
                simulate_hold(tx, holder, cfg.device, cfg.env,
                              rng::derive(seed, "replay_own", static_cast<std::uint64_t>(i)));
            const long n = std::min(attempt.samples.size(), replayed.samples.size());
            attempt.samples.head(n) += replayed.samples.head(n);
            attempt.origin.environment += "+replay";
            const auto s = score_recording(attempt);
            report.attack_trials += 1;
            if (s.has_value() && accepted(*s)) report.attack_accepted += 1;
        }
        return report;
    }

    // Jamming: detection rates on jammed captures, false alarms on clean
    // ones, and whether jamming suppresses identification.
    SignalSpec jam_spec = cfg.signal;
    jam_spec.n_chirps = 1;  // the jammer loops a single sweep back to back
    for (int i = 0; i < spec.jam_trials; ++i) {
        const Recording clean =
            simulate_hold(tx, victim.victim, cfg.device, cfg.env,
                          rng::derive(seed, "cleanbase", static_cast<std::uint64_t>(i)));
        report.clean_trials += 1;
        if (detect_jamming(clean, tmpl, victim.jam_threshold_db).detected) {
            report.clean_false_alarms += 1;
        }

        const Recording base =
            simulate_hold(tx, victim.victim, cfg.device, cfg.env,
                          rng::derive(seed, "jambase", static_cast<std::uint64_t>(i)));
        const Recording jammed =
            inject_jammer(base, jam_spec, spec.jam_power_db, spec.jam_distance_m,
                          rng::derive(seed, "jam", static_cast<std::uint64_t>(i)));
        report.jam_trials += 1;
        if (detect_jamming(jammed, tmpl, victim.jam_threshold_db).detected) {
            report.jam_detected += 1;
            report.suppressed_identifications += 1;  // policy: no identify after alarm
        } else {
            const auto s = score_recording(jammed);
            report.attack_trials += 1;
            if (s.has_value() && accepted(*s)) report.attack_accepted += 1;
        }
    }
    return report;
}

// --- Report files ---

namespace {

std::string fmt_metric(double v) {
    if (std::isnan(v)) return "n/a";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << text;
}

}  // namespace

void write_eval_csv(const std::string& path, const EvalReport& report) {
    std::string text = "mode,classifier,seed,class,precision,recall\n";
    for (std::size_t i = 0; i < report.cm.classes.size(); ++i) {
        text += report.mode + "," + report.classifier + "," +
                std::to_string(report.seed) + "," + report.cm.classes[i] + "," +
                fmt_metric(report.per_class[i].precision) + "," +
                fmt_metric(report.per_class[i].recall) + "\n";
    }
    write_text(path, text);
}

void write_roc_points(const std::string& path, const std::vector<RocPoint>& roc) {
    std::string text = "# fpr tpr\n";
    char buf[64];
    for (const RocPoint& p : roc) {
        std::snprintf(buf, sizeof buf, "%.6f %.6f\n", p.fpr, p.tpr);
        text += buf;
    }
    write_text(path, text);
}

void write_attack_csv(const std::string& path, const AttackReport& report) {
    std::string text =
        "attack,legit_trials,legit_accepted,attack_trials,attack_accepted,"
        "jam_trials,jam_detected,clean_trials,clean_false_alarms\n";
    text += attack_kind_name(report.kind) + "," + std::to_string(report.legit_trials) +
            "," + std::to_string(report.legit_accepted) + "," +
            std::to_string(report.attack_trials) + "," +
            std::to_string(report.attack_accepted) + "," +
            std::to_string(report.jam_trials) + "," + std::to_string(report.jam_detected) +
            "," + std::to_string(report.clean_trials) + "," +
            std::to_string(report.clean_false_alarms) + "\n";
    write_text(path, text);
}

std::string summarize(const EvalReport& report) {
    std::string text;
    text += "mode:        " + report.mode + "\n";
    text += "classifier:  " + report.classifier + "\n";
    text += "seed:        " + std::to_string(report.seed) + "\n";
    text += "samples:     " + std::to_string(report.cm.total()) + "\n";
    text += "accuracy:    " + fmt_metric(report.accuracy) + "\n";
    text += "class                precision   recall\n";
    for (std::size_t i = 0; i < report.cm.classes.size(); ++i) {
        char line[96];
        std::snprintf(line, sizeof line, "%-20s %-11s %s\n",
                      report.cm.classes[i].c_str(),
                      fmt_metric(report.per_class[i].precision).c_str(),
                      fmt_metric(report.per_class[i].recall).c_str());
        text += line;
    }
    return text;
}

std::string summarize(const AttackReport& report) {
    std::string text;
    text += "attack:          " + attack_kind_name(report.kind) + "\n";
    if (report.legit_trials > 0) {
        text += "legit accepted:  " + std::to_string(report.legit_accepted) + "/" +
                std::to_string(report.legit_trials) + "\n";
    }
    if (report.attack_trials > 0 || report.kind != AttackKind::Jamming) {
        text += "attack accepted: " + std::to_string(report.attack_accepted) + "/" +
                std::to_string(report.attack_trials) + "\n";
    }
    if (report.jam_trials > 0) {
        text += "jam detected:    " + std::to_string(report.jam_detected) + "/" +
                std::to_string(report.jam_trials) + "\n";
        text += "false alarms:    " + std::to_string(report.clean_false_alarms) + "/" +
                std::to_string(report.clean_trials) + "\n";
        text += "suppressed ids:  " + std::to_string(report.suppressed_identifications) + "\n";
    }
    return text;
}

void write_features_csv(const std::string& path, const LabeledFeatures& data) {
    std::string text = "label";
    for (const std::string& name : feature_names()) text += "," + name;
    text += "\n";
    char buf[40];
    for (Eigen::Index i = 0; i < data.count(); ++i) {
        text += data.labels[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < data.dim(); ++j) {
            std::snprintf(buf, sizeof buf, ",%.17g", data.rows(i, j));
            text += buf;
        }
        text += "\n";
    }
    write_text(path, text);
}

}  // namespace gripsense
