// gripsense: chirp synthesis, channel simulation, enrollment, identification,
// evaluation and attack drills from one deterministic seed.
//
// Exit codes: 0 ok/identified, 2 usage or input error, 3 unknown holder,
// 4 jamming detected, 5 internal error.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gripsense/classify.hpp"
#include "gripsense/dsp.hpp"
#include "gripsense/harness.hpp"
#include "gripsense/rng.hpp"
#include "gripsense/wav.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gripsense;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitUnknown = 3;
constexpr int kExitJamming = 4;
constexpr int kExitInternal = 5;

struct CliConfig {
    std::string device = "phone";
    std::string environment = "office";
    int cohort = 20;
    int sequences = 0;          // recordings per user; 0 = per-command default
    int n_chirps = 10;
    std::string classifier = "lda";
    double select_threshold = kDefaultSelectThreshold;
    double confidence_threshold = kDefaultConfidenceThreshold;
    std::uint64_t seed = 1;
    std::string out;            // default: $GRIPSENSE_OUT or "out"
    // evaluate
    std::string mode = "kfold";
    int folds = 10;
    double train_fraction = 0.5;
};

void load_config_file(const std::string& path, CliConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path);
    json j = json::parse(in);
    for (const auto& [key, value] : j.items()) {
        if (key == "device") cfg.device = value.get<std::string>();
        else if (key == "environment") cfg.environment = value.get<std::string>();
        else if (key == "cohort") cfg.cohort = value.get<int>();
        else if (key == "sequences_per_user") {
            cfg.sequences = value.get<int>();
            if (cfg.sequences < 1) throw std::invalid_argument("sequences_per_user must be >= 1");
        }
        else if (key == "n_chirps") cfg.n_chirps = value.get<int>();
        else if (key == "classifier") cfg.classifier = value.get<std::string>();
        else if (key == "select_threshold") cfg.select_threshold = value.get<double>();
        else if (key == "confidence_threshold") cfg.confidence_threshold = value.get<double>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else if (key == "output_dir") cfg.out = value.get<std::string>();
        else if (key == "mode") cfg.mode = value.get<std::string>();
        else if (key == "folds") cfg.folds = value.get<int>();
        else if (key == "train_fraction") cfg.train_fraction = value.get<double>();
        else throw std::invalid_argument("unknown config key \"" + key + "\" in " + path);
    }
}

SignalSpec make_signal(const CliConfig& cfg) {
    SignalSpec spec;
    spec.n_chirps = cfg.n_chirps;
    spec.validate();
    return spec;
}

int resolved_sequences(const CliConfig& cfg, int fallback) {
    return cfg.sequences > 0 ? cfg.sequences : fallback;
}

CohortConfig make_cohort_config(const CliConfig& cfg, int sequences_fallback) {
    CohortConfig cc;
    cc.signal = make_signal(cfg);
    cc.device = device_by_name(cfg.device);
    cc.env = environment_by_name(cfg.environment);
    cc.cohort = cfg.cohort;
    cc.sequences_per_user = resolved_sequences(cfg, sequences_fallback);
    cc.seed = cfg.seed;
    return cc;
}

EvalOptions make_eval_options(const CliConfig& cfg) {
    EvalOptions opt;
    opt.classifier = model_kind_from_name(cfg.classifier);
    opt.select_threshold = cfg.select_threshold;
    opt.confidence_threshold = cfg.confidence_threshold;
    return opt;
}

fs::path ensure_out_dir(const CliConfig& cfg) {
    fs::path dir(cfg.out);
    fs::create_directories(dir);
    return dir;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
}

// --- synth ---

int cmd_synth(const CliConfig& cfg) {
    const SignalSpec spec = make_signal(cfg);
    const DevicePreset device = device_by_name(cfg.device);
    const Environment env = environment_by_name(cfg.environment);
    const int sequences = resolved_sequences(cfg, 1);
    const std::vector<HandProfile> cohort =
        make_hand_cohort(cfg.cohort, rng::derive(cfg.seed, "cohort"));

    const fs::path dir = ensure_out_dir(cfg);
    const Waveform tx = make_sequence(spec);
    write_wav((dir / "transmit.wav").string(), tx);

    json manifest;
    manifest["seed"] = cfg.seed;
    manifest["device"] = device.name;
    manifest["environment"] = env.name;
    manifest["n_chirps"] = spec.n_chirps;
    manifest["sample_rate"] = spec.sample_rate;
    manifest["artifacts"] = json::array();
    manifest["artifacts"].push_back({{"file", "transmit.wav"}, {"seed", cfg.seed}});

    int files = 1;
    for (std::size_t u = 0; u < cohort.size(); ++u) {
        for (int s = 0; s < sequences; ++s) {
            const std::uint64_t sim_seed = rng::derive(
                cfg.seed, "sim", u * 1000000ULL + static_cast<std::uint64_t>(s));
            const Recording rec = simulate_hold(tx, cohort[u], device, env, sim_seed);
            std::string name = cohort[u].user_id;
            if (sequences > 1) {
                char suffix[16];
                std::snprintf(suffix, sizeof suffix, "_s%02d", s);
                name += suffix;
            }
            name += ".wav";
            write_wav((dir / name).string(), rec);
            manifest["artifacts"].push_back(
                {{"file", name}, {"seed", sim_seed}, {"user", cohort[u].user_id}});
            ++files;
        }
    }
    write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
    std::printf("wrote %d wav files + manifest.json to %s\n", files,
                dir.string().c_str());
    return kExitOk;
}

// --- enroll ---

int cmd_enroll(const CliConfig& cfg, const std::vector<std::string>& recordings,
               const std::vector<std::string>& labels, bool synth_negatives,
               int negatives, int negative_sequences, std::string profile_path) {
    if (recordings.empty()) {
        throw std::invalid_argument("enroll needs at least one --recording");
    }
    if (recordings.size() != labels.size()) {
        throw std::invalid_argument("every --recording needs a matching --label (got " +
                                    std::to_string(recordings.size()) + " recordings, " +
                                    std::to_string(labels.size()) + " labels)");
    }
    const SignalSpec spec = make_signal(cfg);
    const DevicePreset device = device_by_name(cfg.device);
    const Environment env = environment_by_name(cfg.environment);

    std::vector<std::string> distinct;
    for (const std::string& l : labels) {
        if (std::find(distinct.begin(), distinct.end(), l) == distinct.end()) {
            distinct.push_back(l);
        }
    }
    if (distinct.size() < 2 && !synth_negatives) {
        throw std::invalid_argument(
            "training needs negative labels: enroll a second user's recordings "
            "or pass --synth-negatives to bundle a synthetic negative cohort");
    }

    std::vector<Eigen::VectorXd> rows;
    std::vector<std::string> row_labels;
    std::vector<std::string> failures;
    double gap_energy_sum = 0.0;
    int gap_energy_count = 0;

    for (std::size_t i = 0; i < recordings.size(); ++i) {
        const Waveform w = read_wav(recordings[i]);
        Recording rec{w.samples, w.sample_rate, {}};
        try {
            rows.push_back(sequence_features(rec, spec));
            row_labels.push_back(labels[i]);
            gap_energy_sum += gap_band_energy_db(rec, spec.chirp_len);
            gap_energy_count += 1;
        } catch (const SegmentationError& e) {
            failures.push_back(recordings[i] + ": " + e.what());
        }
    }
    if (!failures.empty()) {
        std::fprintf(stderr, "enrollment aborted; segmentation failed on %zu input(s):\n",
                     failures.size());
        for (const std::string& f : failures) std::fprintf(stderr, "  %s\n", f.c_str());
        return kExitUsage;
    }

    // Selection labels keep each synthetic decoy distinct so the scorer sees
    // per-hand structure; the trained model pools them into one negative class.
    std::vector<std::string> select_labels = row_labels;
    if (synth_negatives) {
        const Waveform tx = make_sequence(spec);
        const std::vector<HandProfile> decoys =
            make_hand_cohort(negatives, rng::derive(cfg.seed, "negatives"));
        for (std::size_t d = 0; d < decoys.size(); ++d) {
            for (int s = 0; s < negative_sequences; ++s) {
                const std::uint64_t sim_seed = rng::derive(
                    cfg.seed, "negsim", d * 1000ULL + static_cast<std::uint64_t>(s));
                const Recording rec = simulate_hold(tx, decoys[d], device, env, sim_seed);
                rows.push_back(sequence_features(rec, spec));
                row_labels.push_back(kNegativeLabel);
                select_labels.push_back(decoys[d].user_id);
                gap_energy_sum += gap_band_energy_db(rec, spec.chirp_len);
                gap_energy_count += 1;
            }
        }
    }

    LabeledFeatures data;
    data.rows.resize(static_cast<Eigen::Index>(rows.size()), kFeatureDim);
    for (std::size_t i = 0; i < rows.size(); ++i) data.rows.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    data.labels = select_labels;

    const EvalOptions opt = make_eval_options(cfg);
    TrainOptions topt;
    topt.confidence_threshold = opt.confidence_threshold;
    const SelectionMask mask = select(data, opt.select_threshold);
    data.labels = row_labels;
    const VerifierModel model = train_model(opt.classifier, TrainingSet{data, mask}, topt);

    ProfileMetadata meta;
    meta.signal = spec;
    meta.device = device.name;
    meta.environment = env.name;
    meta.jam_threshold_db = gap_energy_sum / gap_energy_count + kJamThresholdOffsetDb;
    meta.enroll_seed = cfg.seed;

    if (profile_path.empty()) profile_path = (ensure_out_dir(cfg) / "profile.echl").string();
    else fs::create_directories(fs::path(profile_path).parent_path().empty()
                                    ? fs::path(".")
                                    : fs::path(profile_path).parent_path());
    save_profile(model, meta, profile_path);
    std::printf("enrolled %zu class(es) from %zu rows (%d features selected) -> %s\n",
                model.classes.size(), rows.size(), mask.count(), profile_path.c_str());
    std::printf("jamming alarm threshold: %.2f dB\n", meta.jam_threshold_db);
    return kExitOk;
}

// --- identify ---

int cmd_identify(const std::string& profile_path, const std::string& recording_path) {
    const Profile profile = load_profile(profile_path);
    const Waveform w = read_wav(recording_path);
    if (w.sample_rate != profile.meta.signal.sample_rate) {
        throw std::invalid_argument("recording sample rate " + std::to_string(w.sample_rate) +
                                    " does not match the profile's " +
                                    std::to_string(profile.meta.signal.sample_rate));
    }
    Recording rec{w.samples, w.sample_rate, {}};

    const Waveform tmpl = make_chirp(profile.meta.signal);
    const JamReport jam = detect_jamming(rec, tmpl, profile.meta.jam_threshold_db);
    if (jam.detected) {
        std::printf("JAMMING band=%.1f dB threshold=%.1f dB excess=+%.1f dB\n",
                    jam.band_energy_db, jam.threshold_db, jam.excess_db);
        return kExitJamming;
    }

    FeatureVector fv;
    try {
        fv = sequence_features(rec, profile.meta.signal);
    } catch (const SegmentationError& e) {
        std::fprintf(stderr, "no usable probe sequence in %s: %s\n",
                     recording_path.c_str(), e.what());
        return kExitUsage;
    }

    const Decision d = verify(profile.model, fv);
    if (d.identified.has_value()) {
        std::printf("IDENTIFIED %s confidence=%.4f\n", d.identified->c_str(), d.confidence);
        return kExitOk;
    }
    Eigen::Index top;
    d.probabilities.maxCoeff(&top);
    std::printf("UNKNOWN confidence=%.4f (closest: %s)\n", d.confidence,
                profile.model.classes[static_cast<std::size_t>(top)].c_str());
    return kExitUnknown;
}

// --- evaluate ---

int cmd_evaluate(const CliConfig& cfg, const std::vector<int>& nchirp_values,
                 const std::string& dump_features) {
    const CohortConfig cc = make_cohort_config(cfg, 40);
    const EvalOptions opt = make_eval_options(cfg);
    const fs::path dir = ensure_out_dir(cfg);

    if (!nchirp_values.empty()) {
        const auto study = nchirp_study(cc, nchirp_values, cfg.folds, opt);
        std::string csv = "n,accuracy\n";
        std::string summary = "sequence-length study (" + cfg.classifier + ", " +
                              std::to_string(cfg.folds) + "-fold, seed " +
                              std::to_string(cfg.seed) + ")\n";
        for (const auto& [n, acc] : study) {
            char line[64];
            std::snprintf(line, sizeof line, "%d,%.6f\n", n, acc);
            csv += line;
            std::snprintf(line, sizeof line, "  n=%-3d accuracy=%.4f\n", n, acc);
            summary += line;
        }
        write_text_file(dir / "nchirp.csv", csv);
        write_text_file(dir / "summary.txt", summary);
        std::fputs(summary.c_str(), stdout);
        return kExitOk;
    }

    const LabeledFeatures data = build_cohort_dataset(cc);
    if (!dump_features.empty()) write_features_csv(dump_features, data);

    EvalReport report =
        cfg.mode == "holdout"
            ? holdout(data, cfg.train_fraction, cfg.seed, opt)
            : kfold(data, cfg.folds, cfg.seed, opt);
    write_eval_csv((dir / "eval.csv").string(), report);
    const std::string summary = summarize(report);
    write_text_file(dir / "summary.txt", summary);
    std::fputs(summary.c_str(), stdout);
    return kExitOk;
}

// --- attack ---

int cmd_attack(const CliConfig& cfg, const std::string& kind_name, int victim_index,
               AttackSpec spec) {
    const CohortConfig cc = make_cohort_config(cfg, 10);
    const EvalOptions opt = make_eval_options(cfg);
    const fs::path dir = ensure_out_dir(cfg);

    const VictimSetup victim = enroll_victim(cc, victim_index, opt);
    std::vector<AttackKind> kinds;
    if (kind_name == "all") {
        kinds = {AttackKind::ImpersonationInformed, AttackKind::ImpersonationUninformed,
                 AttackKind::Replay, AttackKind::Jamming};
    } else {
        kinds = {attack_kind_from_name(kind_name)};
    }

    std::string summary = "victim: " + victim.victim.user_id + " (classifier " +
                          cfg.classifier + ", seed " + std::to_string(cfg.seed) + ")\n";
    for (AttackKind kind : kinds) {
        spec.kind = kind;
        const std::string name = attack_kind_name(kind);
        const AttackReport rep =
            run_attack_suite(victim, spec, rng::derive(cfg.seed, "attack-" + name));
        write_attack_csv((dir / ("attack_" + name + ".csv")).string(), rep);
        if (!rep.roc.empty()) {
            write_roc_points((dir / ("roc_" + name + ".txt")).string(), rep.roc);
        }
        summary += "\n" + summarize(rep);
    }
    write_text_file(dir / "attack_summary.txt", summary);
    std::fputs(summary.c_str(), stdout);
    return kExitOk;
}

std::string env_or(const char* name, const std::string& fallback) {
    const char* v = std::getenv(name);
    return v != nullptr && *v != '\0' ? std::string(v) : fallback;
}

// The config file has to be loaded before CLI11 binds flag values, so that
// explicit flags override it; scan argv for --config by hand.
std::optional<std::string> find_config_arg(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string a = argv[i];
        if (a == "--config" && i + 1 < argc) return std::string(argv[i + 1]);
        if (a.rfind("--config=", 0) == 0) return a.substr(9);
    }
    return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
    CliConfig cfg;
    cfg.out = env_or("GRIPSENSE_OUT", "out");

    try {
        if (const auto path = find_config_arg(argc, argv)) load_config_file(*path, cfg);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    }

    CLI::App app{"acoustic hand-biometric identification workbench"};
    app.require_subcommand(1);
    std::string config_path;  // consumed by the pre-scan; registered for --help

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (flags override it)");
        sub->add_option("--device", cfg.device, "device preset: phone|phone_compact|tablet");
        sub->add_option("--env", cfg.environment, "environment preset: office|public");
        sub->add_option("--n-chirps", cfg.n_chirps, "chirps per probe sequence")
            ->check(CLI::PositiveNumber);
        sub->add_option("--seed", cfg.seed, "master seed; all randomness derives from it");
        sub->add_option("--out", cfg.out, "output directory (default $GRIPSENSE_OUT or ./out)");
    };
    const auto add_model_opts = [&](CLI::App* sub) {
        sub->add_option("--classifier", cfg.classifier, "lda|svm");
        sub->add_option("--select-threshold", cfg.select_threshold,
                        "feature-selection score threshold");
        sub->add_option("--confidence-threshold", cfg.confidence_threshold,
                        "minimum top-class probability to identify");
    };

    CLI::App* synth = app.add_subcommand("synth", "write probe + simulated capture WAVs");
    add_common(synth);
    synth->add_option("--cohort", cfg.cohort, "number of simulated users")
        ->check(CLI::PositiveNumber);
    synth->add_option("--sequences", cfg.sequences, "recordings per user")
        ->check(CLI::PositiveNumber);

    CLI::App* enroll = app.add_subcommand("enroll", "train a profile from recordings");
    add_common(enroll);
    add_model_opts(enroll);
    std::vector<std::string> enroll_recordings, enroll_labels;
    bool synth_negatives = false;
    int negatives = 10, negative_sequences = 3;
    std::string profile_path;
    enroll->add_option("--recording", enroll_recordings, "capture WAV (repeatable)");
    enroll->add_option("--label", enroll_labels, "user label for the matching --recording");
    enroll->add_flag("--synth-negatives", synth_negatives,
                     "bundle a simulated negative cohort");
    enroll->add_option("--negatives", negatives, "negative cohort size")
        ->check(CLI::PositiveNumber);
    enroll->add_option("--negative-sequences", negative_sequences,
                       "recordings per negative user")
        ->check(CLI::PositiveNumber);
    enroll->add_option("--profile", profile_path, "profile output path (.echl)");

    CLI::App* identify = app.add_subcommand("identify", "verify one capture against a profile");
    std::string id_profile, id_recording;
    identify->add_option("--profile", id_profile, "profile file")->required();
    identify->add_option("--recording", id_recording, "capture WAV")->required();
    identify->add_option("--config", config_path, "JSON config file (unused fields ignored)");

    CLI::App* evaluate = app.add_subcommand("evaluate", "cohort identification study");
    add_common(evaluate);
    add_model_opts(evaluate);
    std::vector<int> nchirp_values;
    std::string dump_features;
    evaluate->add_option("--cohort", cfg.cohort, "number of simulated users")
        ->check(CLI::PositiveNumber);
    evaluate->add_option("--sequences", cfg.sequences, "sequences per user")
        ->check(CLI::PositiveNumber);
    evaluate->add_option("--mode", cfg.mode, "kfold|holdout")
        ->check(CLI::IsMember({"kfold", "holdout"}));
    evaluate->add_option("--folds", cfg.folds, "fold count for kfold")
        ->check(CLI::Range(2, 1000));
    evaluate->add_option("--train-fraction", cfg.train_fraction,
                         "train share for holdout");
    evaluate->add_option("--nchirp", nchirp_values,
                         "comma-separated n values for a sequence-length study")
        ->delimiter(',');
    evaluate->add_option("--dump-features", dump_features,
                         "also write the feature matrix to this CSV");

    CLI::App* attack = app.add_subcommand("attack", "scripted attack drills on one victim");
    add_common(attack);
    add_model_opts(attack);
    std::string attack_kind = "all";
    int victim_index = 0;
    AttackSpec spec;
    attack->add_option("--cohort", cfg.cohort, "cohort size behind the victim profile")
        ->check(CLI::PositiveNumber);
    attack->add_option("--sequences", cfg.sequences, "enrollment sequences per user")
        ->check(CLI::PositiveNumber);
    attack->add_option("--attack", attack_kind,
                       "impersonation_informed|impersonation_uninformed|replay|jamming|all");
    attack->add_option("--victim", victim_index, "cohort index of the victim");
    attack->add_option("--attackers", spec.attackers, "attacker count (impersonation)")
        ->check(CLI::PositiveNumber);
    attack->add_option("--attempts", spec.attempts, "attempts per attacker")
        ->check(CLI::PositiveNumber);
    attack->add_option("--legit-trials", spec.legit_trials, "fresh victim captures")
        ->check(CLI::PositiveNumber);
    attack->add_option("--replay-trials", spec.replay_trials, "replay attempts")
        ->check(CLI::PositiveNumber);
    attack->add_option("--eavesdrop-m", spec.eavesdrop_m, "eavesdropping distance, m");
    attack->add_option("--replay-m", spec.replay_m, "replay loudspeaker distance, m");
    attack->add_option("--jam-trials", spec.jam_trials, "jammed + clean trial pairs")
        ->check(CLI::PositiveNumber);
    attack->add_option("--jam-distance", spec.jam_distance_m, "jammer distance, m");
    attack->add_option("--jam-power", spec.jam_power_db, "jammer relative power, dB");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(synth)) return cmd_synth(cfg);
        if (app.got_subcommand(enroll)) {
            return cmd_enroll(cfg, enroll_recordings, enroll_labels, synth_negatives,
                              negatives, negative_sequences, profile_path);
        }
        if (app.got_subcommand(identify)) return cmd_identify(id_profile, id_recording);
        if (app.got_subcommand(evaluate)) return cmd_evaluate(cfg, nchirp_values, dump_features);
        if (app.got_subcommand(attack)) {
            return cmd_attack(cfg, attack_kind, victim_index, spec);
        }
        std::fprintf(stderr, "error: no subcommand\n");
        return kExitUsage;
    } catch (const TrainingError& e) {
        std::fprintf(stderr, "training failed: %s\n", e.what());
        return kExitInternal;
    } catch (const ProfileError& e) {
        std::fprintf(stderr, "profile error: %s\n", e.what());
        return kExitUsage;
    } catch (const SegmentationError& e) {
        std::fprintf(stderr, "segmentation error: %s\n", e.what());
        return kExitUsage;
    } catch (const SelectionError& e) {
        std::fprintf(stderr, "feature selection error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::runtime_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return kExitInternal;
    }
}
