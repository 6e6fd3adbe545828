#include "gripsense/simchan.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

#include "gripsense/rng.hpp"

namespace gripsense {

namespace {

constexpr int kContactsPerHand = 4;
constexpr double kCohortJitterSigma = 0.005;
// Grip micro-tremor: the contact state is re-perturbed this often (50 ms,
// the physiological tremor timescale) by this much while the hand holds on.
constexpr long kTremorIntervalSamples = 2400;
constexpr double kTremorSigma = 0.012;
// Jammer source strength at 1 m for relative_power_db = 0, as a multiple of
// the victim capture's RMS.
constexpr double kJamReferenceAmplitude = 0.80;
// Airborne re-broadcast: amplitude gain at 1 m per hop, echo strengths
// relative to the direct hop, and hop noise level.
constexpr double kReplayReferenceGain = 0.05;
constexpr double kReplayEchoGains[2] = {0.2, 0.1};
constexpr double kReplayHopSnrDb = 30.0;
constexpr double kEchoDelayMinS = 0.001;
constexpr double kEchoDelayMaxS = 0.008;

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

// Mix `src` into `dst` delayed by `delay_samples`, rounded to the nearest
// whole sample.  Sub-sample interpolation is deliberately avoided: near the
// top of the sensing band a linear interpolator's gain swings by several dB
// with the fractional delay alone, swamping the grip response.  Arrival
// times are quantized to the converter grid; sub-sample timing structure is
// carried by the contact filter, whose delays stay continuous.
void add_tap(Eigen::VectorXd& dst, const Eigen::VectorXd& src,
             double delay_samples, double gain) {
    if (gain == 0.0) return;
    const long base = std::lround(delay_samples);
    const long n = static_cast<long>(dst.size());
    const long lo = std::max<long>(0, -base);
    const long hi = std::min<long>(src.size(), n - base);
    if (hi > lo) dst.segment(base + lo, hi - lo) += gain * src.segment(lo, hi - lo);
}

constexpr int kFirGrid = 1024;
constexpr int kFirTaps = 129;

// Causal (minimum-phase) FIR realizing the given log-magnitude response
// (natural log, sampled on the full kFirGrid DFT grid).  Minimum phase keeps
// all ringing after an arrival, so early-sample windows stay clean.
Eigen::VectorXd min_phase_fir(const Eigen::VectorXcd& log_mag) {
    Eigen::FFT<double> fft;
    Eigen::VectorXcd cep(kFirGrid), folded = Eigen::VectorXcd::Zero(kFirGrid);
    Eigen::VectorXcd mag = log_mag;
    fft.inv(cep, mag);
    // Fold the cepstrum onto causal quefrencies to obtain minimum phase.
    folded[0] = cep[0].real();
    for (int k = 1; k < kFirGrid / 2; ++k) folded[k] = 2.0 * cep[k].real();
    folded[kFirGrid / 2] = cep[kFirGrid / 2].real();

    Eigen::VectorXcd spec(kFirGrid), h(kFirGrid);
    fft.fwd(spec, folded);
    spec = spec.array().exp();
    fft.inv(h, spec);

    Eigen::VectorXd taps = h.head(kFirTaps).real();
    // Fade the truncated tail to suppress truncation ripple.
    constexpr int kFade = 32;
    for (int i = 0; i < kFade; ++i) {
        const double g =
            0.5 * (1.0 + std::cos(std::numbers::pi * (i + 1) / (kFade + 1)));
        taps[kFirTaps - kFade + i] *= g;
    }
    return taps;
}

// Hardware roll-off magnitude: flat up to start_hz, then rate_db_per_khz of
// loss per kHz.
Eigen::VectorXd design_rolloff_fir(double start_hz, double rate_db_per_khz,
                                   double fs) {
    Eigen::VectorXcd log_mag(kFirGrid);
    for (int k = 0; k < kFirGrid; ++k) {
        const double f = std::min(k, kFirGrid - k) * fs / kFirGrid;
        const double db = f > start_hz ? -(f - start_hz) / 1000.0 * rate_db_per_khz : 0.0;
        log_mag[k] = std::log(std::max(std::pow(10.0, db / 20.0), 1e-8));
    }
    return min_phase_fir(log_mag);
}

// Through-transmission of the body wave past the gripping contacts.  Each
// contact removes energy preferentially at frequencies whose round trip to
// the speaker end puts it at a displacement antinode, so its loss ripples
// with quefrency tau_i = 2*position*path_length/c_eff and a depth set by
// pressure and width: log|T|(f) = sum_i alpha*p_i*w_i*(cos(2*pi*f*tau_i)-1).
// The band average equals the broadband loss exp(-alpha*p*w) per contact,
// while the ripple pattern encodes where each finger sits on the path.
Eigen::VectorXd design_contact_fir(const std::vector<Contact>& contacts,
                                   double alpha, double path_length,
                                   double c_eff, double fs) {
    Eigen::VectorXcd log_mag = Eigen::VectorXcd::Zero(kFirGrid);
    for (int k = 0; k < kFirGrid; ++k) {
        const double f = std::min(k, kFirGrid - k) * fs / kFirGrid;
        double lm = 0.0;
        for (const Contact& c : contacts) {
            const double tau = 2.0 * c.position * path_length / c_eff;
            const double depth = alpha * c.pressure * c.width;
            lm += depth * (std::cos(2.0 * std::numbers::pi * f * tau) - 1.0);
        }
        log_mag[k] = lm;
    }
    return min_phase_fir(log_mag);
}

Eigen::VectorXd convolve_same_length(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& h) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
    for (long i = 0; i < h.size(); ++i) {
        const double hi = h[i];
        if (hi == 0.0) continue;
        const long count = x.size() - i;
        if (count <= 0) break;
        y.tail(count) += hi * x.head(count);
    }
    return y;
}

long active_sample_count(const Eigen::VectorXd& x) {
    long n = 0;
    for (long i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) > 1e-12) ++n;
    }
    return n;
}

}  // namespace

void HandProfile::validate() const {
    if (contacts.empty() || contacts.size() > 10) {
        throw std::invalid_argument("HandProfile: need 1..10 contacts");
    }
    for (const Contact& c : contacts) {
        if (!std::isfinite(c.position) || c.position < 0.0 || c.position > 1.0) {
            throw std::invalid_argument("HandProfile: contact position must be in [0,1]");
        }
        if (!std::isfinite(c.pressure) || c.pressure < 0.0 || c.pressure > 1.0) {
            throw std::invalid_argument("HandProfile: contact pressure must be in [0,1]");
        }
        if (!std::isfinite(c.width) || c.width <= 0.0 || c.width > 0.3) {
            throw std::invalid_argument("HandProfile: contact width must be in (0,0.3]");
        }
    }
    if (!std::isfinite(grip_gain) || grip_gain <= 0.0) {
        throw std::invalid_argument("HandProfile: grip_gain must be positive");
    }
    if (!std::isfinite(jitter_sigma) || jitter_sigma < 0.0) {
        throw std::invalid_argument("HandProfile: jitter_sigma must be >= 0");
    }
}

void Environment::validate() const {
    if (!std::isfinite(snr_db)) throw std::invalid_argument("Environment: snr_db must be finite");
    if (reflection_count < 0) throw std::invalid_argument("Environment: reflection_count must be >= 0");
    if (static_cast<int>(reflection_gains.size()) < reflection_count) {
        throw std::invalid_argument("Environment: fewer gains than reflection_count");
    }
    for (double g : reflection_gains) {
        if (!(g > 0.0 && g < 1.0)) {
            throw std::invalid_argument("Environment: reflection gains must be in (0,1)");
        }
    }
}

Environment office() { return Environment{"office", 30.0, 2, {0.2, 0.1}}; }

Environment public_space() {
    return Environment{"public", 10.0, 4, {0.2, 0.1, 0.08, 0.05}};
}

double DevicePreset::structure_speed() const {
    return std::sqrt(medium.K0 / medium.rho);
}

DevicePreset phone() { return DevicePreset{}; }

DevicePreset phone_compact() {
    DevicePreset d;
    d.name = "phone_compact";
    d.path_length = 0.13;
    d.hw_rolloff_rate = 2.5;
    d.lead_samples = 9;
    return d;
}

DevicePreset tablet() {
    DevicePreset d;
    d.name = "tablet";
    d.path_length = 0.24;
    d.hw_rolloff_rate = 4.0;
    d.mic_count = 1;
    d.lead_samples = 16;
    return d;
}

double effective_bulk_modulus(const MediumState& medium,
                              const std::vector<Contact>& contacts) {
    double total_pressure = 0.0;
    for (const Contact& c : contacts) total_pressure += c.pressure;
    return medium.K0 * (1.0 + medium.beta() * total_pressure);
}

double structure_speed(const MediumState& medium,
                       const std::vector<Contact>& contacts) {
    return std::sqrt(effective_bulk_modulus(medium, contacts) / medium.rho);
}

double structure_delay_seconds(const DevicePreset& device, const HandProfile& hand) {
    return device.path_length / structure_speed(device.medium, hand.contacts);
}

double airborne_delay_seconds(const DevicePreset& device) {
    return device.path_length / kSpeedOfSoundAir;
}

double structure_lead_samples(const DevicePreset& device, const HandProfile& hand) {
    return (airborne_delay_seconds(device) - structure_delay_seconds(device, hand)) *
           device.sample_rate;
}

Recording simulate_hold(const Waveform& tx, const HandProfile& hand,
                        const DevicePreset& device, const Environment& env,
                        std::uint64_t seed, const SimOptions& options) {
    if (tx.sample_rate != device.sample_rate) {
        throw std::invalid_argument("simulate_hold: tx sample rate does not match device");
    }
    hand.validate();
    env.validate();

    // Per-trial wobble of how the hand actually lands on the device.
    HandProfile trial = hand;
    if (options.jitter && hand.jitter_sigma > 0.0) {
        rng::Stream jit(rng::derive(seed, "jitter"));
        for (Contact& c : trial.contacts) {
            c.position = clamp01(c.position + hand.jitter_sigma * jit.gaussian());
            c.pressure = clamp01(c.pressure + hand.jitter_sigma * jit.gaussian());
        }
    }

    const double fs = device.sample_rate;
    const double delay_air = airborne_delay_seconds(device) * fs;     // samples

    Eigen::VectorXd out = Eigen::VectorXd::Zero(tx.samples.size() + kSimPadSamples);
    Eigen::VectorXd air = Eigen::VectorXd::Zero(out.size());

    // A held hand is never perfectly still: the contact state drifts on the
    // physiological tremor timescale.  The channel is rendered as piecewise
    // constant over kTremorIntervalSamples blocks, each seeing its own small
    // perturbation around the landed grip, so longer captures average over
    // more grip micro-states.
    const long block_len = kTremorIntervalSamples;
    const long n_blocks = (tx.samples.size() + block_len - 1) / block_len;
    rng::Stream tremor(rng::derive(seed, "tremor"));
    for (long b = 0; b < n_blocks; ++b) {
        const long start = b * block_len;
        const long len = std::min<long>(block_len, tx.samples.size() - start);

        HandProfile state = trial;
        if (options.jitter) {
            for (Contact& c : state.contacts) {
                c.position = clamp01(c.position + kTremorSigma * tremor.gaussian());
                c.pressure = clamp01(c.pressure + kTremorSigma * tremor.gaussian());
            }
        }
        const double c_struct = structure_speed(device.medium, state.contacts);
        const double delay_struct = device.path_length / c_struct * fs;  // samples

        if (options.structure) {
            // Body wave through the grip: frequency-selective absorption
            // (broadband average exp(-alpha*p*w) per contact, rippled by
            // contact position), applied tap by tap to this block.
            const double a_struct = device.structure_gain * state.grip_gain;
            const Eigen::VectorXd fir =
                design_contact_fir(state.contacts, device.contact_alpha,
                                   device.path_length, c_struct, fs);
            const long base = start + std::lround(delay_struct);
            for (Eigen::Index t = 0; t < fir.size(); ++t) {
                const long dst = base + t;
                if (dst >= out.size()) break;
                const long m = std::min<long>(len, out.size() - dst);
                out.segment(dst, m) +=
                    (a_struct * fir[t]) * tx.samples.segment(start, m);
            }
        }

        if (options.airborne) {
            double shadow = 1.0;
            for (const Contact& c : state.contacts) {
                shadow *= std::exp(-device.shadow_alpha * c.pressure * c.width);
            }
            const double a_air = device.airborne_gain * state.grip_gain * shadow;
            const long base = start + std::lround(delay_air);
            if (base < air.size()) {
                const long m = std::min<long>(len, air.size() - base);
                air.segment(base, m) += a_air * tx.samples.segment(start, m);
            }
        }
    }

    if (options.airborne) {
        out += air;
        if (options.reflections) {
            // Room echoes replicate the shadowed airborne signal, not the
            // clean transmit.
            rng::Stream echo(rng::derive(seed, "echo"));
            for (int j = 0; j < env.reflection_count; ++j) {
                const double extra =
                    echo.uniform(kEchoDelayMinS, kEchoDelayMaxS) * fs;
                add_tap(out, air, extra, env.reflection_gains[j]);
            }
        }
    }

    if (device.hw_rolloff_rate > 0.0) {
        out = convolve_same_length(
            out, design_rolloff_fir(device.hw_rolloff_start, device.hw_rolloff_rate, fs));
    }

    if (options.noise) {
        const long active = active_sample_count(tx.samples);
        if (active > 0) {
            const double p_signal = out.squaredNorm() / static_cast<double>(active);
            const double sigma =
                std::sqrt(p_signal * std::pow(10.0, -env.snr_db / 10.0));
            rng::Stream noise(rng::derive(seed, "noise"));
            for (long i = 0; i < out.size(); ++i) out[i] += sigma * noise.gaussian();
        }
    }

    Recording rec;
    rec.samples = std::move(out);
    rec.sample_rate = fs;
    rec.origin = Provenance{seed, device.name, hand.user_id, env.name};
    return rec;
}

std::vector<HandProfile> make_hand_cohort(int count, std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("make_hand_cohort: count must be >= 1");
    rng::Stream rs(rng::derive(seed, "cohort"));

    auto draw_profile = [&rs](int index) {
        HandProfile h;
        char id[16];
        std::snprintf(id, sizeof id, "user%02d", index);
        h.user_id = id;
        h.jitter_sigma = kCohortJitterSigma;
        h.grip_gain = rs.uniform(0.9, 1.1);
        // Contact positions: sorted, separated by at least 0.06 path units.
        for (;;) {
            std::vector<double> pos(kContactsPerHand);
            for (double& p : pos) p = rs.uniform(0.08, 0.95);
            std::sort(pos.begin(), pos.end());
            bool ok = true;
            for (int i = 1; i < kContactsPerHand; ++i) {
                if (pos[i] - pos[i - 1] < 0.06) { ok = false; break; }
            }
            if (!ok) continue;
            h.contacts.clear();
            for (double p : pos) {
                Contact c;
                c.position = p;
                c.pressure = rs.uniform(0.25, 0.95);
                c.width = rs.uniform(0.06, 0.20);
                h.contacts.push_back(c);
            }
            return h;
        }
    };

    auto parameter_distance = [](const HandProfile& a, const HandProfile& b) {
        double d2 = 0.0;
        for (int i = 0; i < kContactsPerHand; ++i) {
            const Contact& ca = a.contacts[i];
            const Contact& cb = b.contacts[i];
            d2 += (ca.position - cb.position) * (ca.position - cb.position);
            d2 += (ca.pressure - cb.pressure) * (ca.pressure - cb.pressure);
            d2 += (ca.width - cb.width) * (ca.width - cb.width);
        }
        return std::sqrt(d2);
    };

    std::vector<HandProfile> cohort;
    cohort.reserve(count);
    for (int i = 0; i < count; ++i) {
        for (;;) {
            HandProfile h = draw_profile(i);
            bool distinct = true;
            for (const HandProfile& prev : cohort) {
                if (parameter_distance(h, prev) <= 3.0 * kCohortJitterSigma) {
                    distinct = false;
                    break;
                }
            }
            if (distinct) {
                cohort.push_back(std::move(h));
                break;
            }
        }
    }
    return cohort;
}

Recording inject_jammer(const Recording& rec, const SignalSpec& jam_spec,
                        double relative_power_db, double distance_m,
                        std::uint64_t seed) {
    jam_spec.validate();
    if (!(distance_m > 0.0)) {
        throw std::invalid_argument("inject_jammer: distance must be positive");
    }
    if (relative_power_db == -std::numeric_limits<double>::infinity()) return rec;
    if (!std::isfinite(relative_power_db)) {
        throw std::invalid_argument("inject_jammer: relative power must be finite or -inf");
    }

    const Waveform sweep = make_chirp(jam_spec);  // looped back-to-back: no gaps
    const long period = sweep.samples.size();
    rng::Stream rs(rng::derive(seed, "jam"));
    const long offset = static_cast<long>(rs.below(static_cast<std::uint64_t>(period)));

    const double rms = std::sqrt(rec.samples.squaredNorm() /
                                 static_cast<double>(rec.samples.size()));
    const double amp = kJamReferenceAmplitude * rms *
                       std::pow(10.0, relative_power_db / 20.0) / distance_m;

    Recording out = rec;
    for (long i = 0; i < out.samples.size(); ++i) {
        out.samples[i] += amp * sweep.samples[(i + offset) % period];
    }
    return out;
}

namespace {

// One airborne hop: propagation delay, 1/d gain, room echoes, mic noise.
Eigen::VectorXd airborne_hop(const Eigen::VectorXd& x, double fs,
                             double distance_m, std::uint64_t seed) {
    const double delay = distance_m / kSpeedOfSoundAir * fs;
    const double gain = kReplayReferenceGain / distance_m;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size() + kSimPadSamples);
    add_tap(y, x, delay, gain);
    rng::Stream echo(rng::derive(seed, "echo"));
    for (double g : kReplayEchoGains) {
        const double extra = echo.uniform(kEchoDelayMinS, kEchoDelayMaxS) * fs;
        add_tap(y, x, delay + extra, gain * g);
    }
    const double rms = std::sqrt(y.squaredNorm() / static_cast<double>(y.size()));
    const double sigma = rms * std::pow(10.0, -kReplayHopSnrDb / 20.0);
    rng::Stream noise(rng::derive(seed, "noise"));
    for (long i = 0; i < y.size(); ++i) y[i] += sigma * noise.gaussian();
    return y;
}

}  // namespace

Recording simulate_replay(const Recording& victim_rec,
                          double eavesdrop_distance_m, double replay_distance_m,
                          std::uint64_t seed) {
    if (!(eavesdrop_distance_m > 0.0) || !(replay_distance_m > 0.0)) {
        throw std::invalid_argument("simulate_replay: distances must be positive");
    }
    Eigen::VectorXd hop1 =
        airborne_hop(victim_rec.samples, victim_rec.sample_rate,
                     eavesdrop_distance_m, rng::derive(seed, "hop", 0));
    Eigen::VectorXd hop2 = airborne_hop(hop1, victim_rec.sample_rate,
                                        replay_distance_m, rng::derive(seed, "hop", 1));
    Recording out;
    out.samples = std::move(hop2);
    out.sample_rate = victim_rec.sample_rate;
    out.origin = victim_rec.origin;
    out.origin.environment = victim_rec.origin.environment + "+replay";
    return out;
}

// --- JSON serialization ---

namespace {

using nlohmann::json;

json contact_to_json(const Contact& c) {
    return json{{"position", c.position}, {"pressure", c.pressure}, {"width", c.width}};
}

Contact contact_from_json(const json& j) {
    Contact c;
    c.position = j.at("position").get<double>();
    c.pressure = j.at("pressure").get<double>();
    c.width = j.at("width").get<double>();
    return c;
}

json hand_to_json(const HandProfile& h) {
    json contacts = json::array();
    for (const Contact& c : h.contacts) contacts.push_back(contact_to_json(c));
    return json{{"user_id", h.user_id},
                {"contacts", contacts},
                {"grip_gain", h.grip_gain},
                {"jitter_sigma", h.jitter_sigma}};
}

HandProfile hand_from_json(const json& j) {
    HandProfile h;
    h.user_id = j.at("user_id").get<std::string>();
    for (const json& c : j.at("contacts")) h.contacts.push_back(contact_from_json(c));
    h.grip_gain = j.at("grip_gain").get<double>();
    h.jitter_sigma = j.at("jitter_sigma").get<double>();
    h.validate();
    return h;
}

}  // namespace

std::string to_json(const DevicePreset& d) {
    json j{{"name", d.name},
           {"path_length", d.path_length},
           {"sample_rate", d.sample_rate},
           {"medium",
            {{"K0", d.medium.K0},
             {"rho", d.medium.rho},
             {"V0", d.medium.V0},
             {"delta_P", d.medium.delta_P},
             {"delta_V", d.medium.delta_V}}},
           {"hw_rolloff_start", d.hw_rolloff_start},
           {"hw_rolloff_rate", d.hw_rolloff_rate},
           {"mic_count", d.mic_count},
           {"contact_alpha", d.contact_alpha},
           {"shadow_alpha", d.shadow_alpha},
           {"structure_gain", d.structure_gain},
           {"airborne_gain", d.airborne_gain},
           {"lead_samples", d.lead_samples}};
    return j.dump(2) + "\n";
}

std::string to_json(const Environment& e) {
    json j{{"name", e.name},
           {"snr_db", e.snr_db},
           {"reflection_count", e.reflection_count},
           {"reflection_gains", e.reflection_gains}};
    return j.dump(2) + "\n";
}

std::string to_json(const std::vector<HandProfile>& cohort) {
    json arr = json::array();
    for (const HandProfile& h : cohort) arr.push_back(hand_to_json(h));
    return json{{"cohort", arr}}.dump(2) + "\n";
}

DevicePreset device_from_json(const std::string& text) {
    const json j = json::parse(text);
    DevicePreset d;
    d.name = j.at("name").get<std::string>();
    d.path_length = j.at("path_length").get<double>();
    d.sample_rate = j.at("sample_rate").get<double>();
    const json& m = j.at("medium");
    d.medium.K0 = m.at("K0").get<double>();
    d.medium.rho = m.at("rho").get<double>();
    d.medium.V0 = m.at("V0").get<double>();
    d.medium.delta_P = m.at("delta_P").get<double>();
    d.medium.delta_V = m.at("delta_V").get<double>();
    d.hw_rolloff_start = j.at("hw_rolloff_start").get<double>();
    d.hw_rolloff_rate = j.at("hw_rolloff_rate").get<double>();
    d.mic_count = j.at("mic_count").get<int>();
    d.contact_alpha = j.at("contact_alpha").get<double>();
    d.shadow_alpha = j.at("shadow_alpha").get<double>();
    d.structure_gain = j.at("structure_gain").get<double>();
    d.airborne_gain = j.at("airborne_gain").get<double>();
    d.lead_samples = j.at("lead_samples").get<int>();
    return d;
}

Environment environment_from_json(const std::string& text) {
    const json j = json::parse(text);
    Environment e;
    e.name = j.at("name").get<std::string>();
    e.snr_db = j.at("snr_db").get<double>();
    e.reflection_count = j.at("reflection_count").get<int>();
    e.reflection_gains = j.at("reflection_gains").get<std::vector<double>>();
    e.validate();
    return e;
}

std::vector<HandProfile> cohort_from_json(const std::string& text) {
    const json j = json::parse(text);
    std::vector<HandProfile> cohort;
    for (const json& h : j.at("cohort")) cohort.push_back(hand_from_json(h));
    return cohort;
}

DevicePreset device_by_name(const std::string& name) {
    if (name == "phone") return phone();
    if (name == "phone_compact") return phone_compact();
    if (name == "tablet") return tablet();
    throw std::invalid_argument("unknown device preset: " + name);
}

Environment environment_by_name(const std::string& name) {
    if (name == "office") return office();
    if (name == "public" || name == "public_space") return public_space();
    throw std::invalid_argument("unknown environment: " + name);
}

}  // namespace gripsense
