#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gripsense/signal.hpp"
#include "gripsense/types.hpp"

// Desk-scale simulator of the device acoustic channel.  A probe sequence
// reaches the microphone along two routes: through the device body (fast,
// modulated by where and how hard the hand presses) and through the air
// (slow, shadowed by the hand, smeared by room reflections).  Hardware
// roll-off and ambient noise complete the capture.

namespace gripsense {

// Acoustic state of the device body.  A pressing contact raises the local
// pressure by delta_P per unit of normalized contact pressure while changing
// the reference volume V0 by delta_V, which stiffens the body: the effective
// bulk modulus grows as K0 * (1 + beta * sum of normalized pressures) with
// beta = delta_P * V0 / (delta_V * K0), and sound speed follows sqrt(K/rho).
struct MediumState {
    double K0 = 7.26e8;     // Pa, base bulk modulus of the composite body
    double rho = 2200.0;    // kg/m^3
    double V0 = 1e-5;       // m^3, reference volume
    double delta_P = 1.089e6;  // Pa per unit normalized contact pressure
    double delta_V = 1e-7;  // m^3 volume change per contact

    double beta() const { return delta_P * V0 / (delta_V * K0); }
};

// One finger/palm contact along the speaker-to-mic path.
struct Contact {
    double position = 0.5;  // fraction of path_length in [0, 1]
    double pressure = 0.5;  // normalized [0, 1]
    double width = 0.1;     // fraction of path_length in (0, 0.3]
};

struct HandProfile {
    std::string user_id;
    std::vector<Contact> contacts;  // 1..10 entries
    double grip_gain = 1.0;         // overall coupling strength
    double jitter_sigma = 0.02;     // per-trial wobble of position/pressure

    void validate() const;
};

struct Environment {
    std::string name = "office";
    double snr_db = 30.0;  // received chirp power vs ambient noise power
    int reflection_count = 2;
    std::vector<double> reflection_gains = {0.2, 0.1};

    void validate() const;
};

Environment office();
Environment public_space();

struct DevicePreset {
    std::string name = "phone";
    double path_length = 0.15;  // meters, speaker to (farther) mic
    double sample_rate = 48000.0;
    MediumState medium;
    double hw_rolloff_start = 20000.0;    // Hz
    double hw_rolloff_rate = 3.0;         // dB per kHz above the start
    int mic_count = 2;                    // capture uses the farther mic
    // Hand-channel calibration constants.
    double contact_alpha = 4.0;     // structure attenuation exp(-alpha*p*w)
    double shadow_alpha = 1.0;      // airborne shadowing exp(-alpha_s*p*w)
    double structure_gain = 0.8;    // structure-path coupling
    double airborne_gain = 0.4;     // airborne-path coupling
    int lead_samples = 10;          // default structure/airborne split point

    double structure_speed() const;  // m/s at zero contact pressure
};

DevicePreset phone();          // 0.15 m path, two mics
DevicePreset phone_compact();  // 0.13 m path
DevicePreset tablet();         // 0.24 m path, single mic

// --- Channel analysis (no synthesis, no randomness) ---

// Effective bulk modulus under the given contacts: K0 * (1 + beta * sum p).
double effective_bulk_modulus(const MediumState& medium,
                              const std::vector<Contact>& contacts);
double structure_speed(const MediumState& medium,
                       const std::vector<Contact>& contacts);
double structure_delay_seconds(const DevicePreset& device, const HandProfile& hand);
double airborne_delay_seconds(const DevicePreset& device);
// Airborne-minus-structure arrival gap in (fractional) samples.
double structure_lead_samples(const DevicePreset& device, const HandProfile& hand);

inline constexpr double kSpeedOfSoundAir = 343.0;  // m/s
inline constexpr int kSimPadSamples = 2400;        // capture tail after the probe

// Toggles for diagnostic single-path runs; all on for realistic captures.
struct SimOptions {
    bool structure = true;
    bool airborne = true;
    bool reflections = true;
    bool noise = true;
    bool jitter = true;
};

// Render what the device microphone hears while `hand` grips `device` in
// `env` and `tx` is played.  Deterministic per (inputs, seed).
Recording simulate_hold(const Waveform& tx, const HandProfile& hand,
                        const DevicePreset& device, const Environment& env,
                        std::uint64_t seed, const SimOptions& options = {});

// Draw `count` distinct hand profiles; pairwise parameter distance is kept
// above 3x the per-trial jitter so identification is possible, not trivial.
std::vector<HandProfile> make_hand_cohort(int count, std::uint64_t seed);

// Add a continuous 18-22 kHz sweep from a jammer `distance_m` away.
// relative_power_db = 0 means source strength comparable to the capture's
// RMS at 1 m; -inf disables the jammer.  Free-space 1/d amplitude law.
Recording inject_jammer(const Recording& rec, const SignalSpec& jam_spec,
                        double relative_power_db, double distance_m,
                        std::uint64_t seed);

// Re-broadcast an eavesdropped capture: two successive airborne hops
// (delay, 1/d gain, room echoes, noise).  Output is what the victim device
// hears during the replay.
Recording simulate_replay(const Recording& victim_rec,
                          double eavesdrop_distance_m, double replay_distance_m,
                          std::uint64_t seed);

// --- Config serialization (JSON) ---

std::string to_json(const DevicePreset& device);
std::string to_json(const Environment& env);
std::string to_json(const std::vector<HandProfile>& cohort);
DevicePreset device_from_json(const std::string& text);
Environment environment_from_json(const std::string& text);
std::vector<HandProfile> cohort_from_json(const std::string& text);

// Named lookups used by the CLI ("phone", "phone_compact", "tablet";
// "office", "public").  Unknown names throw std::invalid_argument.
DevicePreset device_by_name(const std::string& name);
Environment environment_by_name(const std::string& name);

}  // namespace gripsense
