#pragma once

#include <utility>
#include <vector>

#include "gripsense/types.hpp"

// Preprocessing for chirp captures: Butterworth band filtering, matched-filter
// segmentation, early/late path splitting, and in-band jamming detection.

namespace gripsense {

// Filter order applied on each side of the band (high-pass and low-pass).
// Order 10 per side puts out-of-band leakage at 15 kHz below -40 dB for the
// 18-22 kHz operating band; lower orders leave tens of dB of leakage.
inline constexpr int kDefaultFilterOrder = 10;

inline constexpr double kCorrelationFloor = 0.3;
inline constexpr int kDefaultLeadSamples = 10;
inline constexpr double kOperationalBandLo = 18000.0;
inline constexpr double kOperationalBandHi = 22000.0;
inline constexpr double kJamThresholdOffsetDb = 6.0;

// One biquad stage, direct-form II transposed coefficients (a0 == 1).
struct SosSection {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

// A cascade of biquads.
struct SosFilter {
    std::vector<SosSection> sections;

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;       // causal
    Eigen::VectorXd apply_zero_phase(const Eigen::VectorXd& x) const;
    double magnitude(double freq_hz, double sample_rate) const;
    int order() const { return static_cast<int>(sections.size()) * 2; }
};

// Bilinear-transform Butterworth designs; order >= 1, 0 < fc < fs/2.
SosFilter butterworth_lowpass(int order, double fc, double fs);
SosFilter butterworth_highpass(int order, double fc, double fs);

// High-pass at lo cascaded with low-pass at hi, each of the given order.
SosFilter butterworth_bandpass(int order, double lo, double hi, double fs);

Recording bandpass(const Recording& rec, double lo, double hi,
                   int order = kDefaultFilterOrder, bool zero_phase = false);

// Locate expected_n chirps by normalized cross-correlation against the
// template.  Returns the expected_n highest non-overlapping peaks (at least
// chirp_len apart, correlation >= kCorrelationFloor), sorted by onset.
// Throws SegmentationError carrying the number found when short.
std::vector<Segment> segment(const Recording& rec, const Waveform& tmpl,
                             int expected_n);

// Partition a segment at the structure/airborne boundary: the first
// lead_samples arrive through the device body only; the rest is mixed.
std::pair<Waveform, Waveform> split_paths(const Segment& seg, int lead_samples);

struct JamReport {
    bool detected = false;
    double band_energy_db = 0.0;  // gap-window 18-22 kHz energy, dB full scale
    double threshold_db = 0.0;
    double excess_db = 0.0;       // band_energy_db - threshold_db
};

// Quiet-gap band energy statistic: band-limit to 18-22 kHz, slide a
// template-length window, and take the lower decile of window power in dB.
// On a legitimate capture the gaps between chirps are near-silent, so this
// tracks the noise floor; a jammer fills the gaps and lifts it.
double gap_band_energy_db(const Recording& rec, int window_len);

// detected <=> gap band energy exceeds threshold_db.
JamReport detect_jamming(const Recording& rec, const Waveform& tmpl,
                         double threshold_db);

}  // namespace gripsense
