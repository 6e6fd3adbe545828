#pragma once

#include <array>
#include <string>

#include "gripsense/types.hpp"

// The 293-dimension acoustic biometric vector: 12 time-domain statistics,
// 256 spectral magnitudes, 13 mel-cepstral coefficients, 12 pitch-class
// energies, in that fixed order.

namespace gripsense {

inline constexpr int kTimeDim = 12;
inline constexpr int kSpectralDim = 256;
inline constexpr int kMfccDim = 13;
inline constexpr int kChromaDim = 12;
inline constexpr int kFeatureDim = kTimeDim + kSpectralDim + kMfccDim + kChromaDim;

inline constexpr int kTimeOffset = 0;
inline constexpr int kSpectralOffset = kTimeDim;
inline constexpr int kMfccOffset = kSpectralOffset + kSpectralDim;
inline constexpr int kChromaOffset = kMfccOffset + kMfccDim;

inline constexpr int kSpectralWindow = 512;  // transform size and frame length
inline constexpr int kFrameHop = 256;
inline constexpr int kMelFilters = 26;
inline constexpr double kLogFloor = 1e-10;
inline constexpr double kChromaMinHz = 100.0;
inline constexpr double kChromaRefHz = 440.0;  // pitch class 0 reference

using FeatureVector = Eigen::Matrix<double, kFeatureDim, 1>;

// mean, std, max, min, range, kurtosis (excess), skewness, q2 (50th), q3
// (75th), q4 (100th), dispersion (interquartile range), peak_change_index
// (index of the sample farthest from the mean).  Population statistics;
// skewness/kurtosis are 0 for zero-variance input.
Eigen::Matrix<double, kTimeDim, 1> time_features(const Segment& seg);

// Magnitudes of the 256 non-redundant bins of a 512-point transform of the
// first 512 samples (the earliest, most structure-dominated portion).
Eigen::Matrix<double, kSpectralDim, 1> spectral_features(const Segment& seg);

// Frames of 512 with hop 256; magnitude spectrum -> 26 mel triangles over
// 0..fs/2 -> natural log with floor -> type-II cosine transform, coefficients
// 0..12; averaged over frames.
Eigen::Matrix<double, kMfccDim, 1> mfcc_features(const Segment& seg);

// Same framing; each bin at or above 100 Hz accumulates its magnitude into
// pitch class floor(12*log2(f/440)) mod 12; averaged over frames.
Eigen::Matrix<double, kChromaDim, 1> chroma_features(const Segment& seg);

FeatureVector extract(const Segment& seg);

// Canonical column names for CSV export, index-aligned with the layout.
const std::array<std::string, kFeatureDim>& feature_names();

// Pitch-class mapping used by the chroma extractor (exposed for validation).
int pitch_class(double freq_hz);

}  // namespace gripsense
