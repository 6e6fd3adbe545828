#include "gripsense/features.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gripsense {

namespace {

double percentile(std::vector<double> sorted_copy, double q) {
    const double rank = q / 100.0 * (sorted_copy.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(rank);
    const double frac = rank - static_cast<double>(lo);
    if (lo + 1 >= sorted_copy.size()) return sorted_copy.back();
    return sorted_copy[lo] * (1.0 - frac) + sorted_copy[lo + 1] * frac;
}

// Magnitudes of bins 0..511 of a 512-point transform starting at `start`.
Eigen::VectorXd frame_magnitudes(const Segment& seg, int start) {
    Eigen::VectorXcd frame(kSpectralWindow);
    frame.real() = seg.samples.segment(start, kSpectralWindow);
    frame.imag().setZero();
    Eigen::FFT<double> fft;
    Eigen::VectorXcd spec(kSpectralWindow);
    fft.fwd(spec, frame);
    return spec.cwiseAbs();
}

int frame_count(const Segment& seg) {
    const int n = static_cast<int>(seg.samples.size());
    if (n < kSpectralWindow) {
        throw std::invalid_argument("features: segment shorter than one 512-sample frame");
    }
    return (n - kSpectralWindow) / kFrameHop + 1;
}

double hz_to_mel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double mel_to_hz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

// Triangle filter bank: kMelFilters triangles with corners equally spaced on
// the mel scale from 0 to fs/2, evaluated at the 257 non-negative bin
// frequencies of a 512-point transform.
Eigen::MatrixXd mel_bank(double sample_rate) {
    const int bins = kSpectralWindow / 2 + 1;
    Eigen::MatrixXd bank = Eigen::MatrixXd::Zero(kMelFilters, bins);
    std::vector<double> corners(kMelFilters + 2);
    const double mel_hi = hz_to_mel(sample_rate / 2.0);
    for (int i = 0; i < kMelFilters + 2; ++i) {
        corners[i] = mel_to_hz(mel_hi * i / (kMelFilters + 1));
    }
    for (int m = 0; m < kMelFilters; ++m) {
        const double lo = corners[m], mid = corners[m + 1], hi = corners[m + 2];
        for (int k = 0; k < bins; ++k) {
            const double f = k * sample_rate / kSpectralWindow;
            if (f > lo && f < mid) {
                bank(m, k) = (f - lo) / (mid - lo);
            } else if (f >= mid && f < hi) {
                bank(m, k) = (hi - f) / (hi - mid);
            }
        }
    }
    return bank;
}

}  // namespace

Eigen::Matrix<double, kTimeDim, 1> time_features(const Segment& seg) {
    const Eigen::Index n = seg.samples.size();
    if (n == 0) throw std::invalid_argument("time_features: empty segment");
    const Eigen::VectorXd& x = seg.samples;

    const double mean = x.mean();
    const Eigen::ArrayXd dev = x.array() - mean;
    const double var = dev.square().mean();
    const double stddev = std::sqrt(var);
    const double maxv = x.maxCoeff();
    const double minv = x.minCoeff();

    double skew = 0.0, kurt = 0.0;
    if (stddev > 0.0) {
        skew = dev.cube().mean() / (var * stddev);
        kurt = dev.square().square().mean() / (var * var) - 3.0;  // excess
    }

    std::vector<double> sorted(x.data(), x.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const double q2 = percentile(sorted, 50.0);
    const double q3 = percentile(sorted, 75.0);
    const double q4 = sorted.back();
    const double dispersion = q3 - percentile(sorted, 25.0);

    Eigen::Index peak_change = 0;
    dev.abs().maxCoeff(&peak_change);

    Eigen::Matrix<double, kTimeDim, 1> out;
    out << mean, stddev, maxv, minv, maxv - minv, kurt, skew, q2, q3, q4,
        dispersion, static_cast<double>(peak_change);
    return out;
}

Eigen::Matrix<double, kSpectralDim, 1> spectral_features(const Segment& seg) {
    if (seg.samples.size() < kSpectralWindow) {
        throw std::invalid_argument("spectral_features: segment shorter than 512 samples");
    }
    return frame_magnitudes(seg, 0).head(kSpectralDim);
}

Eigen::Matrix<double, kMfccDim, 1> mfcc_features(const Segment& seg) {
    const int frames = frame_count(seg);
    const Eigen::MatrixXd bank = mel_bank(seg.sample_rate);

    Eigen::Matrix<double, kMfccDim, 1> acc = Eigen::Matrix<double, kMfccDim, 1>::Zero();
    for (int f = 0; f < frames; ++f) {
        const Eigen::VectorXd mags =
            frame_magnitudes(seg, f * kFrameHop).head(kSpectralWindow / 2 + 1);
        const Eigen::VectorXd energies = bank * mags;
        Eigen::VectorXd log_e(kMelFilters);
        for (int m = 0; m < kMelFilters; ++m) {
            log_e[m] = std::log(std::max(energies[m], kLogFloor));
        }
        for (int k = 0; k < kMfccDim; ++k) {
            double c = 0.0;
            for (int m = 0; m < kMelFilters; ++m) {
                c += log_e[m] *
                     std::cos(std::numbers::pi * k * (m + 0.5) / kMelFilters);
            }
            acc[k] += c;
        }
    }
    return acc / frames;
}

int pitch_class(double freq_hz) {
    const int semitone =
        static_cast<int>(std::floor(12.0 * std::log2(freq_hz / kChromaRefHz)));
    return ((semitone % 12) + 12) % 12;
}

Eigen::Matrix<double, kChromaDim, 1> chroma_features(const Segment& seg) {
    const int frames = frame_count(seg);
    const int bins = kSpectralWindow / 2 + 1;

    Eigen::Matrix<double, kChromaDim, 1> acc = Eigen::Matrix<double, kChromaDim, 1>::Zero();
    for (int f = 0; f < frames; ++f) {
        const Eigen::VectorXd mags = frame_magnitudes(seg, f * kFrameHop);
        for (int k = 0; k < bins; ++k) {
            const double freq = k * seg.sample_rate / kSpectralWindow;
            if (freq < kChromaMinHz) continue;
            acc[pitch_class(freq)] += mags[k];
        }
    }
    return acc / frames;
}

FeatureVector extract(const Segment& seg) {
    FeatureVector v;
    v.segment<kTimeDim>(kTimeOffset) = time_features(seg);
    v.segment<kSpectralDim>(kSpectralOffset) = spectral_features(seg);
    v.segment<kMfccDim>(kMfccOffset) = mfcc_features(seg);
    v.segment<kChromaDim>(kChromaOffset) = chroma_features(seg);
    return v;
}

const std::array<std::string, kFeatureDim>& feature_names() {
    static const std::array<std::string, kFeatureDim> names = [] {
        std::array<std::string, kFeatureDim> n;
        const char* time_names[kTimeDim] = {
            "t_mean", "t_std",      "t_max",        "t_min",
            "t_range", "t_kurtosis", "t_skewness",  "t_q2",
            "t_q3",   "t_q4",       "t_dispersion", "t_peak_change"};
        for (int i = 0; i < kTimeDim; ++i) n[kTimeOffset + i] = time_names[i];
        char buf[16];
        for (int i = 0; i < kSpectralDim; ++i) {
            std::snprintf(buf, sizeof buf, "spec_%03d", i);
            n[kSpectralOffset + i] = buf;
        }
        for (int i = 0; i < kMfccDim; ++i) {
            std::snprintf(buf, sizeof buf, "mfcc_%02d", i);
            n[kMfccOffset + i] = buf;
        }
        for (int i = 0; i < kChromaDim; ++i) {
            std::snprintf(buf, sizeof buf, "chroma_%02d", i);
            n[kChromaOffset + i] = buf;
        }
        return n;
    }();
    return names;
}

}  // namespace gripsense
