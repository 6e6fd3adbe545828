#pragma once

#include <string>

#include "gripsense/types.hpp"

// Minimal RIFF/WAVE I/O: 16-bit PCM, mono.  Samples are scaled by 32767 and
// clamped on write, and divided by 32767 on read, so a write/read round trip
// of in-range data is exact at 16-bit resolution.

namespace gripsense {

void write_wav(const std::string& path, const Eigen::VectorXd& samples,
               double sample_rate);

inline void write_wav(const std::string& path, const Waveform& w) {
    write_wav(path, w.samples, w.sample_rate);
}

inline void write_wav(const std::string& path, const Recording& r) {
    write_wav(path, r.samples, r.sample_rate);
}

Waveform read_wav(const std::string& path);

}  // namespace gripsense
