#include "gripsense/signal.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gripsense {

void SignalSpec::validate() const {
    if (sample_rate <= 0.0) throw std::invalid_argument("SignalSpec: sample_rate must be positive");
    if (f_start <= 0.0 || f_end <= 0.0) throw std::invalid_argument("SignalSpec: frequencies must be positive");
    if (f_start >= f_end) throw std::invalid_argument("SignalSpec: f_start must be below f_end");
    if (f_end >= sample_rate / 2.0) throw std::invalid_argument("SignalSpec: f_end must be below Nyquist");
    if (chirp_len < 2) throw std::invalid_argument("SignalSpec: chirp_len must be at least 2");
    if (gap_len < 0) throw std::invalid_argument("SignalSpec: gap_len must be non-negative");
    if (n_chirps < 1) throw std::invalid_argument("SignalSpec: n_chirps must be at least 1");
    if (amplitude <= 0.0 || amplitude > 1.0) {
        throw std::invalid_argument("SignalSpec: amplitude must be in (0, 1]");
    }
    if (taper_len < 0 || taper_len > chirp_len / 2) {
        throw std::invalid_argument("SignalSpec: taper_len must be in [0, chirp_len/2]");
    }
}

Waveform make_chirp(const SignalSpec& spec) {
    spec.validate();
    const int n = spec.chirp_len;
    const double t_end = (n - 1) / spec.sample_rate;
    const double k = (spec.f_end - spec.f_start) / t_end;  // sweep rate, Hz/s

    Waveform w;
    w.sample_rate = spec.sample_rate;
    w.samples.resize(n);
    for (int i = 0; i < n; ++i) {
        const double t = i / spec.sample_rate;
        const double phase =
            2.0 * std::numbers::pi * (spec.f_start * t + 0.5 * k * t * t);
        w.samples[i] = spec.amplitude * std::sin(phase);
    }

    if (spec.taper_len > 0) {
        const int m = spec.taper_len;
        for (int i = 0; i < m; ++i) {
            const double g = 0.5 * (1.0 - std::cos(std::numbers::pi * i / m));
            w.samples[i] *= g;
            w.samples[n - 1 - i] *= g;
        }
    }
    return w;
}

Waveform make_sequence(const SignalSpec& spec) {
    const Waveform chirp = make_chirp(spec);
    Waveform w;
    w.sample_rate = spec.sample_rate;
    w.samples = Eigen::VectorXd::Zero(spec.sequence_len());
    for (int c = 0; c < spec.n_chirps; ++c) {
        const int offset = c * (spec.chirp_len + spec.gap_len);
        w.samples.segment(offset, spec.chirp_len) = chirp.samples;
    }
    return w;
}

}  // namespace gripsense
