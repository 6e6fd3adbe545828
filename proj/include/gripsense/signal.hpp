#pragma once

#include "gripsense/types.hpp"

// Ultrasonic probe-signal synthesis: linear chirps and chirp trains with
// silent gaps, played near the top of the audible band so they are
// inaudible to most adults yet still within consumer speaker range.

namespace gripsense {

struct SignalSpec {
    double f_start = 18000.0;    // Hz, sweep start
    double f_end = 22000.0;      // Hz, sweep end
    double sample_rate = 48000.0;
    int chirp_len = 1200;        // samples per chirp (25 ms at 48 kHz)
    int gap_len = 1200;          // silent samples between chirps
    int n_chirps = 10;           // chirps per probe sequence
    double amplitude = 1.0;
    int taper_len = 0;           // raised-cosine edge taper, 0 disables

    // Throws std::invalid_argument on any out-of-range field.
    void validate() const;

    int sequence_len() const { return n_chirps * (chirp_len + gap_len); }
};

// One linear sweep from f_start to f_end.  The instantaneous frequency hits
// f_end exactly at the last sample; phase starts at zero so sample 0 is 0.
Waveform make_chirp(const SignalSpec& spec);

// n_chirps copies of the chirp, each followed by gap_len zeros (the trailing
// gap ensures the last echo tail is still captured).
Waveform make_sequence(const SignalSpec& spec);

}  // namespace gripsense
