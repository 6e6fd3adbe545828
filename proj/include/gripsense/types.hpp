#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gripsense {

// A sampled audio buffer together with the rate it was sampled at.
struct Waveform {
    Eigen::VectorXd samples;
    double sample_rate = 48000.0;

    int size() const { return static_cast<int>(samples.size()); }
    double duration_seconds() const { return samples.size() / sample_rate; }
};

// Provenance of a simulated capture: enough to reproduce it exactly.
struct Provenance {
    std::uint64_t seed = 0;
    std::string device;
    std::string user_id;
    std::string environment;
};

// A microphone capture (real or simulated) plus its provenance.
struct Recording {
    Eigen::VectorXd samples;
    double sample_rate = 48000.0;
    Provenance origin;

    int size() const { return static_cast<int>(samples.size()); }
};

// One extracted chirp-long slice of a recording, aligned to a template.
struct Segment {
    Eigen::VectorXd samples;
    double sample_rate = 48000.0;
    long onset_index = 0;    // sample index of the chirp onset in the source
    double corr_peak = 0.0;  // normalized correlation magnitude at the onset
};

// Thrown when a recording does not contain the expected number of chirps.
class SegmentationError : public std::runtime_error {
public:
    SegmentationError(int expected, int found)
        : std::runtime_error("segmentation found " + std::to_string(found) +
                             " of " + std::to_string(expected) + " expected chirps"),
          expected_(expected),
          found_(found) {}

    int expected() const { return expected_; }
    int found() const { return found_; }

private:
    int expected_;
    int found_;
};

// Thrown when feature selection would return an empty mask.
class SelectionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Thrown when a classifier cannot be trained on the given data.
class TrainingError : public std::runtime_error {
public:
    explicit TrainingError(const std::string& what, double duality_gap = 0.0)
        : std::runtime_error(what), duality_gap_(duality_gap) {}

    double duality_gap() const { return duality_gap_; }

private:
    double duality_gap_;
};

// Profile file errors carry a machine-readable reason.
enum class ProfileFault { BadMagic, BadVersion, BadChecksum, Malformed, Io };

class ProfileError : public std::runtime_error {
public:
    ProfileError(ProfileFault fault, const std::string& what)
        : std::runtime_error(what), fault_(fault) {}

    ProfileFault fault() const { return fault_; }

private:
    ProfileFault fault_;
};

}  // namespace gripsense
