#include "gripsense/dsp.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace gripsense {

namespace {

using cd = std::complex<double>;

void check_design(int order, double fc, double fs) {
    if (order < 1) throw std::invalid_argument("butterworth: order must be >= 1");
    if (fs <= 0.0) throw std::invalid_argument("butterworth: sample rate must be positive");
    if (fc <= 0.0 || fc >= fs / 2.0) {
        throw std::invalid_argument("butterworth: cutoff must lie in (0, fs/2)");
    }
}

// Left-half-plane Butterworth pole on the unit circle, k = 0..order-1.
cd prototype_pole(int order, int k) {
    const double theta =
        std::numbers::pi * (2.0 * k + order + 1.0) / (2.0 * order);
    return {std::cos(theta), std::sin(theta)};
}

cd bilinear(cd s, double fs) {
    const double two_fs = 2.0 * fs;
    return (two_fs + s) / (two_fs - s);
}

// Build a cascade from digital poles plus repeated zeros at z = zero_at,
// normalizing each section to unit gain at z = ref (DC or Nyquist).
SosFilter assemble(const std::vector<cd>& zpoles, double zero_at, double ref) {
    SosFilter f;
    const int n = static_cast<int>(zpoles.size());
    // Poles come conjugate-paired as (k, n-1-k); the middle one (odd n) is real.
    for (int k = 0; k < n / 2; ++k) {
        const cd p = zpoles[k];
        SosSection s;
        s.b0 = 1.0;
        s.b1 = -2.0 * zero_at;
        s.b2 = zero_at * zero_at;
        s.a1 = -2.0 * p.real();
        s.a2 = std::norm(p);
        const double num = s.b0 + s.b1 * ref + s.b2 * ref * ref;
        const double den = 1.0 + s.a1 * ref + s.a2 * ref * ref;
        const double g = den / num;
        s.b0 *= g;
        s.b1 *= g;
        s.b2 *= g;
        f.sections.push_back(s);
    }
    if (n % 2 == 1) {
        const cd p = zpoles[n / 2];
        SosSection s;
        s.b0 = 1.0;
        s.b1 = -zero_at;
        s.a1 = -p.real();
        const double g = (1.0 + s.a1 * ref) / (s.b0 + s.b1 * ref);
        s.b0 *= g;
        s.b1 *= g;
        f.sections.push_back(s);
    }
    return f;
}

}  // namespace

Eigen::VectorXd SosFilter::apply(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = x;
    for (const SosSection& s : sections) {
        double s1 = 0.0, s2 = 0.0;
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            const double xi = y[i];
            const double yi = s.b0 * xi + s1;
            s1 = s.b1 * xi - s.a1 * yi + s2;
            s2 = s.b2 * xi - s.a2 * yi;
            y[i] = yi;
        }
    }
    return y;
}

Eigen::VectorXd SosFilter::apply_zero_phase(const Eigen::VectorXd& x) const {
    Eigen::VectorXd y = apply(x);
    y.reverseInPlace();
    y = apply(y);
    y.reverseInPlace();
    return y;
}

double SosFilter::magnitude(double freq_hz, double sample_rate) const {
    const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate;
    const cd z1 = std::polar(1.0, -w);
    const cd z2 = z1 * z1;
    cd h = 1.0;
    for (const SosSection& s : sections) {
        h *= (s.b0 + s.b1 * z1 + s.b2 * z2) / (1.0 + s.a1 * z1 + s.a2 * z2);
    }
    return std::abs(h);
}

SosFilter butterworth_lowpass(int order, double fc, double fs) {
    check_design(order, fc, fs);
    const double wa = 2.0 * fs * std::tan(std::numbers::pi * fc / fs);
    std::vector<cd> zp(order);
    for (int k = 0; k < order; ++k) {
        zp[k] = bilinear(wa * prototype_pole(order, k), fs);
    }
    return assemble(zp, -1.0, 1.0);  // zeros at Nyquist, unity at DC
}

SosFilter butterworth_highpass(int order, double fc, double fs) {
    check_design(order, fc, fs);
    const double wa = 2.0 * fs * std::tan(std::numbers::pi * fc / fs);
    std::vector<cd> zp(order);
    for (int k = 0; k < order; ++k) {
        zp[k] = bilinear(wa / prototype_pole(order, k), fs);
    }
    return assemble(zp, 1.0, -1.0);  // zeros at DC, unity at Nyquist
}

SosFilter butterworth_bandpass(int order, double lo, double hi, double fs) {
    if (!(0.0 < lo && lo < hi && hi < fs / 2.0)) {
        throw std::invalid_argument("bandpass: need 0 < lo < hi < fs/2");
    }
    SosFilter f = butterworth_highpass(order, lo, fs);
    SosFilter lp = butterworth_lowpass(order, hi, fs);
    f.sections.insert(f.sections.end(), lp.sections.begin(), lp.sections.end());
    return f;
}

Recording bandpass(const Recording& rec, double lo, double hi, int order,
                   bool zero_phase) {
    const SosFilter f = butterworth_bandpass(order, lo, hi, rec.sample_rate);
    Recording out = rec;
    out.samples = zero_phase ? f.apply_zero_phase(rec.samples) : f.apply(rec.samples);
    return out;
}

namespace {

// Cross-correlation of x against h for every onset 0..N-M via FFT.
Eigen::VectorXd cross_correlate(const Eigen::VectorXd& x, const Eigen::VectorXd& h) {
    const Eigen::Index n = x.size();
    const Eigen::Index m = h.size();
    Eigen::Index nfft = 1;
    while (nfft < n + m) nfft *= 2;

    Eigen::VectorXcd xp = Eigen::VectorXcd::Zero(nfft);
    Eigen::VectorXcd hp = Eigen::VectorXcd::Zero(nfft);
    xp.head(n).real() = x;
    hp.head(m).real() = h;

    Eigen::FFT<double> fft;
    Eigen::VectorXcd xf(nfft), hf(nfft), prod(nfft), res(nfft);
    fft.fwd(xf, xp);
    fft.fwd(hf, hp);
    prod = xf.array() * hf.array().conjugate();
    fft.inv(res, prod);
    return res.head(n - m + 1).real();
}

// Magnitude of the analytic signal.  A narrowband correlation function
// ripples at the carrier, leaving several near-equal peaks a few samples
// apart; the envelope collapses them into one smooth lobe so noise cannot
// flip the argmax between ripple crests.
Eigen::VectorXd analytic_envelope(const Eigen::VectorXd& x) {
    const Eigen::Index n = x.size();
    Eigen::Index nfft = 1;
    while (nfft < n) nfft *= 2;

    Eigen::VectorXcd xp = Eigen::VectorXcd::Zero(nfft);
    xp.head(n).real() = x;

    Eigen::FFT<double> fft;
    Eigen::VectorXcd xf(nfft), a(nfft);
    fft.fwd(xf, xp);
    for (Eigen::Index k = 1; k < nfft / 2; ++k) xf[k] *= 2.0;
    xf.segment(nfft / 2 + 1, nfft / 2 - 1).setZero();
    fft.inv(a, xf);
    return a.head(n).cwiseAbs();
}

}  // namespace

std::vector<Segment> segment(const Recording& rec, const Waveform& tmpl,
                             int expected_n) {
    const Eigen::Index n = rec.samples.size();
    const Eigen::Index m = tmpl.samples.size();
    if (expected_n < 1) throw std::invalid_argument("segment: expected_n must be >= 1");
    if (m < 2) throw std::invalid_argument("segment: template too short");
    if (m > n) throw std::invalid_argument("segment: template longer than recording");
    if (rec.sample_rate != tmpl.sample_rate) {
        throw std::invalid_argument("segment: sample rates differ");
    }

    const double h_norm = tmpl.samples.norm();
    if (h_norm == 0.0) throw std::invalid_argument("segment: template has zero energy");

    const Eigen::VectorXd raw = cross_correlate(rec.samples, tmpl.samples);
    const Eigen::VectorXd env = analytic_envelope(raw);

    // Rolling window energy via a prefix sum of squares.
    Eigen::VectorXd prefix(n + 1);
    prefix[0] = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        prefix[i + 1] = prefix[i] + rec.samples[i] * rec.samples[i];
    }

    const Eigen::Index n_onsets = n - m + 1;
    Eigen::VectorXd corr(n_onsets);
    for (Eigen::Index t = 0; t < n_onsets; ++t) {
        const double e = prefix[t + m] - prefix[t];
        corr[t] = e > 0.0 ? env[t] / (h_norm * std::sqrt(e)) : 0.0;
    }

    // Candidates above the floor, strongest first, ties to the earlier onset.
    std::vector<Eigen::Index> cand;
    cand.reserve(static_cast<std::size_t>(n_onsets));
    for (Eigen::Index t = 0; t < n_onsets; ++t) {
        if (corr[t] >= kCorrelationFloor) cand.push_back(t);
    }
    std::sort(cand.begin(), cand.end(), [&](Eigen::Index a, Eigen::Index b) {
        if (corr[a] != corr[b]) return corr[a] > corr[b];
        return a < b;
    });

    std::vector<Eigen::Index> picked;
    for (Eigen::Index t : cand) {
        if (static_cast<int>(picked.size()) == expected_n) break;
        bool clash = false;
        for (Eigen::Index p : picked) {
            if (std::abs(static_cast<long>(t - p)) < m) { clash = true; break; }
        }
        if (!clash) picked.push_back(t);
    }
    if (static_cast<int>(picked.size()) < expected_n) {
        throw SegmentationError(expected_n, static_cast<int>(picked.size()));
    }
    std::sort(picked.begin(), picked.end());

    std::vector<Segment> out;
    out.reserve(picked.size());
    for (Eigen::Index t : picked) {
        Segment s;
        s.samples = rec.samples.segment(t, m);
        s.sample_rate = rec.sample_rate;
        s.onset_index = static_cast<long>(t);
        s.corr_peak = std::min(corr[t], 1.0);
        out.push_back(std::move(s));
    }
    return out;
}

std::pair<Waveform, Waveform> split_paths(const Segment& seg, int lead_samples) {
    const Eigen::Index n = seg.samples.size();
    if (lead_samples <= 0 || lead_samples >= n) {
        throw std::invalid_argument("split_paths: lead_samples must be in (0, segment length)");
    }
    Waveform head, body;
    head.sample_rate = body.sample_rate = seg.sample_rate;
    head.samples = seg.samples.head(lead_samples);
    body.samples = seg.samples.tail(n - lead_samples);
    return {std::move(head), std::move(body)};
}

double gap_band_energy_db(const Recording& rec, int window_len) {
    if (window_len < 2) throw std::invalid_argument("gap_band_energy_db: window too short");
    if (rec.samples.size() < 2 * static_cast<Eigen::Index>(window_len)) {
        throw std::invalid_argument(
            "gap_band_energy_db: recording shorter than one chirp+gap period");
    }
    const Recording banded =
        bandpass(rec, kOperationalBandLo, kOperationalBandHi, kDefaultFilterOrder);

    Eigen::VectorXd prefix(banded.samples.size() + 1);
    prefix[0] = 0.0;
    for (Eigen::Index i = 0; i < banded.samples.size(); ++i) {
        prefix[i + 1] = prefix[i] + banded.samples[i] * banded.samples[i];
    }

    const int hop = std::max(1, window_len / 4);
    std::vector<double> powers;
    for (Eigen::Index t = 0; t + window_len <= banded.samples.size(); t += hop) {
        powers.push_back((prefix[t + window_len] - prefix[t]) / window_len);
    }
    std::sort(powers.begin(), powers.end());

    // Lower decile with linear interpolation between order statistics.
    const double rank = 0.10 * (powers.size() - 1);
    const std::size_t i0 = static_cast<std::size_t>(rank);
    const double frac = rank - static_cast<double>(i0);
    const double p = (i0 + 1 < powers.size())
                         ? powers[i0] * (1.0 - frac) + powers[i0 + 1] * frac
                         : powers[i0];
    return 10.0 * std::log10(p + 1e-20);
}

JamReport detect_jamming(const Recording& rec, const Waveform& tmpl,
                         double threshold_db) {
    if (!std::isfinite(threshold_db)) {
        throw std::invalid_argument("detect_jamming: threshold must be finite");
    }
    JamReport r;
    r.band_energy_db = gap_band_energy_db(rec, static_cast<int>(tmpl.samples.size()));
    r.threshold_db = threshold_db;
    r.excess_db = r.band_energy_db - threshold_db;
    r.detected = r.band_energy_db > threshold_db;
    return r;
}

}  // namespace gripsense
