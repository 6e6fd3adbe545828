#include <unsupported/Eigen/FFT>

#include <cmath>
#include <limits>
#include <vector>

#include "doctest.h"
#include "gripsense/rng.hpp"
#include "gripsense/signal.hpp"
#include "gripsense/simchan.hpp"

using namespace gripsense;

namespace {

HandProfile one_contact_hand(double pressure, double width = 0.2) {
    HandProfile h;
    h.user_id = "probe";
    h.contacts = {{0.45, pressure, width}};
    return h;
}

int first_arrival(const Eigen::VectorXd& x) {
    const double floor = 1e-9 * x.cwiseAbs().maxCoeff();
    for (int i = 0; i < x.size(); ++i) {
        if (std::fabs(x[i]) > floor) return i;
    }
    return -1;
}

// Mean spectral magnitude inside [lo, hi] via a zero-padded transform.
double band_mean_mag(const Eigen::VectorXd& x, double fs, double lo, double hi) {
    Eigen::Index nfft = 1;
    while (nfft < x.size()) nfft *= 2;
    Eigen::VectorXcd in = Eigen::VectorXcd::Zero(nfft);
    in.real().head(x.size()) = x;
    Eigen::FFT<double> fft;
    Eigen::VectorXcd spec(nfft);
    fft.fwd(spec, in);
    double sum = 0.0;
    int count = 0;
    for (Eigen::Index k = 0; k <= nfft / 2; ++k) {
        const double f = static_cast<double>(k) * fs / static_cast<double>(nfft);
        if (f >= lo && f <= hi) {
            sum += std::abs(spec[k]);
            ++count;
        }
    }
    return sum / count;
}

SimOptions quiet() {
    SimOptions o;
    o.noise = false;
    o.jitter = false;
    return o;
}

}  // namespace

TEST_CASE("contact stiffening constants reproduce the design point") {
    const MediumState m;
    CHECK(m.beta() == doctest::Approx(0.15).epsilon(1e-12));

    std::vector<Contact> contacts = {{0.3, 0.5, 0.1}, {0.7, 0.5, 0.1}};
    CHECK(effective_bulk_modulus(m, contacts) ==
          doctest::Approx(m.K0 * (1.0 + m.beta() * 1.0)).epsilon(1e-12));
    CHECK(structure_speed(m, contacts) ==
          doctest::Approx(std::sqrt(effective_bulk_modulus(m, contacts) / m.rho)));
}

TEST_CASE("structure path leads the airborne path by about ten samples") {
    const DevicePreset device = phone();
    const auto cohort = make_hand_cohort(20, rng::derive(3, "cohort"));
    for (const HandProfile& hand : cohort) {
        const double lead = structure_lead_samples(device, hand);
        CHECK(lead >= 9.0);
        CHECK(lead <= 11.0);
    }

    // Empirically: render each path alone and compare first arrivals.
    SignalSpec spec;
    spec.n_chirps = 1;
    const Waveform tx = make_sequence(spec);
    SimOptions structure_only = quiet();
    structure_only.airborne = false;
    structure_only.reflections = false;
    SimOptions airborne_only = quiet();
    airborne_only.structure = false;
    airborne_only.reflections = false;

    const Recording s = simulate_hold(tx, cohort[0], device, office(), 5, structure_only);
    const Recording a = simulate_hold(tx, cohort[0], device, office(), 5, airborne_only);
    const int lead = first_arrival(a.samples) - first_arrival(s.samples);
    CHECK(lead >= 9);
    CHECK(lead <= 11);
}

TEST_CASE("pressing harder stiffens the body and shortens the structure delay") {
    const DevicePreset device = phone();
    double prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 20; ++i) {
        HandProfile h = one_contact_hand(0.05 + 0.045 * i);
        const double d = structure_delay_seconds(device, h);
        CHECK(d < prev);
        prev = d;
    }
}

TEST_CASE("no energy arrives before the structure delay") {
    SignalSpec spec;
    spec.n_chirps = 1;
    const DevicePreset device = phone();
    const HandProfile hand = one_contact_hand(0.5);
    const Recording rec =
        simulate_hold(make_sequence(spec), hand, device, office(), 17, quiet());
    const int structure_onset = static_cast<int>(
        structure_delay_seconds(device, hand) * device.sample_rate);
    REQUIRE(structure_onset > 0);
    for (int i = 0; i < structure_onset; ++i) CHECK(rec.samples[i] == 0.0);
}

TEST_CASE("structure arrives before air on every preset") {
    for (const DevicePreset& device : {phone(), phone_compact(), tablet()}) {
        const HandProfile hand = one_contact_hand(0.5);
        CHECK(structure_delay_seconds(device, hand) < airborne_delay_seconds(device));
        CHECK(device.structure_speed() > kSpeedOfSoundAir);
    }
}

TEST_CASE("clean channel is linear in the transmit waveform") {
    SignalSpec spec;
    spec.n_chirps = 2;
    const Waveform tx = make_sequence(spec);
    Waveform half = tx;
    half.samples *= 0.5;

    const HandProfile hand = one_contact_hand(0.6);
    const Recording full = simulate_hold(tx, hand, phone(), office(), 23, quiet());
    const Recording scaled = simulate_hold(half, hand, phone(), office(), 23, quiet());
    CHECK((scaled.samples - 0.5 * full.samples).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("identical seeds render bit-identical captures") {
    const auto cohort = make_hand_cohort(1, rng::derive(9, "cohort"));
    const Waveform tx = make_sequence(SignalSpec{});
    const Recording a = simulate_hold(tx, cohort[0], phone(), office(), 77);
    const Recording b = simulate_hold(tx, cohort[0], phone(), office(), 77);
    CHECK((a.samples.array() == b.samples.array()).all());
    CHECK(a.origin.seed == 77);
    CHECK(a.origin.user_id == cohort[0].user_id);

    const Recording c = simulate_hold(tx, cohort[0], phone(), office(), 78);
    CHECK((a.samples - c.samples).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("sample-rate mismatch is rejected") {
    Waveform tx = make_sequence(SignalSpec{});
    tx.sample_rate = 44100.0;
    CHECK_THROWS_AS(
        simulate_hold(tx, one_contact_hand(0.5), phone(), office(), 1),
        std::invalid_argument);
}

TEST_CASE("a half-unit pressure change moves the sensing band by 3 dB") {
    SignalSpec spec;
    const Waveform tx = make_sequence(spec);
    HandProfile soft = one_contact_hand(0.25);
    HandProfile firm = one_contact_hand(0.75);

    const Recording a = simulate_hold(tx, soft, phone(), office(), 31);
    const Recording b = simulate_hold(tx, firm, phone(), office(), 31);
    const double ma = band_mean_mag(a.samples, a.sample_rate, 19000.0, 21000.0);
    const double mb = band_mean_mag(b.samples, b.sample_rate, 19000.0, 21000.0);
    CHECK(std::fabs(20.0 * std::log10(ma / mb)) >= 3.0);
}

TEST_CASE("hand cohorts are distinct, spaced, and reproducible") {
    const auto cohort = make_hand_cohort(20, rng::derive(1, "cohort"));
    REQUIRE(cohort.size() == 20);

    const auto params = [](const HandProfile& h) {
        std::vector<double> v;
        for (const Contact& c : h.contacts) {
            v.push_back(c.position);
            v.push_back(c.pressure);
            v.push_back(c.width);
        }
        return v;
    };
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        CHECK_NOTHROW(cohort[i].validate());
        for (std::size_t j = i + 1; j < cohort.size(); ++j) {
            CHECK(cohort[i].user_id != cohort[j].user_id);
            const auto a = params(cohort[i]);
            const auto b = params(cohort[j]);
            REQUIRE(a.size() == b.size());
            double d2 = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) {
                d2 += (a[k] - b[k]) * (a[k] - b[k]);
            }
            CHECK(std::sqrt(d2) > 3.0 * cohort[i].jitter_sigma);
        }
    }

    CHECK(make_hand_cohort(1, 5).size() == 1);
    CHECK_THROWS_AS(make_hand_cohort(0, 5), std::invalid_argument);

    const auto again = make_hand_cohort(20, rng::derive(1, "cohort"));
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        CHECK(cohort[i].user_id == again[i].user_id);
        CHECK(cohort[i].grip_gain == again[i].grip_gain);
    }
}

TEST_CASE("replay crosses two lossy air hops") {
    const auto cohort = make_hand_cohort(1, rng::derive(21, "cohort"));
    const Waveform tx = make_sequence(SignalSpec{});
    const Recording victim = simulate_hold(tx, cohort[0], phone(), office(), 55);

    const Recording once = simulate_replay(victim, 0.2, 0.2, 66);
    const double loss_db =
        10.0 * std::log10(once.samples.squaredNorm() / victim.samples.squaredNorm());
    CHECK(loss_db <= -12.0);

    const Recording twice = simulate_replay(once, 0.2, 0.2, 67);
    CHECK(twice.samples.squaredNorm() < once.samples.squaredNorm());

    CHECK(once.origin.environment.find("replay") != std::string::npos);
    CHECK_THROWS_AS(simulate_replay(victim, 0.0, 0.2, 1), std::invalid_argument);
}

TEST_CASE("a disabled jammer is the identity") {
    const auto cohort = make_hand_cohort(1, rng::derive(22, "cohort"));
    const Recording rec =
        simulate_hold(make_sequence(SignalSpec{}), cohort[0], phone(), office(), 3);
    const Recording same = inject_jammer(
        rec, SignalSpec{}, -std::numeric_limits<double>::infinity(), 0.2, 9);
    CHECK((same.samples.array() == rec.samples.array()).all());
    CHECK_THROWS_AS(inject_jammer(rec, SignalSpec{}, 0.0, 0.0, 9), std::invalid_argument);
}

TEST_CASE("profile and environment validation") {
    HandProfile empty;
    empty.contacts.clear();
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);

    HandProfile wide = one_contact_hand(0.5, 0.31);
    CHECK_THROWS_AS(wide.validate(), std::invalid_argument);

    Environment env = office();
    env.reflection_gains = {1.2, 0.1};
    CHECK_THROWS_AS(env.validate(), std::invalid_argument);

    CHECK(office().snr_db == 30.0);
    CHECK(public_space().snr_db == 10.0);
    CHECK(public_space().reflection_count == 4);
}

TEST_CASE("preset lookup and geometry") {
    CHECK(phone().path_length == 0.15);
    CHECK(phone().mic_count == 2);
    CHECK(tablet().path_length == 0.24);
    CHECK(tablet().mic_count == 1);
    CHECK(phone_compact().path_length == 0.13);

    CHECK(device_by_name("tablet").name == "tablet");
    CHECK(environment_by_name("public").name == "public");
    CHECK_THROWS_AS(device_by_name("walkman"), std::invalid_argument);
    CHECK_THROWS_AS(environment_by_name("spaceship"), std::invalid_argument);
}

TEST_CASE("configs survive a JSON round trip") {
    DevicePreset device = tablet();
    device.contact_alpha = 3.25;
    const DevicePreset d2 = device_from_json(to_json(device));
    CHECK(d2.name == device.name);
    CHECK(d2.path_length == device.path_length);
    CHECK(d2.contact_alpha == device.contact_alpha);
    CHECK(d2.lead_samples == device.lead_samples);

    const Environment env = public_space();
    const Environment e2 = environment_from_json(to_json(env));
    CHECK(e2.name == env.name);
    CHECK(e2.snr_db == env.snr_db);
    CHECK(e2.reflection_gains == env.reflection_gains);

    const auto cohort = make_hand_cohort(3, 77);
    const auto c2 = cohort_from_json(to_json(cohort));
    REQUIRE(c2.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(c2[i].user_id == cohort[i].user_id);
        CHECK(c2[i].grip_gain == cohort[i].grip_gain);
        REQUIRE(c2[i].contacts.size() == cohort[i].contacts.size());
        for (std::size_t k = 0; k < c2[i].contacts.size(); ++k) {
            CHECK(c2[i].contacts[k].position == cohort[i].contacts[k].position);
            CHECK(c2[i].contacts[k].pressure == cohort[i].contacts[k].pressure);
        }
    }
}
