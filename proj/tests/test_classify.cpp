#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "doctest.h"
#include "gripsense/classify.hpp"
#include "gripsense/rng.hpp"

using namespace gripsense;
namespace fs = std::filesystem;

namespace {

SelectionMask full_mask(Eigen::Index dim) {
    SelectionMask m;
    m.scores = Eigen::VectorXd::Zero(dim);
    m.selected = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(dim, true);
    return m;
}

// Gaussian blobs, one per (label, center) pair, `per` rows each.
TrainingSet blobs(const std::vector<std::pair<std::string, Eigen::VectorXd>>& spec,
                  int per, double sigma, std::uint64_t seed) {
    rng::Stream stream(seed);
    TrainingSet ts;
    const Eigen::Index dim = spec.front().second.size();
    ts.data.rows.resize(static_cast<Eigen::Index>(spec.size()) * per, dim);
    for (std::size_t g = 0; g < spec.size(); ++g) {
        for (int i = 0; i < per; ++i) {
            const Eigen::Index r = static_cast<Eigen::Index>(g) * per + i;
            for (Eigen::Index k = 0; k < dim; ++k) {
                ts.data.rows(r, k) = spec[g].second[k] + sigma * stream.gaussian();
            }
            ts.data.labels.push_back(spec[g].first);
        }
    }
    ts.mask = full_mask(dim);
    return ts;
}

fs::path temp_dir() {
    const fs::path dir = fs::temp_directory_path() / "gripsense_classify_tests";
    fs::create_directories(dir);
    return dir;
}

std::vector<std::uint8_t> read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& p, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

// Standard reflected CRC-32 (same polynomial the container uses), kept local
// so container surgery in tests stays independent of the library.
std::uint32_t ref_crc32(const std::uint8_t* data, std::size_t len) {
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) {
        crc ^= data[i];
        for (int k = 0; k < 8; ++k) {
            crc = (crc & 1) ? 0xEDB88320u ^ (crc >> 1) : crc >> 1;
        }
    }
    return crc ^ 0xFFFFFFFFu;
}

// Rebuild the container envelope around a (possibly rewritten) payload.
std::vector<std::uint8_t> reframe(const std::vector<std::uint8_t>& payload) {
    std::vector<std::uint8_t> out = {'E', 'C', 'H', 'L'};
    const std::uint16_t version = 1;
    const std::uint64_t len = payload.size();
    out.insert(out.end(), reinterpret_cast<const std::uint8_t*>(&version),
               reinterpret_cast<const std::uint8_t*>(&version) + 2);
    out.insert(out.end(), reinterpret_cast<const std::uint8_t*>(&len),
               reinterpret_cast<const std::uint8_t*>(&len) + 8);
    out.insert(out.end(), payload.begin(), payload.end());
    const std::uint32_t crc = ref_crc32(payload.data(), payload.size());
    out.insert(out.end(), reinterpret_cast<const std::uint8_t*>(&crc),
               reinterpret_cast<const std::uint8_t*>(&crc) + 4);
    return out;
}

ProfileMetadata sample_meta() {
    ProfileMetadata meta;
    meta.signal.n_chirps = 7;
    meta.signal.gap_len = 900;
    meta.device = "tablet";
    meta.environment = "public";
    meta.jam_threshold_db = -48.25;
    meta.enroll_seed = 0xDEADBEEF12345678ull;
    return meta;
}

}  // namespace

TEST_CASE("model kind names round-trip") {
    CHECK(model_kind_from_name("lda") == ModelKind::Lda);
    CHECK(model_kind_from_name("svm") == ModelKind::Svm);
    CHECK(model_kind_name(ModelKind::Lda) == "lda");
    CHECK(model_kind_name(ModelKind::Svm) == "svm");
    CHECK_THROWS_AS(model_kind_from_name("forest"), std::invalid_argument);
}

TEST_CASE("LDA separates well-spaced Gaussians") {
    const Eigen::VectorXd up = Eigen::VectorXd::Constant(5, 2.0);
    const TrainingSet ts = blobs({{"left", -up}, {"right", up}}, 200, 1.0, 101);
    const VerifierModel model = train_lda(ts);
    REQUIRE(model.classes.size() == 2);

    // Accuracy on a fresh draw from the same distribution.
    rng::Stream stream(202);
    int correct = 0;
    const int trials = 400;
    for (int i = 0; i < trials; ++i) {
        const bool right = i % 2 == 1;
        Eigen::VectorXd x(5);
        for (int k = 0; k < 5; ++k) {
            x[k] = (right ? 2.0 : -2.0) + stream.gaussian();
        }
        const Decision d = verify(model, x);
        if (d.identified == std::optional<std::string>(right ? "right" : "left")) {
            ++correct;
        }
    }
    CHECK(static_cast<double>(correct) / trials >= 0.99);

    // At an exact class center the posterior is decisive.
    const Decision at_center = verify(model, up);
    REQUIRE(at_center.identified.has_value());
    CHECK(*at_center.identified == "right");
    CHECK(at_center.confidence > 0.5);
    CHECK(at_center.probabilities.sum() == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("indistinguishable classes yield a uniform posterior and Unknown") {
    const Eigen::VectorXd point = (Eigen::VectorXd(2) << 1.5, -2.0).finished();
    const TrainingSet three =
        blobs({{"a", point}, {"b", point}, {"c", point}}, 3, 0.0, 1);
    const VerifierModel lda = train_lda(three);
    const Decision d = verify(lda, point);
    for (int c = 0; c < 3; ++c) {
        CHECK(d.probabilities[c] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    }
    CHECK_FALSE(d.identified.has_value());
    CHECK(d.confidence == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    std::vector<std::pair<std::string, Eigen::VectorXd>> twenty;
    for (int g = 0; g < 20; ++g) twenty.emplace_back("u" + std::to_string(g), point);
    const Decision wide = verify(train_lda(blobs(twenty, 2, 0.0, 2)), point);
    CHECK(wide.confidence == doctest::Approx(0.05).epsilon(1e-12));
    CHECK_FALSE(wide.identified.has_value());

    const TrainingSet two = blobs({{"a", point}, {"b", point}}, 4, 0.0, 3);
    const Decision svm_d = verify(train_svm(two), point);
    CHECK(svm_d.probabilities[0] == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_FALSE(svm_d.identified.has_value());
}

TEST_CASE("SVM recovers the separating direction") {
    const Eigen::VectorXd diag = (Eigen::VectorXd(2) << 1.0, 1.0).finished();
    const TrainingSet ts = blobs({{"neg", -diag}, {"pos", diag}}, 20, 0.02, 33);
    const VerifierModel model = train_svm(ts);

    const int pos = model.classes[0] == "pos" ? 0 : 1;
    const Eigen::VectorXd w = model.svm.weights.row(pos);
    const double cosine = w.dot(diag) / (w.norm() * diag.norm());
    CHECK(cosine >= std::cos(3.0 * std::numbers::pi / 180.0));

    // Zero training errors on a margin this wide.
    for (Eigen::Index r = 0; r < ts.data.count(); ++r) {
        const Decision d = verify(model, Eigen::VectorXd(ts.data.rows.row(r).transpose()));
        REQUIRE(d.identified.has_value());
        CHECK(*d.identified == ts.data.labels[static_cast<std::size_t>(r)]);
    }
}

TEST_CASE("duplicated points pin the boundary to the perpendicular bisector") {
    TrainingSet ts;
    ts.data.rows.resize(20, 2);
    for (int i = 0; i < 10; ++i) {
        ts.data.rows.row(i) << -1.0, 0.0;
        ts.data.rows.row(10 + i) << 1.0, 0.0;
        ts.data.labels.push_back("a");
    }
    for (int i = 0; i < 10; ++i) ts.data.labels.push_back("b");
    ts.mask = full_mask(2);

    const VerifierModel model = train_svm(ts);
    const int b_idx = model.classes[0] == "b" ? 0 : 1;
    const Eigen::VectorXd w = model.svm.weights.row(b_idx);
    CHECK(w[0] == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(w[1] == 0.0);  // no signal in that dimension, never touched
    CHECK(std::fabs(model.svm.bias[b_idx]) <= 1e-3);
}

TEST_CASE("renaming labels permutes the outputs and nothing else") {
    const Eigen::VectorXd up = Eigen::VectorXd::Constant(3, 1.0);
    for (const ModelKind kind : {ModelKind::Lda, ModelKind::Svm}) {
        const TrainingSet ts = blobs({{"a", -up}, {"b", up}}, 15, 0.3, 44);
        TrainingSet renamed = ts;
        for (std::string& l : renamed.data.labels) l = (l == "a") ? "b" : "a";

        const VerifierModel m1 = train_model(kind, ts);
        const VerifierModel m2 = train_model(kind, renamed);
        REQUIRE(m1.classes == std::vector<std::string>{"a", "b"});
        REQUIRE(m2.classes == std::vector<std::string>{"b", "a"});

        rng::Stream stream(55);
        for (int t = 0; t < 20; ++t) {
            Eigen::VectorXd x(3);
            for (int k = 0; k < 3; ++k) x[k] = 2.0 * stream.gaussian();
            const Eigen::VectorXd p1 = class_probabilities(m1, x);
            const Eigen::VectorXd p2 = class_probabilities(m2, x);
            CHECK(p1[0] == doctest::Approx(p2[0]).epsilon(1e-12));  // "a" kept slot 0
            CHECK(p1[1] == doctest::Approx(p2[1]).epsilon(1e-12));
            const Decision d1 = verify(m1, x);
            const Decision d2 = verify(m2, x);
            std::optional<std::string> mapped;  // the same cluster wins, renamed
            if (d1.identified) mapped = (*d1.identified == "a") ? "b" : "a";
            CHECK(d2.identified == mapped);
        }
    }
}

TEST_CASE("training is deterministic") {
    const Eigen::VectorXd up = Eigen::VectorXd::Constant(4, 1.5);
    const TrainingSet ts = blobs({{"a", -up}, {"b", up}}, 25, 0.8, 66);

    const VerifierModel l1 = train_lda(ts);
    const VerifierModel l2 = train_lda(ts);
    CHECK((l1.lda.coef.array() == l2.lda.coef.array()).all());
    CHECK((l1.lda.intercept.array() == l2.lda.intercept.array()).all());

    const VerifierModel s1 = train_svm(ts);
    const VerifierModel s2 = train_svm(ts);
    CHECK((s1.svm.weights.array() == s2.svm.weights.array()).all());
    CHECK((s1.svm.bias.array() == s2.svm.bias.array()).all());
    CHECK((s1.svm.calib_a.array() == s2.svm.calib_a.array()).all());
}

TEST_CASE("probabilities behave like probabilities") {
    const Eigen::VectorXd up = Eigen::VectorXd::Constant(3, 1.0);
    const TrainingSet ts = blobs({{"a", -up}, {"b", up}, {"c", 3.0 * up}}, 12, 0.5, 77);
    rng::Stream stream(88);
    for (const ModelKind kind : {ModelKind::Lda, ModelKind::Svm}) {
        const VerifierModel model = train_model(kind, ts);
        for (int t = 0; t < 25; ++t) {
            Eigen::VectorXd x(3);
            for (int k = 0; k < 3; ++k) x[k] = 3.0 * stream.gaussian();
            const Eigen::VectorXd p = class_probabilities(model, x);
            CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-9));
            for (int c = 0; c < p.size(); ++c) {
                CHECK(p[c] >= 0.0);
                CHECK(p[c] <= 1.0);  // saturates for points far outside the blobs
            }
        }
    }
}

TEST_CASE("a uniform gain on the training data changes nothing") {
    const Eigen::VectorXd up = Eigen::VectorXd::Constant(4, 1.0);
    const TrainingSet ts = blobs({{"a", -up}, {"b", up}}, 30, 0.6, 99);
    TrainingSet scaled = ts;
    scaled.data.rows *= 3.0;

    const VerifierModel base = train_lda(ts);
    const VerifierModel gain = train_lda(scaled);
    rng::Stream stream(111);
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd x(4);
        for (int k = 0; k < 4; ++k) x[k] = 2.0 * stream.gaussian();
        const Eigen::VectorXd pa = class_probabilities(base, x);
        const Eigen::VectorXd pb = class_probabilities(gain, 3.0 * x);
        CHECK((pa - pb).cwiseAbs().maxCoeff() <= 1e-9);
    }
}

TEST_CASE("confidence thresholding is monotone in the threshold") {
    const Eigen::VectorXd up = Eigen::VectorXd::Constant(2, 1.0);
    const TrainingSet ts = blobs({{"a", -up}, {"b", up}}, 20, 0.5, 123);
    VerifierModel model = train_lda(ts);

    const Eigen::VectorXd midpoint = Eigen::VectorXd::Zero(2);
    model.confidence_threshold = 0.999999;
    CHECK_FALSE(verify(model, midpoint).identified.has_value());
    model.confidence_threshold = 0.0;
    CHECK(verify(model, midpoint).identified.has_value());

    // Identified at a low bar implies identified at any lower bar.
    model.confidence_threshold = 0.6;
    const Decision mid = verify(model, up);
    model.confidence_threshold = 0.3;
    const Decision low = verify(model, up);
    if (mid.identified.has_value()) CHECK(low.identified.has_value());
}

TEST_CASE("malformed inputs are rejected") {
    const Eigen::VectorXd up = Eigen::VectorXd::Constant(2, 1.0);
    const TrainingSet ts = blobs({{"a", -up}, {"b", up}}, 10, 0.4, 321);
    const VerifierModel model = train_lda(ts);
    CHECK_THROWS_AS(class_probabilities(model, Eigen::VectorXd::Zero(3)),
                    std::invalid_argument);

    TrainingSet bad_mask = ts;
    bad_mask.mask = full_mask(5);
    CHECK_THROWS_AS(bad_mask.validate(), std::invalid_argument);

    TrainingSet empty_mask = ts;
    empty_mask.mask.selected.setConstant(false);
    CHECK_THROWS_AS(empty_mask.validate(), std::invalid_argument);
}

TEST_CASE("profiles round-trip bit for bit") {
    const fs::path dir = temp_dir();
    const Eigen::VectorXd up = Eigen::VectorXd::Constant(4, 1.2);
    const TrainingSet ts =
        blobs({{"alice", -up}, {"bob", up}, {"carol", 3.0 * up}}, 12, 0.7, 555);

    for (const ModelKind kind : {ModelKind::Lda, ModelKind::Svm}) {
        const VerifierModel model = train_model(kind, ts);
        const ProfileMetadata meta = sample_meta();
        const fs::path path = dir / (model_kind_name(kind) + ".echl");
        save_profile(model, meta, path.string());

        const Profile loaded = load_profile(path.string());
        CHECK(loaded.model.kind == kind);
        CHECK(loaded.model.classes == model.classes);
        CHECK(loaded.model.confidence_threshold == model.confidence_threshold);
        CHECK((loaded.model.mask.scores.array() == model.mask.scores.array()).all());
        CHECK((loaded.model.mask.selected == model.mask.selected).all());
        CHECK((loaded.model.standardizer.mean.array() ==
               model.standardizer.mean.array()).all());
        CHECK(loaded.meta.device == "tablet");
        CHECK(loaded.meta.environment == "public");
        CHECK(loaded.meta.jam_threshold_db == meta.jam_threshold_db);
        CHECK(loaded.meta.enroll_seed == meta.enroll_seed);
        CHECK(loaded.meta.signal.n_chirps == 7);
        CHECK(loaded.meta.signal.gap_len == 900);

        rng::Stream stream(777);
        for (int t = 0; t < 100; ++t) {
            Eigen::VectorXd x(4);
            for (int k = 0; k < 4; ++k) x[k] = 2.0 * stream.gaussian();
            const Eigen::VectorXd pa = class_probabilities(model, x);
            const Eigen::VectorXd pb = class_probabilities(loaded.model, x);
            CHECK((pa.array() == pb.array()).all());
        }
    }
}

TEST_CASE("profile container corruption maps to distinct faults") {
    const fs::path dir = temp_dir();
    const Eigen::VectorXd up = Eigen::VectorXd::Constant(2, 1.0);
    const VerifierModel model =
        train_lda(blobs({{"a", -up}, {"b", up}}, 8, 0.4, 888));
    const fs::path good = dir / "good.echl";
    save_profile(model, sample_meta(), good.string());
    const std::vector<std::uint8_t> bytes = read_bytes(good);
    REQUIRE(bytes.size() > 20);

    const auto fault_of = [&](const fs::path& p) {
        try {
            load_profile(p.string());
        } catch (const ProfileError& e) {
            return e.fault();
        }
        FAIL("expected a profile error");
        return ProfileFault::Io;
    };

    CHECK(fault_of(dir / "does_not_exist.echl") == ProfileFault::Io);

    auto bad_magic = bytes;
    bad_magic[0] = 'X';
    write_bytes(dir / "magic.echl", bad_magic);
    CHECK(fault_of(dir / "magic.echl") == ProfileFault::BadMagic);

    auto bad_version = bytes;
    bad_version[4] = 2;
    write_bytes(dir / "version.echl", bad_version);
    CHECK(fault_of(dir / "version.echl") == ProfileFault::BadVersion);

    auto truncated = bytes;
    truncated.pop_back();
    write_bytes(dir / "short.echl", truncated);
    CHECK(fault_of(dir / "short.echl") == ProfileFault::BadChecksum);

    auto flipped = bytes;
    flipped[20] ^= 0xFF;  // inside the payload
    write_bytes(dir / "flipped.echl", flipped);
    CHECK(fault_of(dir / "flipped.echl") == ProfileFault::BadChecksum);

    // Valid envelope around a payload declaring an unknown model kind.
    std::vector<std::uint8_t> payload(bytes.begin() + 14, bytes.end() - 4);
    auto bad_kind = payload;
    bad_kind[0] = 7;
    write_bytes(dir / "kind.echl", reframe(bad_kind));
    CHECK(fault_of(dir / "kind.echl") == ProfileFault::Malformed);

    // Valid envelope with junk after the last field.
    auto padded = payload;
    padded.push_back(0x00);
    write_bytes(dir / "padded.echl", reframe(padded));
    CHECK(fault_of(dir / "padded.echl") == ProfileFault::Malformed);
}
