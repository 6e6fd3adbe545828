#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gripsense/classify.hpp"

// Profile container: magic "ECHL", u16 format version, u64 payload length,
// payload (little-endian scalars, length-prefixed strings), trailing CRC32
// of the payload.  Doubles are stored bit-exactly, so save/load round-trips
// reproduce the model parameters verbatim.

namespace gripsense {

namespace {

constexpr char kMagic[4] = {'E', 'C', 'H', 'L'};
constexpr std::uint16_t kVersion = 1;

std::uint32_t crc32(const std::uint8_t* data, std::size_t len) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) {
                c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            }
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::size_t i = 0; i < len; ++i) {
        crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
    }
    return crc ^ 0xFFFFFFFFu;
}

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v) { raw(&v, sizeof v); }
    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void i32(std::int32_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
    void vec(const Eigen::VectorXd& v) {
        u32(static_cast<std::uint32_t>(v.size()));
        raw(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
    }
    void mat(const Eigen::MatrixXd& m) {
        u32(static_cast<std::uint32_t>(m.rows()));
        u32(static_cast<std::uint32_t>(m.cols()));
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            for (Eigen::Index c = 0; c < m.cols(); ++c) f64(m(r, c));
        }
    }
    const std::vector<std::uint8_t>& bytes() const { return buf_; }

private:
    void raw(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t len) : data_(data), len_(len) {}

    std::uint8_t u8() { return take<std::uint8_t>(); }
    std::uint16_t u16() { return take<std::uint16_t>(); }
    std::uint32_t u32() { return take<std::uint32_t>(); }
    std::uint64_t u64() { return take<std::uint64_t>(); }
    std::int32_t i32() { return take<std::int32_t>(); }
    double f64() { return take<double>(); }
    std::string str() {
        const std::uint32_t n = u32();
        need(n);
        std::string s(reinterpret_cast<const char*>(data_ + pos_), n);
        pos_ += n;
        return s;
    }
    Eigen::VectorXd vec() {
        const std::uint32_t n = u32();
        need(sizeof(double) * n);
        Eigen::VectorXd v(n);
        std::memcpy(v.data(), data_ + pos_, sizeof(double) * n);
        pos_ += sizeof(double) * n;
        return v;
    }
    Eigen::MatrixXd mat() {
        const std::uint32_t rows = u32();
        const std::uint32_t cols = u32();
        Eigen::MatrixXd m(rows, cols);
        for (std::uint32_t r = 0; r < rows; ++r) {
            for (std::uint32_t c = 0; c < cols; ++c) m(r, c) = f64();
        }
        return m;
    }
    bool exhausted() const { return pos_ == len_; }

private:
    template <typename T>
    T take() {
        need(sizeof(T));
        T v;
        std::memcpy(&v, data_ + pos_, sizeof(T));
        pos_ += sizeof(T);
        return v;
    }
    void need(std::size_t n) {
        if (pos_ + n > len_) {
            throw ProfileError(ProfileFault::Malformed, "profile payload ends early");
        }
    }
    const std::uint8_t* data_;
    std::size_t len_;
    std::size_t pos_ = 0;
};

void write_signal_spec(Writer& w, const SignalSpec& s) {
    w.f64(s.f_start);
    w.f64(s.f_end);
    w.f64(s.sample_rate);
    w.i32(s.chirp_len);
    w.i32(s.gap_len);
    w.i32(s.n_chirps);
    w.f64(s.amplitude);
    w.i32(s.taper_len);
}

SignalSpec read_signal_spec(Reader& r) {
    SignalSpec s;
    s.f_start = r.f64();
    s.f_end = r.f64();
    s.sample_rate = r.f64();
    s.chirp_len = r.i32();
    s.gap_len = r.i32();
    s.n_chirps = r.i32();
    s.amplitude = r.f64();
    s.taper_len = r.i32();
    return s;
}

}  // namespace

void save_profile(const VerifierModel& model, const ProfileMetadata& meta,
                  const std::string& path) {
    Writer w;
    w.u8(static_cast<std::uint8_t>(model.kind));
    w.f64(model.confidence_threshold);
    w.u32(static_cast<std::uint32_t>(model.classes.size()));
    for (const std::string& c : model.classes) w.str(c);

    w.vec(model.mask.scores);
    w.f64(model.mask.threshold);
    w.u32(static_cast<std::uint32_t>(model.mask.selected.size()));
    for (Eigen::Index i = 0; i < model.mask.selected.size(); ++i) {
        w.u8(model.mask.selected[i] ? 1 : 0);
    }

    w.vec(model.standardizer.mean);
    w.vec(model.standardizer.scale);

    if (model.kind == ModelKind::Lda) {
        w.mat(model.lda.means);
        w.mat(model.lda.covariance);
        w.vec(model.lda.priors);
    } else {
        w.mat(model.svm.weights);
        w.vec(model.svm.bias);
        w.vec(model.svm.calib_a);
        w.vec(model.svm.calib_b);
    }

    write_signal_spec(w, meta.signal);
    w.str(meta.device);
    w.str(meta.environment);
    w.f64(meta.jam_threshold_db);
    w.u64(meta.enroll_seed);

    const std::vector<std::uint8_t>& payload = w.bytes();
    Writer file;
    file.u8(kMagic[0]);
    file.u8(kMagic[1]);
    file.u8(kMagic[2]);
    file.u8(kMagic[3]);
    file.u16(kVersion);
    file.u64(payload.size());
    for (std::uint8_t b : payload) file.u8(b);
    file.u32(crc32(payload.data(), payload.size()));

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw ProfileError(ProfileFault::Io, "cannot open " + tmp + " for writing");
        }
        out.write(reinterpret_cast<const char*>(file.bytes().data()),
                  static_cast<std::streamsize>(file.bytes().size()));
        if (!out) throw ProfileError(ProfileFault::Io, "write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Profile load_profile(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ProfileError(ProfileFault::Io, "cannot open " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());

    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw ProfileError(ProfileFault::BadMagic, "not a profile file: " + path);
    }
    if (bytes.size() < 14) {
        throw ProfileError(ProfileFault::BadChecksum, "profile truncated: " + path);
    }
    std::uint16_t version;
    std::memcpy(&version, bytes.data() + 4, 2);
    if (version != kVersion) {
        throw ProfileError(ProfileFault::BadVersion,
                           "unsupported profile version " + std::to_string(version));
    }
    std::uint64_t payload_len;
    std::memcpy(&payload_len, bytes.data() + 6, 8);
    if (bytes.size() != 14 + payload_len + 4) {
        throw ProfileError(ProfileFault::BadChecksum, "profile truncated: " + path);
    }
    const std::uint8_t* payload = bytes.data() + 14;
    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, payload + payload_len, 4);
    if (crc32(payload, payload_len) != stored_crc) {
        throw ProfileError(ProfileFault::BadChecksum, "profile checksum mismatch: " + path);
    }

    Reader r(payload, payload_len);
    Profile p;
    const std::uint8_t kind = r.u8();
    if (kind > 1) throw ProfileError(ProfileFault::Malformed, "unknown model kind");
    p.model.kind = static_cast<ModelKind>(kind);
    p.model.confidence_threshold = r.f64();
    const std::uint32_t n_classes = r.u32();
    for (std::uint32_t i = 0; i < n_classes; ++i) p.model.classes.push_back(r.str());

    p.model.mask.scores = r.vec();
    p.model.mask.threshold = r.f64();
    const std::uint32_t mask_dim = r.u32();
    p.model.mask.selected.resize(mask_dim);
    for (std::uint32_t i = 0; i < mask_dim; ++i) p.model.mask.selected[i] = r.u8() != 0;

    p.model.standardizer.mean = r.vec();
    p.model.standardizer.scale = r.vec();

    if (p.model.kind == ModelKind::Lda) {
        p.model.lda.means = r.mat();
        p.model.lda.covariance = r.mat();
        p.model.lda.priors = r.vec();
        p.model.lda.finalize();
    } else {
        p.model.svm.weights = r.mat();
        p.model.svm.bias = r.vec();
        p.model.svm.calib_a = r.vec();
        p.model.svm.calib_b = r.vec();
    }

    p.meta.signal = read_signal_spec(r);
    p.meta.device = r.str();
    p.meta.environment = r.str();
    p.meta.jam_threshold_db = r.f64();
    p.meta.enroll_seed = r.u64();

    if (!r.exhausted()) {
        throw ProfileError(ProfileFault::Malformed, "trailing bytes in profile payload");
    }
    return p;
}

}  // namespace gripsense
