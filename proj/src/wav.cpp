#include "gripsense/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace gripsense {

namespace {

void put_u32(std::vector<char>& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
    out.push_back(static_cast<char>((v >> 16) & 0xFF));
    out.push_back(static_cast<char>((v >> 24) & 0xFF));
}

void put_u16(std::vector<char>& out, std::uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

void write_wav(const std::string& path, const Eigen::VectorXd& samples,
               double sample_rate) {
    if (sample_rate <= 0.0) throw std::invalid_argument("write_wav: sample_rate must be positive");
    const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(sample_rate));
    const std::uint32_t n = static_cast<std::uint32_t>(samples.size());
    const std::uint32_t data_bytes = n * 2;

    std::vector<char> buf;
    buf.reserve(44 + data_bytes);
    buf.insert(buf.end(), {'R', 'I', 'F', 'F'});
    put_u32(buf, 36 + data_bytes);
    buf.insert(buf.end(), {'W', 'A', 'V', 'E'});
    buf.insert(buf.end(), {'f', 'm', 't', ' '});
    put_u32(buf, 16);
    put_u16(buf, 1);   // PCM
    put_u16(buf, 1);   // mono
    put_u32(buf, rate);
    put_u32(buf, rate * 2);  // byte rate
    put_u16(buf, 2);   // block align
    put_u16(buf, 16);  // bits per sample
    buf.insert(buf.end(), {'d', 'a', 't', 'a'});
    put_u32(buf, data_bytes);

    for (Eigen::Index i = 0; i < samples.size(); ++i) {
        double x = std::clamp(samples[i], -1.0, 1.0);
        long s = std::lround(x * 32767.0);
        s = std::clamp(s, -32768L, 32767L);
        put_u16(buf, static_cast<std::uint16_t>(static_cast<std::int16_t>(s)));
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("write_wav: cannot open " + path);
    f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!f) throw std::runtime_error("write_wav: write failed for " + path);
}

Waveform read_wav(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_wav: cannot open " + path);
    std::vector<unsigned char> buf((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
    if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
        std::memcmp(buf.data() + 8, "WAVE", 4) != 0) {
        throw std::runtime_error("read_wav: not a RIFF/WAVE file: " + path);
    }

    // Walk chunks; require a PCM16 mono fmt chunk before data.
    std::size_t pos = 12;
    bool have_fmt = false;
    double rate = 0.0;
    Waveform out;
    while (pos + 8 <= buf.size()) {
        const unsigned char* hdr = buf.data() + pos;
        std::uint32_t chunk_size = get_u32(hdr + 4);
        std::size_t body = pos + 8;
        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (body + 16 > buf.size()) throw std::runtime_error("read_wav: truncated fmt chunk");
            std::uint16_t format = get_u16(buf.data() + body);
            std::uint16_t channels = get_u16(buf.data() + body + 2);
            rate = get_u32(buf.data() + body + 4);
            std::uint16_t bits = get_u16(buf.data() + body + 14);
            if (format != 1 || channels != 1 || bits != 16) {
                throw std::runtime_error("read_wav: only 16-bit PCM mono is supported: " + path);
            }
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            if (!have_fmt) throw std::runtime_error("read_wav: data chunk before fmt chunk");
            if (body + chunk_size > buf.size()) throw std::runtime_error("read_wav: truncated data chunk");
            const std::size_t n = chunk_size / 2;
            out.samples.resize(static_cast<Eigen::Index>(n));
            for (std::size_t i = 0; i < n; ++i) {
                std::int16_t s = static_cast<std::int16_t>(get_u16(buf.data() + body + 2 * i));
                out.samples[static_cast<Eigen::Index>(i)] = s / 32767.0;
            }
            out.sample_rate = rate;
            return out;
        }
        pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
    }
    throw std::runtime_error("read_wav: no data chunk in " + path);
}

}  // namespace gripsense
