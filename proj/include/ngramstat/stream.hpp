#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace ngramstat {

enum class SymbolMode { bytes, codepoints };

// Single-consumer pull iterator over 32-bit symbols. rewind() restarts the
// stream from the beginning; for a fixed source the replay is identical.
class SymbolStream {
public:
    virtual ~SymbolStream() = default;
    virtual std::optional<uint32_t> next() = 0;
    virtual void rewind() = 0;
};

class MemoryStream final : public SymbolStream {
public:
    explicit MemoryStream(std::vector<uint32_t> symbols) : data_(std::move(symbols)) {}

    std::optional<uint32_t> next() override {
        if (pos_ >= data_.size()) return std::nullopt;
        return data_[pos_++];
    }
    void rewind() override { pos_ = 0; }

private:
    std::vector<uint32_t> data_;
    std::size_t pos_ = 0;
};

class FileByteStream final : public SymbolStream {
public:
    explicit FileByteStream(std::string path)
        : path_(std::move(path)), in_(path_, std::ios::binary) {
        if (!in_) throw std::runtime_error("cannot open input file: " + path_);
        buf_.resize(64 * 1024);
    }

    std::optional<uint32_t> next() override {
        if (pos_ == len_ && !refill()) return std::nullopt;
        return static_cast<unsigned char>(buf_[pos_++]);
    }

    void rewind() override {
        in_.clear();
        in_.seekg(0);
        pos_ = len_ = 0;
    }

private:
    bool refill() {
        in_.read(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        len_ = static_cast<std::size_t>(in_.gcount());
        pos_ = 0;
        return len_ > 0;
    }

    std::string path_;
    std::ifstream in_;
    std::vector<char> buf_;
    std::size_t pos_ = 0;
    std::size_t len_ = 0;
};

// Strict UTF-8 decoder over a byte stream: rejects overlong forms, surrogates
// and values past U+10FFFF, reporting the byte offset of the offending lead.
class Utf8Stream final : public SymbolStream {
public:
    explicit Utf8Stream(std::unique_ptr<SymbolStream> bytes) : bytes_(std::move(bytes)) {}

    std::optional<uint32_t> next() override {
        auto lead = bytes_->next();
        if (!lead) return std::nullopt;
        const uint64_t start = offset_;
        ++offset_;
        const uint32_t b0 = *lead;
        if (b0 < 0x80) return b0;

        int extra;
        uint32_t cp, min_cp;
        if ((b0 & 0xE0) == 0xC0) {
            extra = 1; cp = b0 & 0x1F; min_cp = 0x80;
        } else if ((b0 & 0xF0) == 0xE0) {
            extra = 2; cp = b0 & 0x0F; min_cp = 0x800;
        } else if ((b0 & 0xF8) == 0xF0) {
            extra = 3; cp = b0 & 0x07; min_cp = 0x10000;
        } else {
            throw decode_error("invalid lead byte", start);
        }
        for (int i = 0; i < extra; ++i) {
            auto b = bytes_->next();
            if (!b) throw decode_error("truncated multi-byte sequence", start);
            ++offset_;
            if ((*b & 0xC0) != 0x80)
                throw decode_error("invalid continuation byte", start);
            cp = (cp << 6) | (*b & 0x3F);
        }
        if (cp < min_cp) throw decode_error("overlong encoding", start);
        if (cp >= 0xD800 && cp <= 0xDFFF) throw decode_error("encoded surrogate", start);
        if (cp > 0x10FFFF) throw decode_error("code point out of range", start);
        return cp;
    }

    void rewind() override {
        bytes_->rewind();
        offset_ = 0;
    }

private:
    std::unique_ptr<SymbolStream> bytes_;
    uint64_t offset_ = 0;
};

struct ZipfConfig {
    double skew = 1.0;       // s
    uint32_t alphabet = 1000;
    uint64_t length = 0;     // N
    uint64_t seed = 0;

    void validate() const {
        if (!(skew > 0.0)) throw usage_error("zipf skew must be > 0");
        if (alphabet < 1) throw usage_error("zipf alphabet must be >= 1");
    }
};

// i.i.d. draws with P(symbol k) proportional to (k+1)^-s, via inverse CDF on
// a precomputed cumulative table.
class ZipfStream final : public SymbolStream {
public:
    explicit ZipfStream(const ZipfConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
        cfg_.validate();
        cdf_.resize(cfg_.alphabet);
        double acc = 0.0;
        for (uint32_t k = 0; k < cfg_.alphabet; ++k) {
            acc += std::pow(static_cast<double>(k + 1), -cfg_.skew);
            cdf_[k] = acc;
        }
        for (double& c : cdf_) c /= acc;
        cdf_.back() = 1.0;
    }

    std::optional<uint32_t> next() override {
        if (emitted_ >= cfg_.length) return std::nullopt;
        ++emitted_;
        const double u = rng_.next_unit();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return static_cast<uint32_t>(it - cdf_.begin());
    }

    void rewind() override {
        rng_ = RandomSource(cfg_.seed);
        emitted_ = 0;
    }

private:
    ZipfConfig cfg_;
    RandomSource rng_;
    std::vector<double> cdf_;
    uint64_t emitted_ = 0;
};

inline std::unique_ptr<SymbolStream> open_stream(const std::string& path, SymbolMode mode) {
    auto bytes = std::make_unique<FileByteStream>(path);
    if (mode == SymbolMode::bytes) return bytes;
    return std::make_unique<Utf8Stream>(std::move(bytes));
}

inline std::vector<uint32_t> read_all(SymbolStream& stream) {
    std::vector<uint32_t> out;
    while (auto s = stream.next()) out.push_back(*s);
    return out;
}

}  // namespace ngramstat
