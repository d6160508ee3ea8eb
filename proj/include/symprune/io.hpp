// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symprune/errors.hpp"
#include "symprune/matrix.hpp"

namespace symprune {

using bytes = std::vector<std::uint8_t>;

namespace detail {

// Little-endian appender. Values are encoded byte by byte so the layout is
// independent of host endianness.
class byte_writer {
public:
    explicit byte_writer(bytes& out) : out_(out) {}

    void raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }
    void raw(std::span<const std::uint8_t> s) { out_.insert(out_.end(), s.begin(), s.end()); }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }

private:
    bytes& out_;
};

class byte_reader {
public:
    byte_reader(std::span<const std::uint8_t> in, std::string_view what) : in_(in), what_(what) {}

    void expect_magic(std::string_view magic) {
        need(magic.size());
        if (std::memcmp(in_.data() + pos_, magic.data(), magic.size()) != 0)
            throw format_error(std::string(what_) + ": bad magic");
        pos_ += magic.size();
    }
    std::uint8_t u8() {
        need(1);
        return in_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    std::span<const std::uint8_t> take(std::size_t n) {
        need(n);
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::size_t remaining() const noexcept { return in_.size() - pos_; }
    void expect_end() const {
        if (remaining() != 0) throw format_error(std::string(what_) + ": trailing bytes");
    }

private:
    void need(std::size_t n) const {
        if (in_.size() - pos_ < n) throw format_error(std::string(what_) + ": truncated payload");
    }

    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
    std::string_view what_;
};

} // namespace detail

inline bytes read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw format_error("cannot open " + path.string());
    return bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw format_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw format_error("short write to " + path.string());
}

// SYMW: "SYMW1\0", u8 dtype (1 = f32), u32 rows, u32 cols, rows*cols f32, all little-endian.
inline constexpr std::string_view symw_magic{"SYMW1\0", 6};
inline constexpr std::uint8_t symw_dtype_f32 = 1;

inline bytes encode_symw(const Matrix& m) {
    bytes out;
    out.reserve(6 + 1 + 8 + 4 * m.size());
    detail::byte_writer w(out);
    w.raw(symw_magic);
    w.u8(symw_dtype_f32);
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(m.cols()));
    for (double v : m.values()) w.f32(static_cast<float>(v));
    return out;
}

inline Matrix decode_symw(std::span<const std::uint8_t> data) {
    detail::byte_reader r(data, "SYMW");
    r.expect_magic(symw_magic);
    if (r.u8() != symw_dtype_f32) throw format_error("SYMW: unsupported dtype");
    const std::uint64_t rows = r.u32();
    const std::uint64_t cols = r.u32();
    if (r.remaining() != rows * cols * 4) throw format_error("SYMW: payload size does not match header");
    std::vector<double> values(rows * cols);
    for (auto& v : values) {
        v = r.f32();
        if (!std::isfinite(v)) throw format_error("SYMW: non-finite value");
    }
    return Matrix(rows, cols, std::move(values));
}

inline Matrix load_symw(const std::filesystem::path& path) { return decode_symw(read_file(path)); }
inline void save_symw(const std::filesystem::path& path, const Matrix& m) { write_file(path, encode_symw(m)); }

/// Rounds every entry to f32, i.e. what a SYMW round trip returns.
inline Matrix round_to_f32(const Matrix& m) {
    Matrix out = m;
    for (double& v : out.values()) v = static_cast<float>(v);
    return out;
}

} // namespace symprune
