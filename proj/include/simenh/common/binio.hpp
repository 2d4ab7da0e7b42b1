#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "simenh/common/error.hpp"

// Little-endian binary primitives shared by the checkpoint and dataset
// containers. Round-trips are bitwise exact.

namespace simenh::binio {

static_assert(sizeof(double) == 8, "containers assume 64-bit IEEE doubles");

inline void write_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline void write_f64(std::ostream& os, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    write_u64(os, bits);
}

inline void write_string(std::ostream& os, const std::string& s) {
    write_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void write_f64_array(std::ostream& os, const double* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) write_f64(os, data[i]);
}

// Self-describing form: u64 length prefix, then the payload.
inline void write_f64_array(std::ostream& os, const std::vector<double>& v) {
    write_u64(os, v.size());
    write_f64_array(os, v.data(), v.size());
}

inline std::uint32_t read_u32(std::istream& is) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) throw IoError("unexpected end of binary stream");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline std::uint64_t read_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw IoError("unexpected end of binary stream");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline double read_f64(std::istream& is) {
    std::uint64_t bits = read_u64(is);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

inline std::string read_string(std::istream& is) {
    std::uint32_t n = read_u32(is);
    std::string s(n, '\0');
    if (n > 0 && !is.read(s.data(), n)) throw IoError("unexpected end of binary stream");
    return s;
}

inline void read_f64_array(std::istream& is, double* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) data[i] = read_f64(is);
}

inline std::vector<double> read_f64_array(std::istream& is) {
    const std::uint64_t n = read_u64(is);
    if (n > (1ull << 32)) throw IoError("implausible array length in binary stream");
    std::vector<double> v(static_cast<std::size_t>(n));
    read_f64_array(is, v.data(), v.size());
    return v;
}

inline void expect_magic(std::istream& is, const char* magic) {
    std::size_t n = std::strlen(magic);
    std::string got(n, '\0');
    if (!is.read(got.data(), static_cast<std::streamsize>(n)) || got != magic)
        throw IoError(std::string("bad container magic, expected '") + magic + "'");
}

// For fixed-width magics that are not null-terminated.
inline void expect_magic(std::istream& is, const char* magic, std::size_t n, const char* what) {
    std::string got(n, '\0');
    if (!is.read(got.data(), static_cast<std::streamsize>(n)) ||
        std::memcmp(got.data(), magic, n) != 0)
        throw IoError(std::string(what) + ": bad container magic");
}

}  // namespace simenh::binio
