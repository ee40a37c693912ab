#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace dci::detail {

template <typename U>
U to_little(U v) noexcept {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        U out = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i) {
            out = static_cast<U>((out << 8) | ((v >> (8 * i)) & 0xff));
        }
        return out;
    }
}

template <typename U>
void write_le(std::ostream& out, U v) {
    v = to_little(v);
    std::array<char, sizeof(U)> buf;
    std::memcpy(buf.data(), &v, sizeof(U));
    out.write(buf.data(), buf.size());
}

/// Returns false on a clean EOF before the first byte; throws on a partial read.
template <typename U>
bool try_read_le(std::istream& in, U& v, const char* what) {
    std::array<char, sizeof(U)> buf;
    in.read(buf.data(), buf.size());
    const auto got = in.gcount();
    if (got == 0) return false;
    if (got != static_cast<std::streamsize>(buf.size())) {
        throw std::runtime_error(std::string("truncated ") + what);
    }
    std::memcpy(&v, buf.data(), sizeof(U));
    v = to_little(v);
    return true;
}

template <typename U>
U read_le(std::istream& in, const char* what) {
    U v{};
    if (!try_read_le(in, v, what)) throw std::runtime_error(std::string("truncated ") + what);
    return v;
}

inline void write_f64(std::ostream& out, double x) { write_le(out, std::bit_cast<std::uint64_t>(x)); }
inline double read_f64(std::istream& in, const char* what) {
    return std::bit_cast<double>(read_le<std::uint64_t>(in, what));
}
inline float read_f32(std::istream& in, const char* what) {
    return std::bit_cast<float>(read_le<std::uint32_t>(in, what));
}

}  // namespace dci::detail
