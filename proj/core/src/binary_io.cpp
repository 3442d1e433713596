#include "binary_io.hpp"

#include <array>
#include <bit>

#include "attnpca/error.hpp"

namespace attnpca::detail {

namespace {

template <std::size_t Bytes>
void put_le(std::ostream& out, std::uint64_t v) {
    std::array<char, Bytes> buf{};
    for (std::size_t i = 0; i < Bytes; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xFFu);
    out.write(buf.data(), Bytes);
}

template <std::size_t Bytes>
std::uint64_t get_le(std::istream& in) {
    std::array<unsigned char, Bytes> buf{};
    in.read(reinterpret_cast<char*>(buf.data()), Bytes);
    if (!in) throw DataError("unexpected end of binary stream");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < Bytes; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
    return v;
}

} // namespace

void write_u32(std::ostream& out, std::uint32_t v) { put_le<4>(out, v); }
void write_u64(std::ostream& out, std::uint64_t v) { put_le<8>(out, v); }
void write_f64(std::ostream& out, double v) { put_le<8>(out, std::bit_cast<std::uint64_t>(v)); }

void write_f64s(std::ostream& out, std::span<const double> values) {
    for (double v : values) write_f64(out, v);
}

std::uint32_t read_u32(std::istream& in) { return static_cast<std::uint32_t>(get_le<4>(in)); }
std::uint64_t read_u64(std::istream& in) { return get_le<8>(in); }
double read_f64(std::istream& in) { return std::bit_cast<double>(get_le<8>(in)); }

std::vector<double> read_f64s(std::istream& in, std::size_t count) {
    std::vector<double> values(count);
    for (auto& v : values) v = read_f64(in);
    return values;
}

} // namespace attnpca::detail
