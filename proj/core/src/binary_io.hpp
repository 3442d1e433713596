#pragma once

// Little-endian primitive readers/writers shared by the binary file formats.

#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

namespace attnpca::detail {

void write_u32(std::ostream& out, std::uint32_t v);
void write_u64(std::ostream& out, std::uint64_t v);
void write_f64(std::ostream& out, double v);
void write_f64s(std::ostream& out, std::span<const double> values);

std::uint32_t read_u32(std::istream& in);
std::uint64_t read_u64(std::istream& in);
double read_f64(std::istream& in);
std::vector<double> read_f64s(std::istream& in, std::size_t count);

} // namespace attnpca::detail
