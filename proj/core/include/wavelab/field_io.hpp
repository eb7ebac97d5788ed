#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "wavelab/spectral.hpp"

namespace wavelab {

inline constexpr int kFieldFormatVersion = 1;

// JSON record {format, version, dim, N, rho, coeffs: [re, im, ...]} with
// coefficients in row-major wavenumber order.
std::string field_to_json(const SpectralField& field);
SpectralField field_from_json(std::string_view text);

// Little-endian binary record: "WLFD", u32 version, i32 dim, i32 N, i32 rho,
// u64 coefficient count, then interleaved re/im doubles.
void write_field_binary(std::ostream& out, const SpectralField& field);
SpectralField read_field_binary(std::istream& in);

// Format chosen by extension: ".json" is text, anything else binary.
void save_field(const std::filesystem::path& path, const SpectralField& field);
SpectralField load_field(const std::filesystem::path& path);

}  // namespace wavelab
