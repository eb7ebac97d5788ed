#include "wavelab/field_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "wavelab/error.hpp"

namespace wavelab {

namespace {

static_assert(std::endian::native == std::endian::little, "binary field format assumes little-endian hosts");

constexpr std::array<char, 4> kMagic{'W', 'L', 'F', 'D'};

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw FormatError("binary field: truncated record");
  return value;
}

}  // namespace

std::string field_to_json(const SpectralField& field) {
  const TorusGrid& g = field.grid();
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : field.coefficients()) {
    coeffs.push_back(c.real());
    coeffs.push_back(c.imag());
  }
  nlohmann::json j = {{"format", "wavelab-field"},
                      {"version", kFieldFormatVersion},
                      {"dim", g.dim()},
                      {"N", g.modes_per_axis()},
                      {"rho", g.oversample_factor()},
                      {"coeffs", std::move(coeffs)}};
  return j.dump();
}

SpectralField field_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "wavelab-field") throw FormatError("field JSON: missing format tag");
    if (j.value("version", -1) != kFieldFormatVersion) throw FormatError("field JSON: unsupported version");
    TorusGrid grid(j.at("dim").get<int>(), j.at("N").get<int>(), j.at("rho").get<int>());
    const auto& flat = j.at("coeffs");
    if (flat.size() != 2 * grid.mode_count()) throw FormatError("field JSON: coefficient count mismatch");
    std::vector<Complex> coeffs(grid.mode_count());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      coeffs[i] = Complex(flat[2 * i].get<double>(), flat[2 * i + 1].get<double>());
    }
    return SpectralField::from_coefficients(std::move(grid), std::move(coeffs));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("field JSON: ") + e.what());
  }
}

void write_field_binary(std::ostream& out, const SpectralField& field) {
  const TorusGrid& g = field.grid();
  out.write(kMagic.data(), kMagic.size());
  put<std::uint32_t>(out, kFieldFormatVersion);
  put<std::int32_t>(out, g.dim());
  put<std::int32_t>(out, g.modes_per_axis());
  put<std::int32_t>(out, g.oversample_factor());
  put<std::uint64_t>(out, field.coefficients().size());
  for (const auto& c : field.coefficients()) {
    put<double>(out, c.real());
    put<double>(out, c.imag());
  }
  if (!out) throw FormatError("binary field: write failed");
}

SpectralField read_field_binary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw FormatError("binary field: bad magic");
  if (get<std::uint32_t>(in) != kFieldFormatVersion) throw FormatError("binary field: unsupported version");
  const int dim = get<std::int32_t>(in);
  const int modes = get<std::int32_t>(in);
  const int rho = get<std::int32_t>(in);
  TorusGrid grid(dim, modes, rho);
  const auto count = get<std::uint64_t>(in);
  if (count != grid.mode_count()) throw FormatError("binary field: coefficient count mismatch");
  std::vector<Complex> coeffs(count);
  for (auto& c : coeffs) {
    const double re = get<double>(in);
    const double im = get<double>(in);
    c = Complex(re, im);
  }
  return SpectralField::from_coefficients(std::move(grid), std::move(coeffs));
}

void save_field(const std::filesystem::path& path, const SpectralField& field) {
  if (path.extension() == ".json") {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open " + path.string());
    out << field_to_json(field) << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string());
  write_field_binary(out, field);
}

SpectralField load_field(const std::filesystem::path& path) {
  if (path.extension() == ".json") {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return field_from_json(buffer.str());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_field_binary(in);
}

}  // namespace wavelab
