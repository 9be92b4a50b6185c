#include "eigenwave/field_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "eigenwave/errors.hpp"
#include "eigenwave/io_detail.hpp"

namespace eigenwave {

namespace {

constexpr std::string_view kMagic = "EWF1";

} // namespace

void write_field(const std::filesystem::path& path, const ScalarField& field) {
  if (!field.values().allFinite()) {
    throw std::invalid_argument("write_field: non-finite value");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("write_field: cannot open " + path.string());
  }
  const Grid2D& g = field.grid();
  std::ostringstream header;
  header << std::setprecision(17) << kMagic << ' ' << g.nx() << ' ' << g.nz() << ' ' << g.hx() << ' ' << g.hz()
         << ' ' << g.x0() << ' ' << g.z0() << '\n';
  out << header.str();
  detail::write_le_doubles(out, {field.values().data(), static_cast<std::size_t>(field.values().size())});
  if (!out) {
    throw std::runtime_error("write_field: write failed for " + path.string());
  }
}

ScalarField read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("read_field: cannot open " + path.string());
  }
  std::string header;
  if (!std::getline(in, header)) {
    throw FormatError("read_field: missing header in " + path.string());
  }
  std::istringstream hs(header);
  std::string magic;
  long long nx = 0;
  long long nz = 0;
  double hx = 0.0;
  double hz = 0.0;
  double x0 = 0.0;
  double z0 = 0.0;
  hs >> magic >> nx >> nz >> hx >> hz >> x0 >> z0;
  std::string trailing;
  if (!hs || magic != kMagic || (hs >> trailing)) {
    throw FormatError("read_field: malformed header '" + header + "' in " + path.string());
  }
  if (nx < 3 || nz < 3 || nx > std::numeric_limits<int>::max() || nz > std::numeric_limits<int>::max()) {
    throw FormatError("read_field: invalid grid dimensions in " + path.string());
  }
  Grid2D grid;
  try {
    grid = Grid2D(static_cast<int>(nx), static_cast<int>(nz), hx, hz, x0, z0);
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("read_field: ") + e.what());
  }

  const auto payload_start = in.tellg();
  in.seekg(0, std::ios::end);
  const auto payload_bytes = static_cast<std::uintmax_t>(in.tellg() - payload_start);
  in.seekg(payload_start);
  const std::uintmax_t expected = grid.size() * sizeof(double);
  if (payload_bytes != expected) {
    std::ostringstream os;
    os << "read_field: size mismatch in " << path.string() << ": header announces " << grid.size()
       << " values, payload holds " << payload_bytes << " bytes";
    throw FormatError(os.str());
  }
  Eigen::VectorXd values(static_cast<Eigen::Index>(grid.size()));
  detail::read_le_doubles(in, {values.data(), grid.size()});
  if (!in) {
    throw FormatError("read_field: truncated payload in " + path.string());
  }
  if (!values.allFinite()) {
    throw FormatError("read_field: non-finite value in " + path.string());
  }
  return ScalarField(grid, std::move(values));
}

void write_field_csv(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("write_field_csv: cannot open " + path.string());
  }
  const Grid2D& g = field.grid();
  out << "x,z,value\n" << std::setprecision(17);
  for (int iz = 0; iz < g.nz(); ++iz) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      out << g.x(ix) << ',' << g.z(iz) << ',' << field(ix, iz) << '\n';
    }
  }
}

void write_field_pgm(const std::filesystem::path& path, const ScalarField& field) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw std::runtime_error("write_field_pgm: cannot open " + path.string());
  }
  const Grid2D& g = field.grid();
  const double lo = field.min();
  const double span = field.max() - lo;
  out << "P5\n" << g.nx() << ' ' << g.nz() << "\n255\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(g.nx()));
  for (int iz = 0; iz < g.nz(); ++iz) {
    for (int ix = 0; ix < g.nx(); ++ix) {
      const double t = span > 0.0 ? (field(ix, iz) - lo) / span : 0.0;
      row[static_cast<std::size_t>(ix)] = static_cast<unsigned char>(std::clamp(std::lround(255.0 * t), 0L, 255L));
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

} // namespace eigenwave
