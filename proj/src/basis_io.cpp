#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "eigenwave/basis.hpp"
#include "eigenwave/errors.hpp"
#include "eigenwave/field_io.hpp"

namespace eigenwave {

namespace {

std::filesystem::path psi_path(const std::filesystem::path& dir, int k) {
  char name[32];
  std::snprintf(name, sizeof name, "psi_%04d.ewf", k + 1);
  return dir / name;
}

} // namespace

void write_basis_archive(const std::filesystem::path& dir, const EigenBasis& basis) {
  std::filesystem::create_directories(dir);
  const Grid2D& g = basis.grid();
  std::ofstream out(dir / "manifest.txt", std::ios::trunc);
  if (!out) {
    throw std::runtime_error("write_basis_archive: cannot write manifest in " + dir.string());
  }
  out << std::setprecision(17);
  out << "format eigenwave-basis 1\n";
  out << "kind " << to_string(basis.spec.kind) << '\n';
  out << "beta " << basis.spec.beta << '\n';
  out << "count " << basis.size() << '\n';
  out << "grid " << g.nx() << ' ' << g.nz() << ' ' << g.hx() << ' ' << g.hz() << ' ' << g.x0() << ' ' << g.z0()
      << '\n';
  out << "source_model_hash " << basis.source_model_hash << '\n';
  out << "eigenvalues\n";
  for (double v : basis.eigenvalues) {
    out << v << '\n';
  }
  write_field(dir / "m0.ewf", basis.m0);
  for (int k = 0; k < basis.size(); ++k) {
    write_field(psi_path(dir, k), basis.psi(k));
  }
}

std::shared_ptr<const EigenBasis> read_basis_archive(const std::filesystem::path& dir) {
  std::ifstream in(dir / "manifest.txt");
  if (!in) {
    throw std::runtime_error("read_basis_archive: cannot open manifest in " + dir.string());
  }
  auto basis = std::make_shared<EigenBasis>();
  int count = -1;
  std::string line;
  std::vector<double> values;
  bool in_values = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::istringstream ls(line);
    if (in_values) {
      double v = 0.0;
      if (!(ls >> v)) {
        throw FormatError("basis manifest line " + std::to_string(line_no) + ": expected an eigenvalue");
      }
      values.push_back(v);
      continue;
    }
    std::string key;
    ls >> key;
    if (key == "format") {
      continue;
    } else if (key == "kind") {
      std::string kind;
      ls >> kind;
      basis->spec.kind = parse_eta_kind(kind);
    } else if (key == "beta") {
      ls >> basis->spec.beta;
    } else if (key == "count") {
      ls >> count;
    } else if (key == "grid" || key == "source_model_hash") {
      if (key == "source_model_hash") {
        ls >> basis->source_model_hash;
      }
    } else if (key == "eigenvalues") {
      in_values = true;
    } else {
      throw FormatError("basis manifest line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (!ls && !in_values) {
      throw FormatError("basis manifest line " + std::to_string(line_no) + ": malformed value");
    }
  }
  if (count < 0 || static_cast<std::size_t>(count) != values.size()) {
    throw FormatError("basis manifest: eigenvalue count does not match 'count'");
  }
  basis->m0 = read_field(dir / "m0.ewf");
  basis->eigenvalues = Eigen::Map<const Eigen::VectorXd>(values.data(), count);
  basis->eigenvectors.resize(static_cast<Eigen::Index>(basis->m0.grid().size()), count);
  for (int k = 0; k < count; ++k) {
    const ScalarField psi = read_field(psi_path(dir, k));
    require_same_grid(psi.grid(), basis->m0.grid(), "read_basis_archive");
    basis->eigenvectors.col(k) = psi.values();
  }
  return basis;
}

} // namespace eigenwave
