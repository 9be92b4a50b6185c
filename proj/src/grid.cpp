#include "eigenwave/grid.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "eigenwave/errors.hpp"

namespace eigenwave {

Grid2D::Grid2D(int nx, int nz, double hx, double hz, double x0, double z0)
    : nx_(nx), nz_(nz), hx_(hx), hz_(hz), x0_(x0), z0_(z0) {
  if (nx < 3 || nz < 3) {
    throw std::invalid_argument("Grid2D: need at least 3x3 nodes");
  }
  if (!(hx > 0.0) || !(hz > 0.0) || !std::isfinite(hx) || !std::isfinite(hz)) {
    throw std::invalid_argument("Grid2D: spacings must be positive and finite");
  }
  if (!std::isfinite(x0) || !std::isfinite(z0)) {
    throw std::invalid_argument("Grid2D: origin must be finite");
  }
}

bool Grid2D::contains(double x, double z) const {
  const double tx = 1e-9 * hx_;
  const double tz = 1e-9 * hz_;
  return x >= x0_ - tx && x <= x_max() + tx && z >= z0_ - tz && z <= z_max() + tz;
}

void require_same_grid(const Grid2D& a, const Grid2D& b, std::string_view what) {
  if (a == b) {
    return;
  }
  std::ostringstream os;
  os << what << ": grid mismatch (" << a.nx() << "x" << a.nz() << " vs " << b.nx() << "x" << b.nz() << ")";
  throw GridMismatch(os.str());
}

} // namespace eigenwave
