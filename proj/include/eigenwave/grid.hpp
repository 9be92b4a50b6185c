#pragma once

#include <cstddef>
#include <string_view>
#include <utility>

namespace eigenwave {

/// Structured 2D Cartesian grid. Nodes are flattened x-fastest:
/// node (ix, iz) lives at iz * nx + ix. z grows downward and the row
/// iz = 0 is the free surface.
class Grid2D {
public:
  Grid2D() = default;
  Grid2D(int nx, int nz, double hx, double hz, double x0 = 0.0, double z0 = 0.0);

  int nx() const { return nx_; }
  int nz() const { return nz_; }
  double hx() const { return hx_; }
  double hz() const { return hz_; }
  double x0() const { return x0_; }
  double z0() const { return z0_; }

  std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(nz_); }
  std::size_t interior_size() const {
    return static_cast<std::size_t>(nx_ - 2) * static_cast<std::size_t>(nz_ - 2);
  }

  std::size_t index(int ix, int iz) const {
    return static_cast<std::size_t>(iz) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(ix);
  }
  std::pair<int, int> unflatten(std::size_t idx) const {
    return {static_cast<int>(idx % static_cast<std::size_t>(nx_)),
            static_cast<int>(idx / static_cast<std::size_t>(nx_))};
  }

  double x(int ix) const { return x0_ + ix * hx_; }
  double z(int iz) const { return z0_ + iz * hz_; }
  double x_max() const { return x(nx_ - 1); }
  double z_max() const { return z(nz_ - 1); }

  bool on_boundary(int ix, int iz) const {
    return ix == 0 || iz == 0 || ix == nx_ - 1 || iz == nz_ - 1;
  }
  /// Inclusive bounding-box test with a small relative tolerance.
  bool contains(double x, double z) const;

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

private:
  int nx_ = 0;
  int nz_ = 0;
  double hx_ = 0.0;
  double hz_ = 0.0;
  double x0_ = 0.0;
  double z0_ = 0.0;
};

/// Throws GridMismatch naming `what` when the grids differ.
void require_same_grid(const Grid2D& a, const Grid2D& b, std::string_view what);

} // namespace eigenwave
