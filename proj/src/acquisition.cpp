#include "eigenwave/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace eigenwave {

Acquisition::Acquisition(std::vector<Source> sources, std::vector<Receiver> receivers)
    : sources_(std::move(sources)), receivers_(std::move(receivers)) {
  for (const auto& s : sources_) {
    if (s.z != sources_.front().z) {
      throw std::invalid_argument("Acquisition: sources must share one depth");
    }
  }
  for (const auto& r : receivers_) {
    if (r.z != receivers_.front().z) {
      throw std::invalid_argument("Acquisition: receivers must share one depth");
    }
  }
}

Acquisition Acquisition::line(double source_depth, double source_x_first, double source_x_last, int source_count,
                              double receiver_depth, double receiver_x_first, double receiver_x_last,
                              int receiver_count, Complex amplitude) {
  if (source_count < 1 || receiver_count < 1) {
    throw std::invalid_argument("Acquisition::line: counts must be positive");
  }
  auto position = [](double first, double last, int count, int k) {
    return count == 1 ? first : first + (last - first) * k / (count - 1);
  };
  std::vector<Source> sources;
  for (int k = 0; k < source_count; ++k) {
    sources.push_back({position(source_x_first, source_x_last, source_count, k), source_depth, amplitude});
  }
  std::vector<Receiver> receivers;
  for (int k = 0; k < receiver_count; ++k) {
    receivers.push_back({position(receiver_x_first, receiver_x_last, receiver_count, k), receiver_depth});
  }
  return Acquisition(std::move(sources), std::move(receivers));
}

void Acquisition::check_inside(const Grid2D& grid) const {
  for (const auto& s : sources_) {
    if (!grid.contains(s.x, s.z)) {
      std::ostringstream os;
      os << "Acquisition: source at (" << s.x << ", " << s.z << ") lies outside the grid";
      throw std::out_of_range(os.str());
    }
  }
  for (const auto& r : receivers_) {
    if (!grid.contains(r.x, r.z)) {
      std::ostringstream os;
      os << "Acquisition: receiver at (" << r.x << ", " << r.z << ") lies outside the grid";
      throw std::out_of_range(os.str());
    }
  }
}

bool operator==(const Acquisition& a, const Acquisition& b) {
  auto same_source = [](const Source& s, const Source& t) {
    return s.x == t.x && s.z == t.z && s.amplitude == t.amplitude;
  };
  auto same_receiver = [](const Receiver& r, const Receiver& t) { return r.x == t.x && r.z == t.z; };
  return std::equal(a.sources_.begin(), a.sources_.end(), b.sources_.begin(), b.sources_.end(), same_source) &&
         std::equal(a.receivers_.begin(), a.receivers_.end(), b.receivers_.begin(), b.receivers_.end(),
                    same_receiver);
}

Eigen::VectorXcd point_source_rhs(const Grid2D& grid, double x, double z, Complex amplitude) {
  if (!grid.contains(x, z)) {
    std::ostringstream os;
    os << "point_source_rhs: position (" << x << ", " << z << ") lies outside the grid";
    throw std::out_of_range(os.str());
  }
  const int ix = std::clamp(static_cast<int>(std::lround((x - grid.x0()) / grid.hx())), 0, grid.nx() - 1);
  const int iz = std::clamp(static_cast<int>(std::lround((z - grid.z0()) / grid.hz())), 0, grid.nz() - 1);
  Eigen::VectorXcd f = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid.size()));
  f[static_cast<Eigen::Index>(grid.index(ix, iz))] = amplitude / (grid.hx() * grid.hz());
  return f;
}

ReceiverSampler::ReceiverSampler(const Grid2D& grid, const std::vector<Receiver>& receivers) : grid_(grid) {
  stencils_.reserve(receivers.size());
  for (const auto& r : receivers) {
    if (!grid.contains(r.x, r.z)) {
      std::ostringstream os;
      os << "ReceiverSampler: receiver at (" << r.x << ", " << r.z << ") lies outside the grid";
      throw std::out_of_range(os.str());
    }
    const double sx = std::clamp((r.x - grid.x0()) / grid.hx(), 0.0, static_cast<double>(grid.nx() - 1));
    const double sz = std::clamp((r.z - grid.z0()) / grid.hz(), 0.0, static_cast<double>(grid.nz() - 1));
    const int ix = std::min(static_cast<int>(std::floor(sx)), grid.nx() - 2);
    const int iz = std::min(static_cast<int>(std::floor(sz)), grid.nz() - 2);
    const double tx = sx - ix;
    const double tz = sz - iz;
    Stencil st;
    st.node = {grid.index(ix, iz), grid.index(ix + 1, iz), grid.index(ix, iz + 1), grid.index(ix + 1, iz + 1)};
    st.weight = {(1 - tx) * (1 - tz), tx * (1 - tz), (1 - tx) * tz, tx * tz};
    stencils_.push_back(st);
  }
}

Eigen::VectorXcd ReceiverSampler::sample(const Eigen::VectorXcd& nodal) const {
  if (static_cast<std::size_t>(nodal.size()) != grid_.size()) {
    throw std::invalid_argument("ReceiverSampler::sample: field length mismatch");
  }
  Eigen::VectorXcd out(static_cast<Eigen::Index>(stencils_.size()));
  for (std::size_t k = 0; k < stencils_.size(); ++k) {
    Complex v = 0.0;
    for (int c = 0; c < 4; ++c) {
      v += stencils_[k].weight[c] * nodal[static_cast<Eigen::Index>(stencils_[k].node[c])];
    }
    out[static_cast<Eigen::Index>(k)] = v;
  }
  return out;
}

Eigen::VectorXcd ReceiverSampler::spread(const Eigen::VectorXcd& receiver_values) const {
  if (static_cast<std::size_t>(receiver_values.size()) != stencils_.size()) {
    throw std::invalid_argument("ReceiverSampler::spread: receiver count mismatch");
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(grid_.size()));
  for (std::size_t k = 0; k < stencils_.size(); ++k) {
    for (int c = 0; c < 4; ++c) {
      out[static_cast<Eigen::Index>(stencils_[k].node[c])] +=
          stencils_[k].weight[c] * receiver_values[static_cast<Eigen::Index>(k)];
    }
  }
  return out;
}

Eigen::VectorXcd sample_receivers(const ComplexField& u, const Acquisition& acquisition) {
  return ReceiverSampler(u.grid(), acquisition.receivers()).sample(u.values());
}

} // namespace eigenwave
