#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "eigenwave/errors.hpp"
#include "eigenwave/io_detail.hpp"
#include "eigenwave/synthetics.hpp"

namespace eigenwave {

namespace {

std::string trace_file_name(std::size_t f) {
  char name[32];
  std::snprintf(name, sizeof name, "traces_f%04zu.bin", f + 1);
  return name;
}

std::string location(const std::filesystem::path& file, int line) {
  return file.filename().string() + " line " + std::to_string(line);
}

} // namespace

void write_dataset_archive(const std::filesystem::path& dir, const FrequencyDataset& data) {
  data.validate();
  std::filesystem::create_directories(dir);
  {
    std::ofstream acq(dir / "acquisition.txt", std::ios::trunc);
    acq << std::setprecision(17);
    acq << "sources " << data.acquisition.source_count() << '\n';
    for (const auto& s : data.acquisition.sources()) {
      acq << s.x << ' ' << s.z << ' ' << s.amplitude.real() << ' ' << s.amplitude.imag() << '\n';
    }
    acq << "receivers " << data.acquisition.receiver_count() << '\n';
    for (const auto& r : data.acquisition.receivers()) {
      acq << r.x << ' ' << r.z << '\n';
    }
    if (!acq) {
      throw std::runtime_error("write_dataset_archive: cannot write acquisition in " + dir.string());
    }
  }
  std::ofstream manifest(dir / "dataset_manifest.txt", std::ios::trunc);
  manifest << std::setprecision(17);
  manifest << "format eigenwave-dataset 1\n";
  manifest << "sources " << data.acquisition.source_count() << '\n';
  manifest << "receivers " << data.acquisition.receiver_count() << '\n';
  if (data.snr_db) {
    manifest << "snr_db " << *data.snr_db << '\n';
  }
  manifest << "frequencies " << data.frequencies.size() << '\n';
  for (std::size_t f = 0; f < data.frequencies.size(); ++f) {
    manifest << data.frequencies[f] << ' ' << trace_file_name(f) << '\n';
    std::ofstream bin(dir / trace_file_name(f), std::ios::binary | std::ios::trunc);
    const Eigen::MatrixXcd& block = data.traces[f];
    // Column-major complex storage is already source-major, receiver-fastest re/im pairs.
    detail::write_le_doubles(bin, {reinterpret_cast<const double*>(block.data()), 2 * static_cast<std::size_t>(block.size())});
    if (!bin) {
      throw std::runtime_error("write_dataset_archive: cannot write traces in " + dir.string());
    }
  }
  if (!manifest) {
    throw std::runtime_error("write_dataset_archive: cannot write manifest in " + dir.string());
  }
}

FrequencyDataset read_dataset_archive(const std::filesystem::path& dir) {
  const auto acq_path = dir / "acquisition.txt";
  std::ifstream acq(acq_path);
  if (!acq) {
    throw std::runtime_error("read_dataset_archive: cannot open " + acq_path.string());
  }
  std::string word;
  std::size_t count = 0;
  int line = 1;
  if (!(acq >> word >> count) || word != "sources") {
    throw FormatError(location(acq_path, line) + ": expected 'sources <count>'");
  }
  std::vector<Source> sources(count);
  for (auto& s : sources) {
    ++line;
    double re = 0.0;
    double im = 0.0;
    if (!(acq >> s.x >> s.z >> re >> im)) {
      throw FormatError(location(acq_path, line) + ": expected 'x z re im'");
    }
    s.amplitude = {re, im};
  }
  ++line;
  if (!(acq >> word >> count) || word != "receivers") {
    throw FormatError(location(acq_path, line) + ": expected 'receivers <count>'");
  }
  std::vector<Receiver> receivers(count);
  for (auto& r : receivers) {
    ++line;
    if (!(acq >> r.x >> r.z)) {
      throw FormatError(location(acq_path, line) + ": expected 'x z'");
    }
  }

  FrequencyDataset data;
  data.acquisition = Acquisition(std::move(sources), std::move(receivers));

  const auto manifest_path = dir / "dataset_manifest.txt";
  std::ifstream manifest(manifest_path);
  if (!manifest) {
    throw std::runtime_error("read_dataset_archive: cannot open " + manifest_path.string());
  }
  std::string text;
  line = 0;
  std::size_t n_freq = 0;
  bool reading_frequencies = false;
  std::vector<std::string> files;
  while (std::getline(manifest, text)) {
    ++line;
    if (text.empty()) {
      continue;
    }
    std::istringstream ls(text);
    if (reading_frequencies && files.size() < n_freq) {
      double f = 0.0;
      std::string file;
      if (!(ls >> f >> file)) {
        throw FormatError(location(manifest_path, line) + ": expected '<hz> <file>'");
      }
      data.frequencies.push_back(f);
      files.push_back(file);
      continue;
    }
    std::string key;
    ls >> key;
    if (key == "format") {
      continue;
    }
    if (key == "sources" || key == "receivers") {
      std::size_t v = 0;
      ls >> v;
      const std::size_t expected =
          key == "sources" ? data.acquisition.source_count() : data.acquisition.receiver_count();
      if (!ls || v != expected) {
        throw FormatError(location(manifest_path, line) + ": " + key + " count disagrees with acquisition.txt");
      }
    } else if (key == "snr_db") {
      double snr = 0.0;
      if (!(ls >> snr)) {
        throw FormatError(location(manifest_path, line) + ": malformed snr_db");
      }
      data.snr_db = snr;
    } else if (key == "frequencies") {
      if (!(ls >> n_freq)) {
        throw FormatError(location(manifest_path, line) + ": malformed frequency count");
      }
      reading_frequencies = true;
    } else {
      throw FormatError(location(manifest_path, line) + ": unknown key '" + key + "'");
    }
  }
  if (files.size() != n_freq) {
    throw FormatError(manifest_path.string() + ": fewer frequency entries than announced");
  }
  const auto nr = static_cast<Eigen::Index>(data.acquisition.receiver_count());
  const auto ns = static_cast<Eigen::Index>(data.acquisition.source_count());
  for (const auto& file : files) {
    const auto path = dir / file;
    std::ifstream bin(path, std::ios::binary | std::ios::ate);
    if (!bin) {
      throw std::runtime_error("read_dataset_archive: cannot open " + path.string());
    }
    const auto bytes = static_cast<std::uintmax_t>(bin.tellg());
    if (bytes != static_cast<std::uintmax_t>(nr * ns) * 16u) {
      throw FormatError(path.string() + ": size does not match receivers x sources");
    }
    bin.seekg(0);
    Eigen::MatrixXcd block(nr, ns);
    detail::read_le_doubles(bin, {reinterpret_cast<double*>(block.data()), 2 * static_cast<std::size_t>(block.size())});
    data.traces.push_back(std::move(block));
  }
  try {
    data.validate();
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("read_dataset_archive: ") + e.what());
  }
  return data;
}

} // namespace eigenwave
