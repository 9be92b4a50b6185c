#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <unistd.h>

#include <CLI11.hpp>

#include "eigenwave/basis.hpp"
#include "eigenwave/errors.hpp"
#include "eigenwave/field_io.hpp"
#include "eigenwave/inversion.hpp"
#include "eigenwave/synthetics.hpp"

namespace eigenwave::cli {

namespace fs = std::filesystem;

namespace {

const std::vector<double> kDefaultBetas{1e-7, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 5e-2, 1e-1, 5e-1,
                                        1.0,  5.0,  10.0, 1e2,  1e3,  1e4,  1e5,  1e6};

/// Artifacts go to a hidden sibling directory first and are moved into the
/// output directory only once the command has finished.
class OutputStage {
public:
  explicit OutputStage(fs::path target) : target_(std::move(target)) {
    staging_ = target_.parent_path() / ("." + target_.filename().string() + ".partial-" + std::to_string(::getpid()));
    fs::remove_all(staging_);
    fs::create_directories(staging_);
  }
  OutputStage(const OutputStage&) = delete;
  OutputStage& operator=(const OutputStage&) = delete;
  ~OutputStage() {
    if (!committed_) {
      std::error_code ec;
      fs::remove_all(staging_, ec);
    }
  }

  fs::path operator/(const std::string& name) const { return staging_ / name; }

  void commit() {
    fs::create_directories(target_);
    for (const auto& entry : fs::directory_iterator(staging_)) {
      const fs::path dest = target_ / entry.path().filename();
      fs::remove_all(dest);
      fs::rename(entry.path(), dest);
    }
    fs::remove_all(staging_);
    committed_ = true;
  }

private:
  fs::path target_;
  fs::path staging_;
  bool committed_ = false;
};

SpeedBounds read_bounds(const ConfigFile& cfg) {
  SpeedBounds b;
  b.c_min = cfg.real_or("model", "c_min", b.c_min);
  b.c_max = cfg.real_or("model", "c_max", b.c_max);
  if (!(b.c_min > 0.0 && b.c_max > b.c_min)) {
    throw ConfigError("[model] c_min and c_max must satisfy 0 < c_min < c_max");
  }
  return b;
}

Model read_speed_model(const ConfigFile& cfg, const std::string& key) {
  return speed_to_slowness(read_field(cfg.path("model", key)), read_bounds(cfg));
}

/// Field that decompose and dump-basis work on: squared slowness by default.
ScalarField decomposition_field(const ConfigFile& cfg) {
  const std::string quantity = cfg.has("model", "quantity") ? cfg.text("model", "quantity") : "slowness";
  const ScalarField speed = read_field(cfg.path("model", "speed"));
  if (quantity == "speed") {
    return speed;
  }
  if (quantity == "slowness") {
    return speed_to_slowness(speed, read_bounds(cfg)).field();
  }
  throw ConfigError("[model] quantity must be 'slowness' or 'speed', got '" + quantity + "'");
}

Grid2D read_grid(const ConfigFile& cfg) {
  return Grid2D(cfg.integer("grid", "nx"), cfg.integer("grid", "nz"), cfg.real("grid", "hx"), cfg.real("grid", "hz"),
                cfg.real_or("grid", "x0", 0.0), cfg.real_or("grid", "z0", 0.0));
}

Acquisition read_acquisition(const ConfigFile& cfg) {
  return Acquisition::line(cfg.real("acquisition", "source_depth"), cfg.real("acquisition", "source_x_first"),
                           cfg.real("acquisition", "source_x_last"), cfg.integer("acquisition", "source_count"),
                           cfg.real("acquisition", "receiver_depth"), cfg.real("acquisition", "receiver_x_first"),
                           cfg.real("acquisition", "receiver_x_last"), cfg.integer("acquisition", "receiver_count"));
}

DiffusionSpec read_spec(const ConfigFile& cfg) {
  DiffusionSpec spec;
  spec.kind = parse_eta_kind(cfg.text("spec", "eta"));
  spec.beta = spec.uses_beta() ? cfg.real("spec", "beta") : cfg.real_or("spec", "beta", 1.0);
  spec.validate();
  return spec;
}

LanczosOptions read_eigensolver(const ConfigFile& cfg) {
  LanczosOptions o;
  o.block_size = cfg.integer_or("eigensolver", "block_size", o.block_size);
  o.max_restarts = cfg.integer_or("eigensolver", "max_restarts", o.max_restarts);
  o.tolerance = cfg.real_or("eigensolver", "tolerance", o.tolerance);
  return o;
}

bool images(const ConfigFile& cfg) { return cfg.flag_or("output", "images", true); }

void write_model_files(const OutputStage& stage, const std::string& stem, const ScalarField& field, bool with_images) {
  write_field(stage / (stem + ".ewf"), field);
  if (with_images) {
    write_field_csv(stage / (stem + ".csv"), field);
    write_field_pgm(stage / (stem + ".pgm"), field);
  }
}

std::string format_beta(const DiffusionSpec& spec) {
  if (!spec.uses_beta()) {
    return "-";
  }
  std::ostringstream os;
  os << std::setprecision(6) << spec.beta;
  return os.str();
}

} // namespace

void cmd_synth(const ConfigFile& cfg, const RunOptions& opts, std::ostream& out) {
  const Grid2D grid = read_grid(cfg);
  SpeedBounds bounds{1000.0, 6000.0};
  if (cfg.has("model", "c_min") || cfg.has("model", "c_max")) {
    bounds = read_bounds(cfg);
  }
  const double width = grid.x_max() - grid.x0();
  const double depth = grid.z_max() - grid.z0();
  const std::string layout = cfg.text("synth", "layout");
  SaltModelSpec spec;
  if (layout == "three_dome") {
    spec = three_dome_salt(width, depth);
  } else if (layout == "domes" || layout == "linear") {
    spec.width = width;
    spec.depth = depth;
  } else {
    throw ConfigError("[synth] layout must be three_dome, domes or linear, got '" + layout + "'");
  }
  spec.bounds = bounds;
  spec.c_top = cfg.real_or("synth", "c_top", spec.c_top);
  spec.c_bottom = cfg.real_or("synth", "c_bottom", spec.c_bottom);
  if (layout == "domes") {
    const std::vector<double> v = cfg.reals("synth", "dome");
    if (v.empty() || v.size() % 5 != 0) {
      throw ConfigError("[synth] dome takes groups of five numbers: cx cz rx rz speed");
    }
    spec.domes.clear();
    for (std::size_t k = 0; k < v.size(); k += 5) {
      spec.domes.push_back({grid.x0() + v[k], grid.z0() + v[k + 1], v[k + 2], v[k + 3], v[k + 4]});
    }
  }
  Model truth = make_salt_model(spec, grid);
  const Acquisition acq = read_acquisition(cfg);
  const std::vector<double> freqs = cfg.reals("data", "frequencies");
  const double noise_percent = cfg.real_or("synth", "model_noise_percent", 0.0);
  std::optional<double> snr;
  if (cfg.has("synth", "snr_db")) {
    snr = cfg.real("synth", "snr_db");
  }
  std::optional<Model> start;
  if (cfg.has("synth", "start_c_top") || cfg.has("synth", "start_c_bottom")) {
    start = make_linear_profile(grid, cfg.real("synth", "start_c_top"), cfg.real("synth", "start_c_bottom"), bounds);
  }
  acq.check_inside(grid);

  OutputStage stage(cfg.path("output", "dir"));
  write_model_files(stage, "true_model", truth.speed(), images(cfg));
  if (noise_percent > 0.0) {
    write_model_files(stage, "noisy_model", add_model_noise(truth, noise_percent, opts.seed).speed(), images(cfg));
  }
  if (start) {
    write_model_files(stage, "start_model", start->speed(), images(cfg));
  }
  FrequencyDataset data = generate_data(truth, acq, freqs, opts.threads);
  if (snr) {
    data = add_data_noise(data, *snr, opts.seed + 1);
  }
  write_dataset_archive(stage / "dataset", data);
  stage.commit();
  out << "synth: " << grid.nx() << "x" << grid.nz() << " model, " << acq.source_count() << " sources, "
      << acq.receiver_count() << " receivers, " << freqs.size() << " frequencies\n";
}

void cmd_decompose(const ConfigFile& cfg, const RunOptions& /*opts*/, std::ostream& out) {
  const ScalarField field = decomposition_field(cfg);
  std::vector<EtaKind> kinds;
  if (cfg.has("spec", "etas")) {
    for (const auto& w : cfg.words("spec", "etas")) {
      kinds.push_back(parse_eta_kind(w));
    }
  } else {
    kinds.push_back(parse_eta_kind(cfg.text("spec", "eta")));
  }
  const std::vector<double> betas = cfg.has("spec", "betas") ? cfg.reals("spec", "betas") : kDefaultBetas;
  std::vector<int> ns = cfg.integers("schedule", "n");
  if (ns.empty() || *std::min_element(ns.begin(), ns.end()) < 1) {
    throw ConfigError("[schedule] n must list positive basis sizes");
  }
  const int n_max = *std::max_element(ns.begin(), ns.end());
  if (static_cast<std::size_t>(n_max) > field.grid().interior_size()) {
    throw ConfigError("[schedule] n exceeds the number of interior nodes");
  }
  const LanczosOptions lanczos = read_eigensolver(cfg);

  struct Best {
    double error = std::numeric_limits<double>::infinity();
    DiffusionSpec spec;
    std::optional<ScalarField> model;
  };
  std::map<std::pair<int, int>, Best> best;
  std::ostringstream csv;
  csv << std::setprecision(17) << "eta,beta,N,relative_error,status\n";
  for (EtaKind kind : kinds) {
    std::vector<double> sweep = betas;
    if (!DiffusionSpec{kind, 1.0}.uses_beta()) {
      sweep = {1.0};
    }
    for (double beta : sweep) {
      const DiffusionSpec spec{kind, beta};
      std::shared_ptr<const EigenBasis> basis;
      std::string failure;
      try {
        basis = build_basis(field, spec, n_max, lanczos);
      } catch (const NumericalError& e) {
        failure = e.what();
      }
      for (int n : ns) {
        csv << to_string(kind) << ',' << format_beta(spec) << ',' << n << ',';
        if (!basis) {
          csv << ",failed\n";
          continue;
        }
        ScalarField rec = reconstruct(project(field, basis, n));
        const double err = relative_error(field, rec);
        csv << err << ",ok\n";
        Best& b = best[{static_cast<int>(kind), n}];
        if (err < b.error) {
          b = {err, spec, std::move(rec)};
        }
      }
      if (!failure.empty()) {
        out << "warning: " << to_string(kind) << " beta " << format_beta(spec) << " skipped: " << failure << '\n';
      }
    }
  }

  OutputStage stage(cfg.path("output", "dir"));
  {
    std::ofstream f(stage / "decompose.csv");
    f << csv.str();
    if (!f) {
      throw std::runtime_error("decompose: cannot write decompose.csv");
    }
  }
  std::ostringstream table;
  table << std::left << std::setw(6) << "eta" << std::setw(8) << "N" << std::setw(16) << "min error %"
        << "beta\n";
  bool complete = true;
  for (EtaKind kind : kinds) {
    for (int n : ns) {
      const auto it = best.find({static_cast<int>(kind), n});
      table << std::setw(6) << to_string(kind) << std::setw(8) << n;
      if (it == best.end() || !it->second.model) {
        table << std::setw(16) << "failed" << "-\n";
        complete = false;
        continue;
      }
      std::ostringstream err;
      err << std::setprecision(6) << it->second.error;
      table << std::setw(16) << err.str() << format_beta(it->second.spec) << '\n';
      write_model_files(stage, "recon_" + to_string(kind) + "_N" + std::to_string(n), *it->second.model, images(cfg));
    }
  }
  {
    std::ofstream f(stage / "decompose_table.txt");
    f << table.str();
  }
  if (!complete) {
    throw NumericalError("decompose: every beta failed for at least one (eta, N) pair");
  }
  stage.commit();
  out << table.str();
}

void cmd_forward(const ConfigFile& cfg, const RunOptions& opts, std::ostream& out) {
  const Model model = read_speed_model(cfg, "speed");
  const Acquisition acq = read_acquisition(cfg);
  acq.check_inside(model.grid());
  const std::vector<double> freqs = cfg.reals("data", "frequencies");
  OutputStage stage(cfg.path("output", "dir"));
  const FrequencyDataset data = generate_data(model, acq, freqs, opts.threads);
  write_dataset_archive(stage / "dataset", data);
  stage.commit();
  out << "forward: " << freqs.size() << " frequencies x " << acq.source_count() << " sources x "
      << acq.receiver_count() << " receivers\n";
}

void cmd_invert(const ConfigFile& cfg, const RunOptions& opts, std::ostream& out) {
  const Model start = read_speed_model(cfg, "start");
  const FrequencyDataset data = read_dataset_archive(cfg.path("data", "dataset"));
  InversionConfig config;
  config.frequencies = cfg.has("data", "frequencies") ? cfg.reals("data", "frequencies") : data.frequencies;
  config.nodal_mode = cfg.flag_or("schedule", "nodal", false);
  if (!config.nodal_mode) {
    config.n_schedule = cfg.integers("schedule", "n");
    config.spec = read_spec(cfg);
  }
  config.n_iter = cfg.integer_or("schedule", "n_iter", config.n_iter);
  config.refresh_basis = cfg.flag_or("schedule", "refresh_basis", false);
  config.line_search.armijo_c1 = cfg.real_or("optimizer", "armijo_c1", config.line_search.armijo_c1);
  config.line_search.shrink = cfg.real_or("optimizer", "shrink", config.line_search.shrink);
  config.line_search.max_backtracks = cfg.integer_or("optimizer", "max_backtracks", config.line_search.max_backtracks);
  config.line_search.initial_step_fraction =
      cfg.real_or("optimizer", "initial_step_fraction", config.line_search.initial_step_fraction);
  config.eigensolver = read_eigensolver(cfg);
  config.threads = opts.threads;
  try {
    config.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  for (double f : config.frequencies) {
    (void)data.frequency_index(f);
  }

  const InversionResult result = run_inversion(config, data, start);
  if (result.failure) {
    throw NumericalError("invert: " + *result.failure);
  }
  OutputStage stage(cfg.path("output", "dir"));
  result.history.write_csv(stage / "history.csv");
  write_model_files(stage, "final_model", result.model.speed(), images(cfg));
  for (std::size_t b = 0; b < result.history.snapshots.size(); ++b) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_block%02zu", b + 1);
    write_model_files(stage, name, slowness_to_speed(result.history.snapshots[b]), images(cfg));
  }
  stage.commit();
  out << "invert: " << result.history.records.size() << " iterations";
  if (!result.history.records.empty()) {
    out << std::setprecision(6) << ", misfit " << result.history.records.front().misfit_before << " -> "
        << result.history.records.back().misfit;
  }
  out << '\n';
}

void cmd_dump_basis(const ConfigFile& cfg, const RunOptions& /*opts*/, std::ostream& out) {
  const ScalarField field = decomposition_field(cfg);
  const DiffusionSpec spec = read_spec(cfg);
  const std::vector<int> ns = cfg.integers("schedule", "n");
  if (ns.empty()) {
    throw ConfigError("[schedule] n must list at least one basis size");
  }
  const int n = *std::max_element(ns.begin(), ns.end());
  if (n < 1 || static_cast<std::size_t>(n) > field.grid().interior_size()) {
    throw ConfigError("[schedule] n must lie between 1 and the number of interior nodes");
  }
  const auto basis = build_basis(field, spec, n, read_eigensolver(cfg));
  OutputStage stage(cfg.path("output", "dir"));
  write_basis_archive(stage / "basis", *basis);
  {
    std::ofstream f(stage / "eigenvalues.csv");
    f << std::setprecision(17) << "k,eigenvalue\n";
    for (int k = 0; k < basis->size(); ++k) {
      f << k + 1 << ',' << basis->eigenvalues[k] << '\n';
    }
    if (!f) {
      throw std::runtime_error("dump-basis: cannot write eigenvalues.csv");
    }
  }
  if (images(cfg)) {
    write_field_pgm(stage / "m0.pgm", basis->m0);
    for (int k = 0; k < basis->size(); ++k) {
      char name[32];
      std::snprintf(name, sizeof name, "psi_%04d.pgm", k + 1);
      write_field_pgm(stage / name, basis->psi(k));
    }
  }
  stage.commit();
  out << "dump-basis: " << basis->size() << " eigenpairs of " << to_string(spec.kind) << ", lambda_1 = "
      << std::setprecision(10) << basis->eigenvalues[0] << '\n';
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Eigenvector-basis frequency-domain waveform inversion"};
  app.require_subcommand(1);
  fs::path config_path;
  RunOptions opts;
  using Command = void (*)(const ConfigFile&, const RunOptions&, std::ostream&);
  const std::vector<std::pair<std::string, Command>> commands{{"synth", cmd_synth},
                                                              {"decompose", cmd_decompose},
                                                              {"forward", cmd_forward},
                                                              {"invert", cmd_invert},
                                                              {"dump-basis", cmd_dump_basis}};
  const std::map<std::string, std::string> help{
      {"synth", "build a synthetic model and its dataset"},
      {"decompose", "project a model on eigenbases and tabulate errors"},
      {"forward", "simulate receiver data for a model"},
      {"invert", "run the waveform inversion"},
      {"dump-basis", "write a diffusion eigenbasis"}};
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--threads", opts.threads, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opts.seed, "random seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }

  Command selected = nullptr;
  for (const auto& [name, fn] : commands) {
    if (app.got_subcommand(name)) {
      selected = fn;
    }
  }
  try {
    const ConfigFile cfg = ConfigFile::parse(config_path);
    selected(cfg, opts, out);
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const FormatError& e) {
    err << "format error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::out_of_range& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "I/O error: " << e.what() << '\n';
    return kExitIo;
  }
}

} // namespace eigenwave::cli
