#pragma once

// Command plumbing shared by the CLI: run configurations, figure presets,
// CSV/JSON tables and the metadata sidecar. Tables are written to a
// temporary file and renamed into place.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sumtails/acceptance.hpp"
#include "sumtails/charfun_inversion.hpp"
#include "sumtails/errors.hpp"
#include "sumtails/montecarlo_oracle.hpp"
#include "sumtails/tail_asymptotics.hpp"
#include "sumtails/term_distributions.hpp"

#ifndef SUMTAILS_VERSION_STRING
#define SUMTAILS_VERSION_STRING "0.3.0"
#endif

namespace sumtails {

inline constexpr const char* kVersion = SUMTAILS_VERSION_STRING;
inline constexpr const char* kOutputDirEnv = "SUMTAILS_OUTPUT_DIR";

using ordered_json = nlohmann::ordered_json;

enum class Command { Density, Tail, Crossover, Mc, Figure, Verify };
enum class OutputFormat { Csv, Json };
enum class GridSpacing { Linear, Log };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::Density: return "density";
    case Command::Tail: return "tail";
    case Command::Crossover: return "crossover";
    case Command::Mc: return "mc";
    case Command::Figure: return "figure";
    case Command::Verify: return "verify";
  }
  return "unknown";
}

inline Command parse_command(const std::string& s) {
  for (Command c : {Command::Density, Command::Tail, Command::Crossover, Command::Mc,
                    Command::Figure, Command::Verify}) {
    if (to_string(c) == s) return c;
  }
  throw InvalidArgument("unknown command '" + s + "'");
}

inline std::string to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::Csv;
  if (s == "json") return OutputFormat::Json;
  throw InvalidArgument("unknown format '" + s + "' (expected csv or json)");
}

inline std::string to_string(GridSpacing g) { return g == GridSpacing::Linear ? "linear" : "log"; }

inline GridSpacing parse_spacing(const std::string& s) {
  if (s == "linear") return GridSpacing::Linear;
  if (s == "log") return GridSpacing::Log;
  throw InvalidArgument("unknown grid spacing '" + s + "' (expected linear or log)");
}

inline TermKind parse_kind(const std::string& s) {
  for (TermKind k : {TermKind::Uniform, TermKind::PowerFamily, TermKind::Sech, TermKind::Gauss}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidArgument("unknown distribution '" + s + "' (expected uniform, power, sech, gauss)");
}

struct RunConfig {
  Command command = Command::Density;
  TermKind kind = TermKind::Uniform;
  int l = 2;             // power family only
  double sigma = 1.0;    // gauss only
  int n_terms = 10;
  double zmin = -5.0;
  double zmax = 5.0;
  int points = 101;
  GridSpacing spacing = GridSpacing::Linear;
  double log_floor = 1e-2;  // first positive node of a log grid starting at 0
  QuadratureConfig quadrature;
  std::uint64_t seed = 1;
  std::size_t samples = 1'000'000;  // mc only
  double m = 4.0;                   // crossover only
  std::string figure;               // figure only
  std::vector<int> criteria;        // verify only; empty runs all
  unsigned threads = 1;
  std::string output;
  OutputFormat format = OutputFormat::Csv;

  TermDistribution distribution() const {
    switch (kind) {
      case TermKind::Uniform: return TermDistribution::uniform();
      case TermKind::PowerFamily: return TermDistribution::power_family(l);
      case TermKind::Sech: return TermDistribution::sech();
      case TermKind::Gauss: return TermDistribution::gauss(sigma);
    }
    return TermDistribution::uniform();
  }

  SumSpec spec() const { return SumSpec::normalized(distribution(), n_terms); }

  void validate() const {
    if (n_terms < 1) throw InvalidArgument("--n must be >= 1");
    if (kind == TermKind::PowerFamily && l < 1) throw InvalidArgument("--l must be >= 1");
    if (kind == TermKind::Gauss && !(sigma > 0.0)) throw InvalidArgument("--sigma must be positive");
    const bool gridded = command == Command::Density || command == Command::Tail ||
                         command == Command::Mc;
    if (gridded) {
      if (!(zmin < zmax)) throw InvalidArgument("zmin must be below zmax");
      if (points < 2) throw InvalidArgument("points must be >= 2");
      if (spacing == GridSpacing::Log) {
        if (zmin < 0.0) throw InvalidArgument("log grids need zmin >= 0");
        if (!(log_floor > 0.0 && log_floor < zmax)) {
          throw InvalidArgument("log grids need 0 < log_floor < zmax");
        }
      }
    }
    if (command == Command::Mc && samples < 1) throw InvalidArgument("--samples must be >= 1");
    if (command == Command::Crossover && !(m > 3.0)) throw InvalidArgument("--m must exceed 3");
    if (command == Command::Figure && figure.empty()) throw InvalidArgument("--name is required");
    for (int id : criteria) {
      if (id < 1 || id > kCriterionCount) throw InvalidArgument("criterion ids run from 1 to 9");
    }
    quadrature.validate();
  }

  std::vector<double> grid() const {
    std::vector<double> z;
    if (spacing == GridSpacing::Linear) {
      z.resize(static_cast<std::size_t>(points));
      for (int i = 0; i < points; ++i) z[i] = zmin + (zmax - zmin) * i / (points - 1);
      z.back() = zmax;
      return z;
    }
    // Log grid: 0 (when zmin is 0) followed by geometric nodes up to zmax.
    const bool with_zero = zmin == 0.0;
    const double lo = with_zero ? log_floor : zmin;
    const int geometric = with_zero ? points - 1 : points;
    if (with_zero) z.push_back(0.0);
    const double ratio = std::log(zmax / lo);
    for (int i = 0; i < geometric; ++i) {
      z.push_back(geometric == 1 ? zmax : lo * std::exp(ratio * i / (geometric - 1)));
    }
    z.back() = zmax;
    return z;
  }
};

inline ordered_json to_json(const QuadratureConfig& q) {
  return ordered_json{{"rel_tol", q.rel_tol},
                      {"abs_tol", q.abs_tol},
                      {"log_cutoff", q.log_cutoff},
                      {"max_panels", q.max_panels}};
}

inline ordered_json to_json(const RunConfig& c) {
  return ordered_json{{"command", to_string(c.command)},
                      {"dist", to_string(c.kind)},
                      {"l", c.l},
                      {"sigma", c.sigma},
                      {"n", c.n_terms},
                      {"zmin", c.zmin},
                      {"zmax", c.zmax},
                      {"points", c.points},
                      {"spacing", to_string(c.spacing)},
                      {"log_floor", c.log_floor},
                      {"quadrature", to_json(c.quadrature)},
                      {"seed", c.seed},
                      {"samples", c.samples},
                      {"m", c.m},
                      {"figure", c.figure},
                      {"criteria", c.criteria},
                      {"threads", c.threads},
                      {"output", c.output},
                      {"format", to_string(c.format)}};
}

// Fills a config from a JSON object; missing keys keep their defaults.
inline RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  try {
    if (j.contains("command")) c.command = parse_command(j.at("command").get<std::string>());
    if (j.contains("dist")) c.kind = parse_kind(j.at("dist").get<std::string>());
    if (j.contains("l")) c.l = j.at("l").get<int>();
    if (j.contains("sigma")) c.sigma = j.at("sigma").get<double>();
    if (j.contains("n")) c.n_terms = j.at("n").get<int>();
    if (j.contains("zmin")) c.zmin = j.at("zmin").get<double>();
    if (j.contains("zmax")) c.zmax = j.at("zmax").get<double>();
    if (j.contains("points")) c.points = j.at("points").get<int>();
    if (j.contains("spacing")) c.spacing = parse_spacing(j.at("spacing").get<std::string>());
    if (j.contains("log_floor")) c.log_floor = j.at("log_floor").get<double>();
    if (j.contains("quadrature")) {
      const auto& q = j.at("quadrature");
      if (q.contains("rel_tol")) c.quadrature.rel_tol = q.at("rel_tol").get<double>();
      if (q.contains("abs_tol")) c.quadrature.abs_tol = q.at("abs_tol").get<double>();
      if (q.contains("log_cutoff")) c.quadrature.log_cutoff = q.at("log_cutoff").get<double>();
      if (q.contains("max_panels")) c.quadrature.max_panels = q.at("max_panels").get<std::size_t>();
    }
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("samples")) c.samples = j.at("samples").get<std::size_t>();
    if (j.contains("m")) c.m = j.at("m").get<double>();
    if (j.contains("figure")) c.figure = j.at("figure").get<std::string>();
    if (j.contains("criteria")) c.criteria = j.at("criteria").get<std::vector<int>>();
    if (j.contains("threads")) c.threads = j.at("threads").get<unsigned>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
    if (j.contains("format")) c.format = parse_format(j.at("format").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed config: ") + e.what());
  }
  return c;
}

// Reads a config file; a metadata sidecar is accepted and its "config"
// member is used.
inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config file is not valid JSON: " + std::string(e.what()));
  }
  if (j.contains("config")) return config_from_json(j.at("config"));
  return config_from_json(j);
}

struct FigurePreset {
  std::string name;
  std::string description;
  std::vector<RunConfig> runs;  // one density table per entry
};

inline FigurePreset figure_preset(const std::string& name) {
  FigurePreset preset;
  preset.name = name;
  RunConfig base;
  base.command = Command::Density;
  base.spacing = GridSpacing::Linear;
  base.zmin = 0.0;
  if (name == "F2") {
    preset.description = "uniform terms, N=10, against the Gaussian core";
    base.kind = TermKind::Uniform;
    base.n_terms = 10;
    base.zmax = 7.0;
    base.points = 351;
    preset.runs.push_back(base);
  } else if (name == "F3") {
    preset.description = "power family l=2, N=100 and N=10^4, against the Gaussian core and power tail";
    base.kind = TermKind::PowerFamily;
    base.l = 2;
    base.zmax = 100.0;
    base.points = 200;
    base.spacing = GridSpacing::Log;
    base.log_floor = 1e-2;
    for (int n : {100, 10'000}) {
      base.n_terms = n;
      preset.runs.push_back(base);
    }
  } else if (name == "F4") {
    preset.description = "sech terms, N=25, against the Gaussian core and exponential tail";
    base.kind = TermKind::Sech;
    base.n_terms = 25;
    base.zmax = 12.0;
    base.points = 301;
    preset.runs.push_back(base);
  } else {
    throw InvalidArgument("unknown figure preset '" + name + "' (expected F2, F3, F4)");
  }
  for (auto& run : preset.runs) run.figure = name;
  return preset;
}

// A column-oriented table; absent cells are NaN and are written empty (CSV)
// or null (JSON). Non-finite values are treated as absent.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

inline std::string format_number(double v) {
  if (!std::isfinite(v)) return "";
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", v);
  return buffer;
}

inline std::string render_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c];
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_number(row[c]);
    }
    out += '\n';
  }
  return out;
}

inline std::string render_json(const Table& t) {
  ordered_json j = ordered_json::object();
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    ordered_json column = ordered_json::array();
    for (const auto& row : t.rows) {
      if (std::isfinite(row[c])) {
        column.push_back(row[c]);
      } else {
        column.push_back(nullptr);
      }
    }
    j[t.columns[c]] = std::move(column);
  }
  return j.dump(2) + '\n';
}

inline std::string render(const Table& t, OutputFormat f) {
  return f == OutputFormat::Csv ? render_csv(t) : render_json(t);
}

// Writes to `<path>.tmp` then renames over `path`.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("write to " + tmp.string() + " failed");
  }
  std::filesystem::rename(tmp, path);
}

inline std::filesystem::path sidecar_path(const std::filesystem::path& table) {
  std::filesystem::path p = table;
  p += ".meta.json";
  return p;
}

// Table destination: the configured output, else `<default_stem>.<ext>` in
// $SUMTAILS_OUTPUT_DIR (or the working directory).
inline std::filesystem::path resolve_output(const RunConfig& c, const std::string& default_stem) {
  if (!c.output.empty()) return c.output;
  std::filesystem::path dir = ".";
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) dir = env;
  return dir / (default_stem + "." + to_string(c.format));
}

inline Table density_table_rows(const DensityTable& d) {
  Table t;
  t.columns = {"z", "p_numeric", "p_gauss", "p_asymptote"};
  for (std::size_t i = 0; i < d.z_grid.size(); ++i) {
    const double asym = d.p_asymptote ? (*d.p_asymptote)[i] : NAN;
    t.rows.push_back({d.z_grid[i], d.p_numeric[i], d.p_gauss[i], asym});
  }
  return t;
}

inline ordered_json spec_json(const SumSpec& s) {
  return ordered_json{{"distribution", s.distribution.name()},
                      {"n_terms", s.n_terms},
                      {"scale", s.scale}};
}

struct CommandOutcome {
  int exit_code = 0;
  std::vector<std::filesystem::path> written;
};

namespace detail {

inline ordered_json base_metadata(const RunConfig& c) {
  return ordered_json{{"tool", "sumtails"}, {"version", kVersion}, {"config", to_json(c)},
                      {"seed", c.seed}};
}

inline void emit(const RunConfig& c, const std::filesystem::path& path, const Table& table,
                 ordered_json meta, CommandOutcome& outcome) {
  write_atomic(path, render(table, c.format));
  meta["table"] = path.string();
  meta["rows"] = table.rows.size();
  write_atomic(sidecar_path(path), meta.dump(2) + '\n');
  outcome.written.push_back(path);
}

inline std::string stem_for(const RunConfig& c) {
  if (c.command == Command::Figure || !c.figure.empty()) {
    return c.figure + (c.figure == "F3" ? "_N" + std::to_string(c.n_terms) : "");
  }
  return to_string(c.command);
}

inline void run_density(const RunConfig& c, CommandOutcome& outcome, std::ostream& out) {
  const SumSpec spec = c.spec();
  const DensityTable d = density_grid(spec, c.grid(), c.quadrature, std::max(1u, c.threads));
  const TableCheck check = check_table(d);
  ordered_json meta = base_metadata(c);
  meta["spec"] = spec_json(spec);
  meta["asymptote"] = d.asymptote ? to_string(d.asymptote->kind) : "none";
  meta["max_error_estimate"] = d.max_error_estimate();
  std::size_t underflow = 0;
  for (bool u : d.underflow) underflow += u ? 1 : 0;
  meta["underflow_points"] = underflow;
  meta["trapezoid_mass"] = check.mass;
  if (check.symmetric_grid) meta["max_asymmetry"] = check.max_asymmetry;
  const auto path = resolve_output(c, stem_for(c));
  emit(c, path, density_table_rows(d), std::move(meta), outcome);
  out << "wrote " << path.string() << " (" << d.z_grid.size() << " rows, max error estimate "
      << format_number(d.max_error_estimate()) << ")\n";
}

inline void run_tail(const RunConfig& c, CommandOutcome& outcome, std::ostream& out) {
  const SumSpec spec = c.spec();
  const auto dist = spec.distribution;
  Table t;
  t.columns = {"z", "tail_numeric", "tail_gauss", "tail_single_jump"};
  double max_err = 0.0;
  for (double z : c.grid()) {
    const TailProbability p = tail_probability(spec, z, c.quadrature);
    max_err = std::max(max_err, p.error_estimate);
    const double gauss = 0.5 * std::erfc(z / std::numbers::sqrt2);
    const double jump = spec.n_terms * tail_prob(dist, spec.scale * z);
    t.rows.push_back({z, p.value, gauss, jump});
  }
  ordered_json meta = base_metadata(c);
  meta["spec"] = spec_json(spec);
  meta["max_error_estimate"] = max_err;
  const auto path = resolve_output(c, stem_for(c));
  emit(c, path, t, std::move(meta), outcome);
  out << "wrote " << path.string() << " (" << t.rows.size() << " rows)\n";
}

inline void run_crossover(const RunConfig& c, CommandOutcome& outcome, std::ostream& out) {
  const double iterate = crossover_zg(c.m, c.n_terms, CrossoverMode::Iterate);
  const bool even = std::abs(0.5 * c.m - std::round(0.5 * c.m)) < 1e-12;
  double root = NAN;
  double gauss = NAN;
  double jump = NAN;
  if (even) {
    root = crossover_zg(c.m, c.n_terms, CrossoverMode::Solve);
    const auto dist = TermDistribution::power_family(static_cast<int>(std::round(0.5 * c.m)));
    const double scale = dist.sigma() * std::sqrt(double(c.n_terms));
    gauss = gaussian_density(root);
    jump = single_big_jump_z(dist, c.n_terms, scale, root);
  }
  Table t;
  t.columns = {"m", "n_terms", "z_iterate", "z_solve", "p_gauss_at_root", "p_jump_at_root"};
  t.rows.push_back({c.m, double(c.n_terms), iterate, root, gauss, jump});
  const auto path = resolve_output(c, stem_for(c));
  emit(c, path, t, base_metadata(c), outcome);
  out << "iterate z_G = " << format_number(iterate) << '\n';
  if (even) {
    out << "solve   z_G = " << format_number(root) << "  (p_G " << format_number(gauss)
        << ", single jump " << format_number(jump) << ")\n";
  } else {
    out << "solve   z_G = n/a (solve mode needs an even m)\n";
  }
  out << "wrote " << path.string() << '\n';
}

inline void run_mc(const RunConfig& c, CommandOutcome& outcome, std::ostream& out) {
  const SumSpec spec = c.spec();
  const SampleBatch batch = sample_sum(spec, c.samples, c.seed, c.threads);
  Table t;
  t.columns = {"z", "estimate", "std_error", "exceedances", "tail_numeric"};
  std::size_t low = 0;
  for (double z : c.grid()) {
    const TailEstimate e = empirical_tail(batch, z);
    low += e.low_statistics ? 1 : 0;
    const double inverted = tail_probability(spec, z, c.quadrature).value;
    t.rows.push_back({z, e.estimate, e.std_error, double(e.exceedances), inverted});
  }
  ordered_json meta = base_metadata(c);
  meta["spec"] = spec_json(spec);
  meta["samples"] = batch.count;
  meta["low_statistics_rows"] = low;
  const auto path = resolve_output(c, stem_for(c));
  emit(c, path, t, std::move(meta), outcome);
  out << "wrote " << path.string() << " (" << batch.count << " sums, " << low
      << " low-statistics rows)\n";
}

inline int run_verify(const RunConfig& c, CommandOutcome& outcome, std::ostream& out) {
  AcceptanceOptions opts;
  opts.seed = c.seed;
  opts.threads = c.threads;
  ordered_json results = ordered_json::array();
  std::vector<int> ids = c.criteria;
  if (ids.empty()) {
    for (int id = 1; id <= kCriterionCount; ++id) ids.push_back(id);
  }
  int failures = 0;
  for (int id : ids) {
    const CriterionResult r = run_criterion(id, opts);
    out << format_result(r) << std::flush;
    failures += r.passed() ? 0 : 1;
    ordered_json checks = ordered_json::array();
    for (const auto& chk : r.checks) {
      checks.push_back({{"name", chk.name}, {"passed", chk.passed}, {"detail", chk.detail}});
    }
    results.push_back({{"criterion", r.id},
                       {"title", r.title},
                       {"passed", r.passed()},
                       {"seconds", r.seconds},
                       {"limit_seconds", r.limit_seconds},
                       {"checks", checks}});
  }
  out << (static_cast<int>(ids.size()) - failures) << "/" << ids.size() << " criteria passed\n";
  if (!c.output.empty()) {
    ordered_json doc = base_metadata(c);
    doc["results"] = results;
    write_atomic(c.output, doc.dump(2) + '\n');
    outcome.written.push_back(c.output);
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace detail

// Executes one command. Usage problems (InvalidArgument) exit with 2, any
// other library or I/O error with 1; the error text is passed through.
inline CommandOutcome run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
  CommandOutcome outcome;
  try {
    config.validate();
    switch (config.command) {
      case Command::Density: detail::run_density(config, outcome, out); break;
      case Command::Tail: detail::run_tail(config, outcome, out); break;
      case Command::Crossover: detail::run_crossover(config, outcome, out); break;
      case Command::Mc: detail::run_mc(config, outcome, out); break;
      case Command::Figure: {
        const FigurePreset preset = figure_preset(config.figure);
        for (RunConfig run : preset.runs) {
          run.format = config.format;
          run.threads = config.threads;
          run.quadrature = config.quadrature;
          if (!config.output.empty()) {
            std::filesystem::path p = config.output;
            if (preset.runs.size() > 1) {
              p = p.parent_path() /
                  (p.stem().string() + "_N" + std::to_string(run.n_terms) + p.extension().string());
            }
            run.output = p.string();
          } else {
            run.output = resolve_output(run, detail::stem_for(run)).string();
          }
          detail::run_density(run, outcome, out);
        }
        break;
      }
      case Command::Verify: outcome.exit_code = detail::run_verify(config, outcome, out); break;
    }
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    outcome.exit_code = 2;
  } catch (const QuadratureFailure& e) {
    err << "error: " << e.what() << " (z = " << format_number(e.z())
        << ", error estimate = " << format_number(e.error_estimate()) << ", panels = " << e.panels()
        << ")\n";
    outcome.exit_code = 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    outcome.exit_code = 1;
  }
  return outcome;
}

}  // namespace sumtails
