#include "satl/artifacts.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "satl/error.hpp"
#include "satl/observables.hpp"

namespace satl {

namespace {

void append_row(std::string& out, std::initializer_list<std::string> cells) {
  bool first = true;
  for (const std::string& c : cells) {
    if (!first) out += ',';
    out += c;
    first = false;
  }
  out += '\n';
}

std::string header_line(CsvKind kind) {
  std::string out;
  const auto& h = csv_header(kind);
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (i) out += ',';
    out += h[i];
  }
  out += '\n';
  return out;
}

bool is_number(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

const std::vector<std::string>& csv_header(CsvKind kind) {
  static const std::vector<std::string> spectrum = {"omega_over_gamma", "s_normalized"};
  static const std::vector<std::string> trajectory = {"t_gamma", "pop_upper", "dipole_mag"};
  static const std::vector<std::string> sweep = {"pump_over_gamma", "mean_n",  "fano",
                                                 "beta",            "linewidth_fwhm", "st_width",
                                                 "n_peaks",         "status"};
  static const std::vector<std::string> steady = {"level", "photons", "population"};
  static const std::vector<std::string> ensemble = {"t_gamma", "pop_upper", "mean_n"};
  switch (kind) {
    case CsvKind::Spectrum: return spectrum;
    case CsvKind::Trajectory: return trajectory;
    case CsvKind::Sweep: return sweep;
    case CsvKind::Steady: return steady;
    case CsvKind::Ensemble: return ensemble;
  }
  return spectrum;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);  // no "-0"
  return buf;
}

std::string format_number(std::optional<double> value) {
  return value ? format_number(*value) : std::string();
}

std::string spectrum_csv(const SpectrumResult& spectrum) {
  std::string out = header_line(CsvKind::Spectrum);
  const auto& omega = spectrum.grid.omega();
  for (std::size_t i = 0; i < omega.size(); ++i) {
    append_row(out, {format_number(omega[i]), format_number(spectrum.s[i])});
  }
  return out;
}

std::string trajectory_csv(const TrajectoryRecord& record) {
  std::string out = header_line(CsvKind::Trajectory);
  for (std::size_t i = 0; i < record.time.size(); ++i) {
    append_row(out, {format_number(record.time[i]), format_number(record.population_upper[i]),
                     format_number(std::abs(record.dipole[i]))});
  }
  return out;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = header_line(CsvKind::Sweep);
  for (const SweepRow& r : rows) {
    const bool solved = r.n_max > 0;
    append_row(out, {format_number(r.value), solved ? format_number(r.mean_n) : std::string(),
                     format_number(r.fano), format_number(r.beta), format_number(r.linewidth),
                     format_number(r.st_width), solved ? std::to_string(r.n_peaks) : std::string(),
                     r.status});
  }
  return out;
}

std::string steady_csv(const StateSpace& space, const Matrix& rho) {
  std::string out = header_line(CsvKind::Steady);
  for (int level = 1; level <= space.n_levels(); ++level) {
    for (int n = 0; n <= space.n_max(); ++n) {
      const int i = space.index(level, n);
      append_row(out, {std::to_string(level), std::to_string(n), format_number(rho(i, i).real())});
    }
  }
  return out;
}

std::string ensemble_csv(const ModelSpec& model, const EnsembleResult& ensemble) {
  std::string out = header_line(CsvKind::Ensemble);
  for (std::size_t r = 0; r < ensemble.time.size(); ++r) {
    const PhotonStats stats = photon_stats(model.space, ensemble.rho[r]);
    append_row(out, {format_number(ensemble.time[r]),
                     format_number(level_population(model.space, ensemble.rho[r], model.lasing.upper)),
                     format_number(stats.mean_n)});
  }
  return out;
}

nlohmann::ordered_json events_json(const ModelSpec& model, const TrajectoryRecord& record) {
  nlohmann::ordered_json events = nlohmann::ordered_json::array();
  for (const CollapseEvent& e : record.events) {
    events.push_back({{"t_gamma", e.time}, {"channel", model.collapses[e.channel].name}});
  }
  nlohmann::ordered_json channels = nlohmann::ordered_json::array();
  for (const Collapse& c : model.collapses) channels.push_back(c.name);
  return {{"channels", channels}, {"count", record.events.size()}, {"events", events}};
}

nlohmann::ordered_json error_json(std::string_view code, int exit_code, std::string_view message) {
  static const char* kinds[] = {"", "config", "numerical", "truncation", "fit"};
  const char* kind = exit_code >= 1 && exit_code <= 4 ? kinds[exit_code] : "internal";
  return {{"error",
           {{"code", code}, {"kind", kind}, {"exit_code", exit_code}, {"message", message}}}};
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  bool first = true;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      cells.emplace_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

void check_schema(const CsvTable& table, CsvKind kind) {
  const auto& expected = csv_header(kind);
  if (table.header != expected) throw ConfigError("CSV header does not match the schema", "schema");
  // columns that may be empty: sweep fano, linewidth_fwhm, st_width and, for failed points, mean_n, n_peaks
  const std::vector<bool> optional_column =
      kind == CsvKind::Sweep
          ? std::vector<bool>{false, true, true, false, true, true, true, false}
          : std::vector<bool>(expected.size(), false);
  const bool last_is_text = kind == CsvKind::Sweep;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = "CSV row " + std::to_string(r + 2);
    if (row.size() != expected.size()) throw ConfigError(where + " has the wrong width", "schema");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (last_is_text && c + 1 == row.size()) {
        if (row[c].empty()) throw ConfigError(where + ": empty status", "schema");
        continue;
      }
      if (row[c].empty() && optional_column[c]) continue;
      if (!is_number(row[c])) {
        throw ConfigError(where + ": column '" + expected[c] + "' is not numeric", "schema");
      }
    }
  }
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string(), "io");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ConfigError("cannot write " + path.string(), "io");
}

void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& json) {
  write_text(path, json.dump(2) + "\n");
}

}  // namespace satl
