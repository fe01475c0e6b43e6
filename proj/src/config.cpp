#include "satl/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

#include "satl/error.hpp"

namespace satl {

namespace {

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model", {"scheme", "g", "kappa", "gamma", "Gamma", "gamma_f", "gamma_4", "E_pump"}},
      {"truncation", {"n_max_start", "ceiling", "step", "threshold"}},
      {"spectrum", {"omega_min", "omega_max", "points", "fit", "mode"}},
      {"trajectory",
       {"dt", "t_final", "record_stride", "initial_level", "initial_photons", "n_max", "n_traj",
        "seed", "substream"}},
      {"sweep", {"parameter", "start", "stop", "points", "spacing", "spectra", "linewidth"}},
  };
  return keys;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool valid_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

[[noreturn]] void fail(int line, const std::string& message) {
  throw ConfigError("line " + std::to_string(line) + ": " + message, "config-parse");
}

class Document {
 public:
  Document(std::string_view text) {
    int line_no = 0;
    std::string current;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      std::string_view line = text.substr(pos, end - pos);
      pos = end + 1;
      ++line_no;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(line_no, "malformed section header");
        current = std::string(trim(line.substr(1, line.size() - 2)));
        if (!schema().contains(current)) fail(line_no, "unknown section [" + current + "]");
        if (!seen_sections_.insert(current).second) {
          fail(line_no, "duplicate section [" + current + "]");
        }
        sections_[current];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) fail(line_no, "expected 'key = value'");
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (!valid_identifier(key)) fail(line_no, "malformed key '" + key + "'");
      if (current.empty()) fail(line_no, "key '" + key + "' appears before any section");
      if (value.empty()) fail(line_no, "key '" + key + "' has no value");
      if (!schema().at(current).contains(key)) {
        fail(line_no, "unknown key '" + key + "' in [" + current + "]");
      }
      auto [it, inserted] = sections_[current].emplace(key, Entry{value, line_no});
      if (!inserted) fail(line_no, "duplicate key '" + key + "' in [" + current + "]");
    }
    last_line_ = line_no;
  }

  const Entry* find(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto e = s->second.find(key);
    return e == s->second.end() ? nullptr : &e->second;
  }

  const Entry& require(const std::string& section, const std::string& key) const {
    if (const Entry* e = find(section, key)) return *e;
    fail(last_line_, "missing required key '" + key + "' in [" + section + "]");
  }

  std::optional<double> number(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    return to_number(*e, key);
  }

  template <class Int>
  std::optional<Int> integer(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    Int v{};
    const char* first = e->value.data();
    const char* last = first + e->value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      fail(e->line, "key '" + key + "' expects an integer, got '" + e->value + "'");
    }
    return v;
  }

  std::optional<bool> boolean(const std::string& section, const std::string& key) const {
    const Entry* e = find(section, key);
    if (!e) return std::nullopt;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    fail(e->line, "key '" + key + "' expects true or false, got '" + e->value + "'");
  }

  static double to_number(const Entry& e, const std::string& key) {
    double v = 0.0;
    const char* first = e.value.data();
    const char* last = first + e.value.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
      fail(e.line, "key '" + key + "' expects a finite number, got '" + e.value + "'");
    }
    return v;
  }

  int last_line() const noexcept { return last_line_; }

 private:
  std::map<std::string, Section> sections_;
  std::set<std::string> seen_sections_;
  int last_line_ = 0;
};

std::set<std::string> scheme_keys(Scheme scheme) {
  switch (scheme) {
    case Scheme::ThreeLevelIncoherent:
      return {"g", "kappa", "gamma", "Gamma"};
    case Scheme::FourLevelIncoherent:
      return {"g", "kappa", "gamma", "Gamma", "gamma_f"};
    case Scheme::FourLevelCoherent:
      return {"g", "kappa", "gamma", "gamma_f", "gamma_4", "E_pump"};
  }
  return {};
}

std::string pump_key(Scheme scheme) {
  return scheme == Scheme::FourLevelCoherent ? "E_pump" : "Gamma";
}

double& param_field(RateParams& p, const std::string& key) {
  if (key == "g") return p.g;
  if (key == "kappa") return p.kappa;
  if (key == "gamma") return p.gamma;
  if (key == "Gamma") return p.Gamma;
  if (key == "gamma_f") return p.gamma_f;
  if (key == "gamma_4") return p.gamma_4;
  return p.E_pump;
}

FitPolicy parse_fit(const Entry& e) {
  if (e.value == "auto") return FitPolicy::Auto;
  if (e.value == "true") return FitPolicy::Always;
  if (e.value == "false") return FitPolicy::Never;
  fail(e.line, "key 'fit' expects auto, true or false, got '" + e.value + "'");
}

SolveMode parse_mode(const Entry& e) {
  if (e.value == "auto") return SolveMode::Auto;
  if (e.value == "full") return SolveMode::Full;
  if (e.value == "reduced") return SolveMode::Reduced;
  if (e.value == "dense") return SolveMode::Dense;
  fail(e.line, "key 'mode' expects auto, full, reduced or dense, got '" + e.value + "'");
}

std::string_view to_string(FitPolicy fit) {
  switch (fit) {
    case FitPolicy::Auto: return "auto";
    case FitPolicy::Always: return "true";
    case FitPolicy::Never: return "false";
  }
  return "auto";
}

std::string_view to_string(SolveMode mode) {
  switch (mode) {
    case SolveMode::Auto: return "auto";
    case SolveMode::Full: return "full";
    case SolveMode::Reduced: return "reduced";
    case SolveMode::Dense: return "dense";
  }
  return "auto";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void parse_model(const Document& doc, JobKind job, RunConfig& c) {
  const Entry& scheme = doc.require("model", "scheme");
  try {
    c.scheme = parse_scheme(scheme.value);
  } catch (const ConfigError&) {
    fail(scheme.line, "unknown scheme '" + scheme.value + "'");
  }
  const std::set<std::string> allowed = scheme_keys(c.scheme);
  const std::string pump = pump_key(c.scheme);
  for (const std::string key : {"g", "kappa", "gamma", "Gamma", "gamma_f", "gamma_4", "E_pump"}) {
    const Entry* e = doc.find("model", key);
    if (!e) continue;
    if (!allowed.contains(key)) {
      fail(e->line, "key '" + std::string(key) + "' does not apply to scheme " + scheme.value);
    }
    if (job == JobKind::Sweep && key == pump) {
      fail(e->line, "key '" + pump + "' is swept; set it in [sweep] instead");
    }
    const double v = Document::to_number(*e, key);
    if (v < 0.0) fail(e->line, "rate '" + std::string(key) + "' must be non-negative");
    param_field(c.params, key) = v;
  }
  std::vector<std::string> required = {"g", "kappa"};
  if (job != JobKind::Sweep) required.push_back(pump);
  if (c.scheme != Scheme::ThreeLevelIncoherent) required.push_back("gamma_f");
  if (c.scheme == Scheme::FourLevelCoherent) required.push_back("gamma_4");
  for (const std::string& key : required) doc.require("model", key);
  validate(c.params, c.scheme);
}

void parse_truncation(const Document& doc, RunConfig& c) {
  if (auto v = doc.integer<int>("truncation", "n_max_start")) {
    if (*v < 1) fail(doc.find("truncation", "n_max_start")->line, "n_max_start must be >= 1");
    c.n_max_start = *v;
  }
  if (auto v = doc.integer<int>("truncation", "ceiling")) c.truncation.ceiling = *v;
  if (c.truncation.ceiling < c.n_max_start) {
    const Entry* e = doc.find("truncation", "ceiling");
    fail(e ? e->line : doc.last_line(), "ceiling must be >= n_max_start");
  }
  if (auto v = doc.integer<int>("truncation", "step")) {
    if (*v < 1) fail(doc.find("truncation", "step")->line, "step must be >= 1");
    c.truncation.step = *v;
  }
  if (auto v = doc.number("truncation", "threshold")) {
    if (!(*v > 0.0 && *v < 1.0)) {
      fail(doc.find("truncation", "threshold")->line, "threshold must lie in (0, 1)");
    }
    c.truncation.threshold = *v;
  }
}

void parse_spectrum(const Document& doc, RunConfig& c) {
  SpectrumJob& s = c.spectrum;
  s.omega_min = doc.number("spectrum", "omega_min");
  s.omega_max = doc.number("spectrum", "omega_max");
  if (s.omega_min.has_value() != s.omega_max.has_value()) {
    const Entry* e = doc.find("spectrum", s.omega_min ? "omega_min" : "omega_max");
    fail(e->line, "omega_min and omega_max must be given together");
  }
  if (s.omega_min && !(*s.omega_max > *s.omega_min)) {
    fail(doc.find("spectrum", "omega_max")->line, "omega_max must exceed omega_min");
  }
  if (auto v = doc.integer<int>("spectrum", "points")) {
    if (*v < 2) fail(doc.find("spectrum", "points")->line, "points must be >= 2");
    s.points = *v;
  }
  if (const Entry* e = doc.find("spectrum", "fit")) s.fit = parse_fit(*e);
  if (const Entry* e = doc.find("spectrum", "mode")) s.mode = parse_mode(*e);
  if (s.mode == SolveMode::Reduced && c.scheme == Scheme::FourLevelCoherent) {
    fail(doc.find("spectrum", "mode")->line, "reduced mode is unavailable for four-coherent");
  }
}

void parse_trajectory(const Document& doc, RunConfig& c) {
  TrajectoryJob& t = c.trajectory;
  auto line_of = [&](const char* key) { return doc.find("trajectory", key)->line; };
  if (auto v = doc.number("trajectory", "dt")) {
    if (*v < 0.0) fail(line_of("dt"), "dt must be non-negative (0 selects the default)");
    t.options.dt = *v;
  }
  if (auto v = doc.number("trajectory", "t_final")) {
    if (!(*v > 0.0)) fail(line_of("t_final"), "t_final must be positive");
    t.options.t_final = *v;
  }
  if (auto v = doc.integer<int>("trajectory", "record_stride")) {
    if (*v < 1) fail(line_of("record_stride"), "record_stride must be >= 1");
    t.options.record_stride = *v;
  }
  if (auto v = doc.integer<int>("trajectory", "n_max")) {
    if (*v < 1) fail(line_of("n_max"), "n_max must be >= 1");
    t.n_max = *v;
  }
  if (auto v = doc.integer<int>("trajectory", "initial_level")) {
    if (*v < 1 || *v > atomic_levels(c.scheme)) {
      fail(line_of("initial_level"), "initial_level out of range for the scheme");
    }
    t.options.initial_level = *v;
  }
  if (auto v = doc.integer<int>("trajectory", "initial_photons")) {
    if (*v < 0 || *v > t.n_max) fail(line_of("initial_photons"), "initial_photons out of range");
    t.options.initial_photons = *v;
  }
  if (auto v = doc.integer<int>("trajectory", "n_traj")) {
    if (!(*v == 1 || *v >= 100)) fail(line_of("n_traj"), "n_traj must be 1 or >= 100");
    t.n_traj = *v;
  }
  if (auto v = doc.integer<std::uint64_t>("trajectory", "seed")) t.seed = *v;
  if (auto v = doc.integer<std::uint64_t>("trajectory", "substream")) t.substream = *v;
}

void parse_sweep(const Document& doc, JobKind job, RunConfig& c) {
  SweepJob& s = c.sweep;
  const std::string pump = pump_key(c.scheme);
  s.parameter = pump;
  if (const Entry* e = doc.find("sweep", "parameter")) {
    if (e->value != pump) {
      fail(e->line, "scheme " + std::string(to_string(c.scheme)) + " sweeps '" + pump + "', not '" +
                        e->value + "'");
    }
  }
  if (const Entry* e = doc.find("sweep", "spacing")) {
    if (e->value == "log") {
      s.spacing = GridSpacing::Log;
    } else if (e->value == "linear") {
      s.spacing = GridSpacing::Linear;
    } else {
      fail(e->line, "key 'spacing' expects log or linear, got '" + e->value + "'");
    }
  }
  if (auto v = doc.boolean("sweep", "spectra")) s.spectra = *v;
  if (auto v = doc.boolean("sweep", "linewidth")) s.linewidth = *v;
  if (job != JobKind::Sweep) {
    if (auto v = doc.number("sweep", "start")) s.start = *v;
    if (auto v = doc.number("sweep", "stop")) s.stop = *v;
    if (auto v = doc.integer<int>("sweep", "points")) s.points = *v;
    return;
  }
  s.start = Document::to_number(doc.require("sweep", "start"), "start");
  s.stop = Document::to_number(doc.require("sweep", "stop"), "stop");
  const Entry& points = doc.require("sweep", "points");
  s.points = *doc.integer<int>("sweep", "points");
  if (s.points < 0) fail(points.line, "points must be non-negative");
  if (s.start < 0.0) fail(doc.find("sweep", "start")->line, "start must be non-negative");
  if (s.points >= 2 && !(s.stop > s.start)) {
    fail(doc.find("sweep", "stop")->line, "stop must exceed start");
  }
  if (s.spacing == GridSpacing::Log && s.points >= 2 && !(s.start > 0.0)) {
    fail(doc.find("sweep", "start")->line, "log spacing needs start > 0");
  }
}

}  // namespace

std::string_view to_string(JobKind job) {
  switch (job) {
    case JobKind::Steady: return "steady";
    case JobKind::Spectrum: return "spectrum";
    case JobKind::Trajectory: return "trajectory";
    case JobKind::Sweep: return "sweep";
  }
  return "steady";
}

JobKind parse_job(std::string_view name) {
  if (name == "steady") return JobKind::Steady;
  if (name == "spectrum") return JobKind::Spectrum;
  if (name == "trajectory") return JobKind::Trajectory;
  if (name == "sweep") return JobKind::Sweep;
  throw ConfigError("unknown job '" + std::string(name) + "'");
}

RunConfig parse_config(std::string_view text, JobKind job) {
  const Document doc(text);
  RunConfig c;
  c.job = job;
  parse_model(doc, job, c);
  parse_truncation(doc, c);
  parse_spectrum(doc, c);
  parse_trajectory(doc, c);
  parse_sweep(doc, job, c);
  return c;
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["job"] = to_string(c.job);
  auto& m = j["model"];
  m["scheme"] = to_string(c.scheme);
  m["g"] = c.params.g;
  m["kappa"] = c.params.kappa;
  m["gamma"] = c.params.gamma;
  m["Gamma"] = c.params.Gamma;
  m["gamma_f"] = c.params.gamma_f;
  m["gamma_4"] = c.params.gamma_4;
  m["E_pump"] = c.params.E_pump;
  j["truncation"] = {{"n_max_start", c.n_max_start},
                     {"ceiling", c.truncation.ceiling},
                     {"step", c.truncation.step},
                     {"threshold", c.truncation.threshold}};
  auto& s = j["spectrum"];
  s["omega_min"] = c.spectrum.omega_min ? nlohmann::ordered_json(*c.spectrum.omega_min) : nullptr;
  s["omega_max"] = c.spectrum.omega_max ? nlohmann::ordered_json(*c.spectrum.omega_max) : nullptr;
  s["points"] = c.spectrum.points;
  s["fit"] = to_string(c.spectrum.fit);
  s["mode"] = to_string(c.spectrum.mode);
  const TrajectoryJob& t = c.trajectory;
  j["trajectory"] = {{"dt", t.options.dt},
                     {"t_final", t.options.t_final},
                     {"record_stride", t.options.record_stride},
                     {"initial_level", t.options.initial_level},
                     {"initial_photons", t.options.initial_photons},
                     {"n_max", t.n_max},
                     {"n_traj", t.n_traj},
                     {"seed", t.seed},
                     {"substream", t.substream}};
  j["sweep"] = {{"parameter", c.sweep.parameter},
                {"start", c.sweep.start},
                {"stop", c.sweep.stop},
                {"points", c.sweep.points},
                {"spacing", c.sweep.spacing == GridSpacing::Log ? "log" : "linear"},
                {"spectra", c.sweep.spectra},
                {"linewidth", c.sweep.linewidth}};
  return j;
}

std::string to_config_text(const RunConfig& c) {
  std::ostringstream out;
  out << "[model]\nscheme = " << to_string(c.scheme) << '\n';
  const std::set<std::string> allowed = scheme_keys(c.scheme);
  const std::string pump = pump_key(c.scheme);
  RateParams p = c.params;
  for (const std::string key : {"g", "kappa", "gamma", "Gamma", "gamma_f", "gamma_4", "E_pump"}) {
    if (!allowed.contains(key)) continue;
    if (c.job == JobKind::Sweep && key == pump) continue;
    out << key << " = " << format_double(param_field(p, key)) << '\n';
  }
  out << "\n[truncation]\nn_max_start = " << c.n_max_start << "\nceiling = " << c.truncation.ceiling
      << "\nstep = " << c.truncation.step
      << "\nthreshold = " << format_double(c.truncation.threshold) << '\n';
  out << "\n[spectrum]\n";
  if (c.spectrum.omega_min) {
    out << "omega_min = " << format_double(*c.spectrum.omega_min)
        << "\nomega_max = " << format_double(*c.spectrum.omega_max) << '\n';
  }
  out << "points = " << c.spectrum.points << "\nfit = " << to_string(c.spectrum.fit)
      << "\nmode = " << to_string(c.spectrum.mode) << '\n';
  const TrajectoryJob& t = c.trajectory;
  out << "\n[trajectory]\ndt = " << format_double(t.options.dt)
      << "\nt_final = " << format_double(t.options.t_final)
      << "\nrecord_stride = " << t.options.record_stride << "\nn_max = " << t.n_max
      << "\ninitial_level = " << t.options.initial_level
      << "\ninitial_photons = " << t.options.initial_photons << "\nn_traj = " << t.n_traj
      << "\nseed = " << t.seed << "\nsubstream = " << t.substream << '\n';
  out << "\n[sweep]\nparameter = " << c.sweep.parameter << "\nstart = " << format_double(c.sweep.start)
      << "\nstop = " << format_double(c.sweep.stop) << "\npoints = " << c.sweep.points
      << "\nspacing = " << (c.sweep.spacing == GridSpacing::Log ? "log" : "linear")
      << "\nspectra = " << (c.sweep.spectra ? "true" : "false")
      << "\nlinewidth = " << (c.sweep.linewidth ? "true" : "false") << '\n';
  return out.str();
}

SweepPlan make_sweep_plan(const RunConfig& c) {
  SweepPlan plan;
  plan.scheme = c.scheme;
  plan.base = c.params;
  plan.parameter = c.sweep.parameter.empty() ? pump_key(c.scheme) : c.sweep.parameter;
  plan.values = make_sweep_grid(c.sweep.start, c.sweep.stop, c.sweep.points, c.sweep.spacing);
  plan.spectra = c.sweep.spectra;
  plan.linewidth = c.sweep.linewidth;
  plan.start_n_max = c.n_max_start;
  plan.truncation = c.truncation;
  validate(plan);
  return plan;
}

}  // namespace satl
