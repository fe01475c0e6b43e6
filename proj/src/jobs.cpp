#include "satl/jobs.hpp"

#include <cstdio>
#include <ostream>

#include "satl/artifacts.hpp"
#include "satl/error.hpp"
#include "satl/observables.hpp"

namespace satl {

namespace {

using Json = nlohmann::ordered_json;

Json optional_json(std::optional<double> v) { return v ? Json(*v) : Json(nullptr); }

Json peaks_json(const std::vector<Peak>& peaks) {
  Json out = Json::array();
  for (const Peak& p : peaks) {
    out.push_back({{"omega", p.omega}, {"height", p.height}, {"prominence", p.prominence}});
  }
  return out;
}

Json fit_json(const LineFit& fit) {
  return {{"center", fit.center},
          {"fwhm", fit.fwhm},
          {"amplitude", fit.amplitude},
          {"residual", fit.residual}};
}

std::string format_summary(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

Solution solve(const RunConfig& c) {
  return solve_with_adaptive_truncation(
      [&](int n_max) { return build_model(c.scheme, c.params, n_max); }, c.n_max_start,
      c.truncation);
}

JobOutput steady_job(const RunConfig& c, const std::filesystem::path& dir) {
  const Solution sol = solve(c);
  const PhotonStats stats = photon_stats(sol);
  const StateSpace& space = sol.generator.model.space;
  write_text(dir / "steady.csv", steady_csv(space, sol.steady.rho));

  Json levels = Json::object();
  for (int level = 1; level <= space.n_levels(); ++level) {
    levels[std::to_string(level)] = level_population(space, sol.steady.rho, level);
  }
  JobOutput out;
  out.results = {{"n_max", sol.steady.n_max},
                 {"mean_n", stats.mean_n},
                 {"second_moment", stats.second_moment},
                 {"fano", optional_json(stats.fano)},
                 {"beta", beta(c.scheme, c.params)},
                 {"level_populations", levels},
                 {"residual", sol.steady.residual},
                 {"trace_error", sol.steady.trace_error},
                 {"hermiticity_error", sol.steady.hermiticity_error},
                 {"min_eigenvalue", sol.steady.min_eigenvalue},
                 {"top_sector_population", sol.steady.top_sector_population}};
  out.summary = format_summary("steady %s n_max=%d mean_n=%.6g fano=%s",
                               std::string(to_string(c.scheme)).c_str(), sol.steady.n_max,
                               stats.mean_n, format_number(stats.fano).c_str());
  return out;
}

JobOutput spectrum_job(const RunConfig& c, const std::filesystem::path& dir) {
  const Solution sol = solve(c);
  SpectrumOptions options;
  options.mode = c.spectrum.mode;
  const SpectrumResult spec =
      c.spectrum.omega_min
          ? regression_spectrum(
                sol.steady, sol.generator,
                FrequencyGrid::uniform(*c.spectrum.omega_min, *c.spectrum.omega_max,
                                       c.spectrum.points),
                options)
          : regression_spectrum(sol.steady, sol.generator, options);
  write_text(dir / "spectrum.csv", spectrum_csv(spec));

  const std::vector<Peak> peaks = classify_peaks(spec);
  std::optional<LineFit> fit;
  const bool want_fit = c.spectrum.fit == FitPolicy::Always ||
                        (c.spectrum.fit == FitPolicy::Auto && peaks.size() == 1);
  if (want_fit) fit = measure_linewidth(sol, spec);

  JobOutput out;
  out.results = {{"n_max", sol.steady.n_max},
                 {"mean_n", photon_stats(sol).mean_n},
                 {"points", spec.grid.size()},
                 {"omega_min", spec.grid.front()},
                 {"omega_max", spec.grid.back()},
                 {"widenings", spec.widenings},
                 {"integral", spec.integral},
                 {"imag_ratio", spec.imag_ratio},
                 {"min_before_clamp", spec.min_before_clamp},
                 {"peaks", peaks_json(peaks)},
                 {"fit", fit ? fit_json(*fit) : Json(nullptr)},
                 {"warnings", spec.warnings}};
  out.summary = format_summary("spectrum %s n_max=%d peaks=%zu fwhm=%s",
                               std::string(to_string(c.scheme)).c_str(), sol.steady.n_max,
                               peaks.size(),
                               format_number(fit ? std::optional(fit->fwhm) : std::nullopt).c_str());
  return out;
}

JobOutput trajectory_job(const RunConfig& c, const std::filesystem::path& dir) {
  const TrajectoryJob& t = c.trajectory;
  const ModelSpec model = build_model(c.scheme, c.params, t.n_max);
  RngStream rng(t.seed, t.substream);
  const TrajectoryRecord rec = run_trajectory(model, t.options, rng);
  write_text(dir / "trajectory.csv", trajectory_csv(rec));
  write_json(dir / "events.json", events_json(model, rec));

  Json counts = Json::object();
  for (const Collapse& ch : model.collapses) counts[ch.name] = 0;
  for (const CollapseEvent& e : rec.events) {
    counts[model.collapses[e.channel].name] = counts[model.collapses[e.channel].name].get<int>() + 1;
  }
  JobOutput out;
  out.results = {{"dt", t.options.dt > 0.0 ? t.options.dt : default_time_step(model)},
                 {"records", rec.time.size()},
                 {"events", rec.events.size()},
                 {"event_counts", counts}};
  if (t.n_traj >= 100) {
    const EnsembleResult ens = ensemble_density(model, t.options, t.n_traj, t.seed);
    write_text(dir / "ensemble.csv", ensemble_csv(model, ens));
    out.results["ensemble_trajectories"] = t.n_traj;
  }
  out.summary = format_summary("trajectory %s seed=%llu records=%zu jumps=%zu",
                               std::string(to_string(c.scheme)).c_str(),
                               static_cast<unsigned long long>(t.seed), rec.time.size(),
                               rec.events.size());
  return out;
}

JobOutput sweep_job(const RunConfig& c, const std::filesystem::path& dir) {
  const SweepPlan plan = make_sweep_plan(c);
  const std::vector<SweepRow> rows = run_sweep(plan);
  write_text(dir / "sweep.csv", sweep_csv(rows));

  Json points = Json::array();
  int failures = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    Json p = {{"index", i}, {"value", r.value}, {"n_max", r.n_max}, {"status", r.status}};
    if (!r.error.empty()) p["error"] = r.error;
    if (r.spectrum) {
      char name[32];
      std::snprintf(name, sizeof name, "point_%03zu.csv", i);
      write_text(dir / "spectra" / name, spectrum_csv(*r.spectrum));
      p["spectrum"] = std::string("spectra/") + name;
      p["peaks"] = peaks_json(classify_peaks(*r.spectrum));
    }
    if (r.fit) p["fit"] = fit_json(*r.fit);
    if (r.n_max == 0) ++failures;
    points.push_back(std::move(p));
  }
  JobOutput out;
  out.results = {{"parameter", plan.parameter}, {"points", points}};
  out.summary = format_summary("sweep %s %s points=%zu failed=%d",
                               std::string(to_string(c.scheme)).c_str(), plan.parameter.c_str(),
                               rows.size(), failures);
  return out;
}

}  // namespace

JobOutput execute(const RunConfig& config, const std::filesystem::path& out_dir) {
  switch (config.job) {
    case JobKind::Steady: return steady_job(config, out_dir);
    case JobKind::Spectrum: return spectrum_job(config, out_dir);
    case JobKind::Trajectory: return trajectory_job(config, out_dir);
    case JobKind::Sweep: return sweep_job(config, out_dir);
  }
  throw ConfigError("unknown job");
}

int dispatch(JobKind job, std::string_view config_text, const std::filesystem::path& out_dir,
             std::optional<std::uint64_t> seed, std::ostream& out, std::ostream& err) {
  std::optional<RunConfig> config;
  auto fail = [&](std::string_view code, int exit_code, std::string_view message) {
    const Json e = error_json(code, exit_code, message);
    err << e.dump() << '\n';
    try {
      write_json(out_dir / "error.json", e);
    } catch (const Error&) {
      // the directory itself is unusable; stderr already has the report
    }
    return exit_code;
  };
  try {
    config = parse_config(config_text, job);
    if (seed) config->trajectory.seed = *seed;
    JobOutput result = execute(*config, out_dir);
    Json manifest = {{"tool", kToolName},
                     {"version", kToolVersion},
                     {"job", to_string(job)},
                     {"seed", config->trajectory.seed},
                     {"config", to_json(*config)},
                     {"config_text", to_config_text(*config)},
                     {"results", std::move(result.results)}};
    write_json(out_dir / "manifest.json", manifest);
    out << result.summary << '\n';
    return 0;
  } catch (const Error& e) {
    return fail(e.code(), e.exit_code(), e.what());
  } catch (const std::exception& e) {
    return fail("internal", static_cast<int>(ErrorKind::Numerical), e.what());
  }
}

}  // namespace satl
