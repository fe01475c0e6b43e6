#include <doctest.h>

#include <string>

#include "satl/config.hpp"
#include "satl/error.hpp"
#include "support.hpp"

using namespace satl;

namespace {

/// Message of the ConfigError raised by parsing, or "" if parsing succeeds.
std::string parse_error(std::string_view text, JobKind job = JobKind::Steady) {
  try {
    parse_config(text, job);
  } catch (const ConfigError& e) {
    CHECK(e.code() == "config-parse");
    CHECK(e.exit_code() == 1);
    return e.what();
  }
  return "";
}

constexpr std::string_view kMinimal =
    "[model]\n"
    "scheme = three-incoherent\n"
    "g = 0.6\n"
    "kappa = 0.1\n"
    "Gamma = 1\n";

}  // namespace

TEST_CASE("minimal config applies and echoes defaults") {
  const RunConfig c = parse_config(kMinimal, JobKind::Steady);
  CHECK(c.job == JobKind::Steady);
  CHECK(c.scheme == Scheme::ThreeLevelIncoherent);
  CHECK(c.params.g == 0.6);
  CHECK(c.params.kappa == 0.1);
  CHECK(c.params.gamma == 1.0);
  CHECK(c.params.Gamma == 1.0);
  CHECK(c.n_max_start == 4);
  CHECK(c.truncation.ceiling == 60);
  CHECK(c.truncation.step == 2);
  CHECK(c.truncation.threshold == 1e-4);

  const nlohmann::ordered_json j = to_json(c);
  CHECK(j["job"] == "steady");
  CHECK(j["model"]["scheme"] == "three-incoherent");
  CHECK(j["truncation"]["n_max_start"] == 4);
  CHECK(j["truncation"]["ceiling"] == 60);
  CHECK(j["spectrum"]["points"] == 2001);
  CHECK(j["spectrum"]["omega_min"].is_null());
  CHECK(j["spectrum"]["fit"] == "auto");
  CHECK(j["spectrum"]["mode"] == "auto");
  CHECK(j["trajectory"]["n_traj"] == 1);
  CHECK(j["trajectory"]["seed"] == 0);
  CHECK(j["sweep"]["parameter"] == "Gamma");
  CHECK(j["sweep"]["spacing"] == "log");
}

TEST_CASE("comments, blank lines and whitespace") {
  const RunConfig c = parse_config(
      "# header comment\n\n  [ model ]  \nscheme=four-incoherent # trailing\n g =10\nkappa= 0.1\n"
      "gamma_f = 2\nGamma = 10\n\n[spectrum]\nfit = false\nmode = reduced\n",
      JobKind::Spectrum);
  CHECK(c.scheme == Scheme::FourLevelIncoherent);
  CHECK(c.params.g == 10.0);
  CHECK(c.spectrum.fit == FitPolicy::Never);
  CHECK(c.spectrum.mode == SolveMode::Reduced);
}

TEST_CASE("parse errors name the line and the key") {
  std::string msg = parse_error("[model]\nscheme = three-incoherent\ng = 0.6\nkappa = -0.1\nGamma = 1\n");
  CHECK(msg.find("line 4") != std::string::npos);
  CHECK(msg.find("kappa") != std::string::npos);

  msg = parse_error(std::string(kMinimal) + "colour = blue\n");
  CHECK(msg.find("line 6") != std::string::npos);
  CHECK(msg.find("unknown key 'colour'") != std::string::npos);

  msg = parse_error("[model]\nscheme = three-incoherent\ng = 0.6\nGamma = 1\n");
  CHECK(msg.find("missing required key 'kappa'") != std::string::npos);
  CHECK(msg.find("line ") == 0);

  msg = parse_error("[model]\nscheme = three-incoherent\ng = strong\nkappa = 0.1\nGamma = 1\n");
  CHECK(msg.find("line 3") != std::string::npos);
  CHECK(msg.find("expects a finite number") != std::string::npos);

  msg = parse_error(std::string(kMinimal) + "[truncation]\nceiling = 12.5\n");
  CHECK(msg.find("line 7") != std::string::npos);
  CHECK(msg.find("expects an integer") != std::string::npos);

  CHECK(parse_error("g = 1\n").find("before any section") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "[optics]\n").find("unknown section") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "g = 0.7\n").find("duplicate key") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "[model]\n").find("duplicate section") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "[spectrum\n").find("malformed section") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "gamma_f = 2\n").find("does not apply") != std::string::npos);
  CHECK(parse_error("[model]\nscheme = five-level\n").find("unknown scheme") != std::string::npos);
  CHECK(parse_error("[model]\nscheme = four-incoherent\ng = 1\nkappa = 0.1\nGamma = 1\n")
            .find("'gamma_f'") != std::string::npos);
  CHECK(parse_error("[model]\nscheme = four-coherent\ng = 1\nkappa = 0.1\ngamma_f = 2\nE_pump = 1\n")
            .find("'gamma_4'") != std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "[spectrum]\nomega_min = -3\n").find("together") !=
        std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "[spectrum]\nfit = maybe\n").find("'fit'") !=
        std::string::npos);
  CHECK(parse_error(std::string(kMinimal) + "[trajectory]\nn_traj = 50\n").find("n_traj") !=
        std::string::npos);
  CHECK(parse_error("[model]\nscheme = four-coherent\ng = 1\nkappa = 0.1\ngamma_f = 2\ngamma_4 = 2\n"
                    "E_pump = 1\n[spectrum]\nmode = reduced\n")
            .find("reduced") != std::string::npos);
}

TEST_CASE("sweep configs") {
  constexpr std::string_view text =
      "[model]\nscheme = three-incoherent\ng = 0.6\nkappa = 0.1\n"
      "[sweep]\nstart = 0.05\nstop = 100\npoints = 40\nspacing = log\n";
  const RunConfig c = parse_config(text, JobKind::Sweep);
  const SweepPlan plan = make_sweep_plan(c);
  CHECK(plan.parameter == "Gamma");
  REQUIRE(plan.values.size() == 40);
  CHECK(plan.values.front() == 0.05);
  CHECK(plan.values.back() == 100.0);
  for (std::size_t i = 1; i < plan.values.size(); ++i) CHECK(plan.values[i] > plan.values[i - 1]);

  // the pump is the swept quantity, so fixing it is a contradiction
  CHECK(parse_error("[model]\nscheme = three-incoherent\ng = 0.6\nkappa = 0.1\nGamma = 1\n"
                    "[sweep]\nstart = 0.05\nstop = 100\npoints = 4\n",
                    JobKind::Sweep)
            .find("swept") != std::string::npos);
  CHECK(parse_error("[model]\nscheme = three-incoherent\ng = 0.6\nkappa = 0.1\n"
                    "[sweep]\nparameter = g\nstart = 0.05\nstop = 100\npoints = 4\n",
                    JobKind::Sweep)
            .find("sweeps 'Gamma'") != std::string::npos);
  CHECK(parse_error("[model]\nscheme = three-incoherent\ng = 0.6\nkappa = 0.1\n"
                    "[sweep]\nstart = 0.05\npoints = 4\n",
                    JobKind::Sweep)
            .find("'stop'") != std::string::npos);
  CHECK(parse_error("[model]\nscheme = three-incoherent\ng = 0.6\nkappa = 0.1\n"
                    "[sweep]\nstart = 0\nstop = 100\npoints = 4\n",
                    JobKind::Sweep)
            .find("start > 0") != std::string::npos);

  const RunConfig coherent = parse_config(
      "[model]\nscheme = four-coherent\ng = 1\nkappa = 0.1\ngamma_f = 2\ngamma_4 = 2\n"
      "[sweep]\nstart = 0.1\nstop = 10\npoints = 3\nspacing = linear\n",
      JobKind::Sweep);
  const SweepPlan cp = make_sweep_plan(coherent);
  CHECK(cp.parameter == "E_pump");
  CHECK(cp.values == std::vector<double>{0.1, 5.05, 10.0});
}

TEST_CASE("job names") {
  for (JobKind job : {JobKind::Steady, JobKind::Spectrum, JobKind::Trajectory, JobKind::Sweep}) {
    CHECK(parse_job(to_string(job)) == job);
  }
  CHECK_THROWS_AS(parse_job("relax"), ConfigError);
}

TEST_CASE("config text round-trips for random configs") {
  test::Rng rng(31337);
  const Scheme schemes[] = {Scheme::ThreeLevelIncoherent, Scheme::FourLevelIncoherent,
                            Scheme::FourLevelCoherent};
  const JobKind jobs[] = {JobKind::Steady, JobKind::Spectrum, JobKind::Trajectory, JobKind::Sweep};
  for (int draw = 0; draw < 60; ++draw) {
    RunConfig c;
    c.job = jobs[draw % 4];
    c.scheme = schemes[(draw / 4) % 3];
    c.params = test::random_params(rng, c.scheme);
    c.params.gamma = test::uniform(rng, 0.5, 2.0);
    if (c.job == JobKind::Sweep) (c.scheme == Scheme::FourLevelCoherent ? c.params.E_pump : c.params.Gamma) = 0.0;
    c.n_max_start = 1 + static_cast<int>(rng() % 6);
    c.truncation.ceiling = c.n_max_start + static_cast<int>(rng() % 40);
    c.truncation.step = 1 + static_cast<int>(rng() % 3);
    c.truncation.threshold = test::log_uniform(rng, 1e-8, 1e-2);
    if (rng() % 2) {
      c.spectrum.omega_min = -test::uniform(rng, 0.1, 20.0);
      c.spectrum.omega_max = test::uniform(rng, 0.1, 20.0);
    }
    c.spectrum.points = 2 + static_cast<int>(rng() % 5000);
    c.spectrum.fit = static_cast<FitPolicy>(rng() % 3);
    if (c.scheme != Scheme::FourLevelCoherent) c.spectrum.mode = static_cast<SolveMode>(rng() % 4);
    TrajectoryJob& t = c.trajectory;
    t.options.dt = (rng() % 2) ? 0.0 : test::log_uniform(rng, 1e-5, 1e-2);
    t.options.t_final = test::uniform(rng, 0.1, 100.0);
    t.options.record_stride = 1 + static_cast<int>(rng() % 100);
    t.n_max = 1 + static_cast<int>(rng() % 10);
    t.options.initial_level = 1 + static_cast<int>(rng() % atomic_levels(c.scheme));
    t.options.initial_photons = static_cast<int>(rng() % (t.n_max + 1));
    t.n_traj = (rng() % 2) ? 1 : 100 + static_cast<int>(rng() % 5000);
    t.seed = rng();
    t.substream = rng() % 1000;
    c.sweep.parameter = c.scheme == Scheme::FourLevelCoherent ? "E_pump" : "Gamma";
    c.sweep.start = test::log_uniform(rng, 0.01, 1.0);
    c.sweep.stop = c.sweep.start * test::uniform(rng, 2.0, 1e4);
    c.sweep.points = static_cast<int>(rng() % 50);
    c.sweep.spacing = (rng() % 2) ? GridSpacing::Log : GridSpacing::Linear;
    c.sweep.spectra = rng() % 2;
    c.sweep.linewidth = rng() % 2;

    const std::string text = to_config_text(c);
    const RunConfig back = parse_config(text, c.job);
    CHECK(to_json(back) == to_json(c));
    CHECK(to_config_text(back) == text);
  }
}
