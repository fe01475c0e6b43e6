#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "satl/artifacts.hpp"
#include "satl/config.hpp"
#include "satl/jobs.hpp"

using namespace satl;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("satl-dispatch-" + name);
  fs::remove_all(dir);
  return dir;
}

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(JobKind job, std::string_view text, const fs::path& dir,
        std::optional<std::uint64_t> seed = std::nullopt) {
  std::ostringstream out, err;
  Run r;
  r.code = dispatch(job, text, dir, seed, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

nlohmann::json read_json(const fs::path& path) { return nlohmann::json::parse(read_file(path)); }

constexpr std::string_view kFourLevelPoint =
    "[model]\nscheme = four-incoherent\ng = 10\nkappa = 0.1\ngamma_f = 2\nGamma = 10\n";

}  // namespace

TEST_CASE("steady job records the achieved truncation in the manifest") {
  const fs::path dir = fresh_dir("steady");
  const Run r = run(JobKind::Steady, kFourLevelPoint, dir);
  REQUIRE(r.code == 0);
  CHECK(r.err.empty());
  CHECK(r.out.find('\n') == r.out.size() - 1);
  CHECK(r.out.rfind("steady four-incoherent n_max=14", 0) == 0);

  const nlohmann::json m = read_json(dir / "manifest.json");
  CHECK(m["tool"] == "satl");
  CHECK(m["version"] == kToolVersion);
  CHECK(m["job"] == "steady");
  CHECK(m["results"]["n_max"] == 14);
  CHECK(m["results"]["mean_n"].get<double>() == doctest::Approx(2.60288).epsilon(1e-5));
  CHECK(m["results"]["top_sector_population"].get<double>() < 1e-4);
  CHECK(m["config"]["truncation"]["ceiling"] == 60);

  // the echoed config text reproduces the run
  const RunConfig again = parse_config(m["config_text"].get<std::string>(), JobKind::Steady);
  CHECK(nlohmann::json(to_json(again)) == m["config"]);
  CHECK_NOTHROW(check_schema(parse_csv(read_file(dir / "steady.csv")), CsvKind::Steady));
  CHECK_FALSE(fs::exists(dir / "error.json"));
}

TEST_CASE("error exits carry machine-readable JSON") {
  struct Case {
    const char* name;
    JobKind job;
    std::string text;
    int exit_code;
    const char* code;
  };
  const Case cases[] = {
      {"config", JobKind::Steady, "[model]\nscheme = three-incoherent\ng = 1\n", 1, "config-parse"},
      {"zero-signal", JobKind::Spectrum,
       "[model]\nscheme = three-incoherent\ng = 0\nkappa = 0.1\nGamma = 1\n", 2, "zero-signal"},
      {"truncation", JobKind::Steady, std::string(kFourLevelPoint) + "[truncation]\nceiling = 8\n", 3,
       "truncation-failure"},
      {"doublet", JobKind::Spectrum,
       "[model]\nscheme = three-incoherent\ng = 1.414\nkappa = 0.1\nGamma = 0.05\n[spectrum]\nfit = true\n",
       4, "doublet-detected"},
  };
  for (const Case& c : cases) {
    CAPTURE(c.name);
    const fs::path dir = fresh_dir(c.name);
    const Run r = run(c.job, c.text, dir);
    CHECK(r.code == c.exit_code);
    CHECK(r.out.empty());
    const nlohmann::json err = nlohmann::json::parse(r.err);
    CHECK(err["error"]["code"] == c.code);
    CHECK(err["error"]["exit_code"] == c.exit_code);
    CHECK(read_json(dir / "error.json") == err);
    CHECK_FALSE(fs::exists(dir / "manifest.json"));
  }
}

TEST_CASE("trajectory jobs are byte-identical under a fixed seed") {
  constexpr std::string_view text =
      "[model]\nscheme = three-incoherent\ng = 1.414\nkappa = 0.1\nGamma = 1\n"
      "[trajectory]\nt_final = 30\nrecord_stride = 20\nn_max = 5\nseed = 17\n";
  const fs::path a = fresh_dir("traj-a"), b = fresh_dir("traj-b"), c = fresh_dir("traj-c");
  REQUIRE(run(JobKind::Trajectory, text, a).code == 0);
  REQUIRE(run(JobKind::Trajectory, text, b).code == 0);
  REQUIRE(run(JobKind::Trajectory, text, c, 18).code == 0);
  CHECK(read_file(a / "trajectory.csv") == read_file(b / "trajectory.csv"));
  CHECK(read_file(a / "events.json") == read_file(b / "events.json"));
  CHECK(read_file(a / "manifest.json") == read_file(b / "manifest.json"));
  CHECK(read_file(a / "trajectory.csv") != read_file(c / "trajectory.csv"));
  CHECK(read_json(c / "manifest.json")["seed"] == 18);
  CHECK_NOTHROW(check_schema(parse_csv(read_file(a / "trajectory.csv")), CsvKind::Trajectory));
  CHECK_FALSE(fs::exists(a / "ensemble.csv"));

  // the manifest's config text replays the overridden seed
  const fs::path d = fresh_dir("traj-d");
  REQUIRE(run(JobKind::Trajectory, read_json(c / "manifest.json")["config_text"].get<std::string>(), d)
              .code == 0);
  CHECK(read_file(c / "trajectory.csv") == read_file(d / "trajectory.csv"));
}

TEST_CASE("trajectory ensemble output") {
  const fs::path dir = fresh_dir("ensemble");
  const Run r = run(JobKind::Trajectory,
                    "[model]\nscheme = three-incoherent\ng = 1\nkappa = 0.5\nGamma = 1\n"
                    "[trajectory]\nt_final = 2\nrecord_stride = 50\nn_max = 3\nn_traj = 100\n",
                    dir);
  REQUIRE(r.code == 0);
  CHECK_NOTHROW(check_schema(parse_csv(read_file(dir / "ensemble.csv")), CsvKind::Ensemble));
  CHECK(read_json(dir / "manifest.json")["results"]["ensemble_trajectories"] == 100);
}

TEST_CASE("spectrum and sweep jobs persist their tables") {
  const fs::path spec = fresh_dir("spectrum");
  const Run s = run(JobKind::Spectrum,
                    "[model]\nscheme = three-incoherent\ng = 1.414\nkappa = 0.1\nGamma = 2\n", spec);
  REQUIRE(s.code == 0);
  const nlohmann::json sm = read_json(spec / "manifest.json");
  CHECK(sm["results"]["peaks"].size() == 1);
  CHECK(sm["results"]["fit"]["fwhm"].get<double>() > 0.0);
  CHECK_NOTHROW(check_schema(parse_csv(read_file(spec / "spectrum.csv")), CsvKind::Spectrum));

  const fs::path sweep = fresh_dir("sweep");
  const Run w = run(JobKind::Sweep,
                    "[model]\nscheme = three-incoherent\ng = 0.6\nkappa = 0.1\n"
                    "[sweep]\nstart = 0.05\nstop = 100\npoints = 5\n",
                    sweep);
  REQUIRE(w.code == 0);
  const CsvTable table = parse_csv(read_file(sweep / "sweep.csv"));
  CHECK_NOTHROW(check_schema(table, CsvKind::Sweep));
  CHECK(table.rows.size() == 5);
  for (int i = 0; i < 5; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "point_%03d.csv", i);
    CHECK(fs::exists(sweep / "spectra" / name));
  }
}
