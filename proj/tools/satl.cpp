#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "satl/artifacts.hpp"
#include "satl/jobs.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Single-atom laser steady states, spectra, trajectories and sweeps"};
  app.set_version_flag("--version", std::string(satl::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "satl-out";
  int threads = 0;
  std::optional<std::uint64_t> seed;

  for (const char* name : {"steady", "spectrum", "trajectory", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "key = value config file")->required();
    sub->add_option("--out", out_dir, "artifact directory");
    sub->add_option("--threads", threads, "worker threads (default: all cores)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--seed", seed, "trajectory seed, overrides the config");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#endif

  const std::string job_name = app.get_subcommands().front()->get_name();
  std::ifstream in(config_path, std::ios::binary);
  if (!in) {
    const auto e = satl::error_json("config-missing", 1, "cannot read " + config_path);
    std::cerr << e.dump() << '\n';
    return 1;
  }
  std::ostringstream text;
  text << in.rdbuf();
  return satl::dispatch(satl::parse_job(job_name), text.str(), out_dir, seed, std::cout,
                        std::cerr);
}
