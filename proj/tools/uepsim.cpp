#include <cstdint>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "uep/commands.hpp"
#include "uep/config.hpp"
#include "uep/errors.hpp"
#include "uep/version.hpp"

namespace {

using CommandFn = void (*)(const uep::KeyValueConfig&, std::uint64_t,
                           const std::string&);

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_path;
  CommandFn fn = nullptr;
  const char* default_out = nullptr;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(uep::kToolName) +
               " - two-class OFDM link adaptation simulator"};
  app.set_version_flag("--version",
                       std::string(uep::kToolName) + " " + uep::kToolVersion);
  app.require_subcommand(1);

  const std::map<std::string, std::pair<CommandFn, const char*>> commands = {
      {"ber-sweep", {uep::cmd_ber_sweep, "ber_sweep.csv"}},
      {"rho-sweep", {uep::cmd_rho_sweep, "rho_sweep.csv"}},
      {"eesm-calibrate", {uep::cmd_eesm_calibrate, "eesm_calibrate.csv"}},
      {"analytic", {uep::cmd_analytic, "analytic.csv"}},
      {"adapt-trace", {uep::cmd_adapt_trace, "adapt_trace.csv"}},
  };

  std::map<std::string, Subcommand> subs;
  for (const auto& [name, entry] : commands) {
    Subcommand& sub = subs[name];
    sub.fn = entry.first;
    sub.default_out = entry.second;
    sub.app = app.add_subcommand(name);
    sub.app->add_option("--config", sub.config_path, "configuration file")
        ->required();
    sub.app->add_option("--seed", sub.seed,
                        "random seed (overrides run.seed; default 1)");
    sub.app->add_option("--out", sub.out_path,
                        "output path (overrides run.out)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // a bad command line is a configuration error
  }

  for (const auto& [name, sub] : subs) {
    if (!sub.app->parsed()) continue;
    try {
      const uep::KeyValueConfig cfg =
          uep::KeyValueConfig::parse_file(sub.config_path);
      // Flag > config > default. The run.* keys are read unconditionally so
      // they count as consumed even when a flag overrides them.
      const std::uint64_t config_seed =
          static_cast<std::uint64_t>(cfg.get_int_or("run.seed", 1));
      const std::string config_out =
          cfg.get_string_or("run.out", sub.default_out);
      const std::uint64_t seed =
          sub.app->count("--seed") > 0 ? sub.seed : config_seed;
      const std::string out =
          sub.app->count("--out") > 0 ? sub.out_path : config_out;
      sub.fn(cfg, seed, out);
      std::fprintf(stderr, "%s: wrote %s\n", name.c_str(), out.c_str());
      return 0;
    } catch (const uep::ConfigError& e) {
      std::fprintf(stderr, "%s: config error: %s\n", name.c_str(), e.what());
      return 2;
    } catch (const uep::IoError& e) {
      std::fprintf(stderr, "%s: i/o error: %s\n", name.c_str(), e.what());
      return 4;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "%s: error: %s\n", name.c_str(), e.what());
      return 3;
    }
  }
  return 2;  // unreachable: require_subcommand(1) guarantees a match
}
