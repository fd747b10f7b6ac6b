#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uep/config.hpp"
#include "uep/eesm.hpp"

namespace uep {

// Built-in scheme set the config refers to by name. Betas are the shipped
// calibration results for the default OFDM geometry (see README); per-run
// ladder thresholds are always derived from freshly generated AWGN tables.
const std::vector<McsProfile>& builtin_mcs();

// Resolves a scheme name against builtin_mcs(); throws ConfigError listing
// the known names when it does not resolve.
McsProfile find_mcs(const std::string& name);

// Experiment commands. Each reads every parameter it understands from cfg,
// rejects anything left over (typo safety), runs deterministically from the
// seed, and writes its output file(s) rooted at out_path. All emitted text
// is LF-terminated UTF-8 with a comment block recording tool version, seed,
// and config hash, so identical (config, seed) reruns are byte-identical.
void cmd_ber_sweep(const KeyValueConfig& cfg, std::uint64_t seed,
                   const std::string& out_path);
void cmd_rho_sweep(const KeyValueConfig& cfg, std::uint64_t seed,
                   const std::string& out_path);
void cmd_eesm_calibrate(const KeyValueConfig& cfg, std::uint64_t seed,
                        const std::string& out_path);
void cmd_analytic(const KeyValueConfig& cfg, std::uint64_t seed,
                  const std::string& out_path);
void cmd_adapt_trace(const KeyValueConfig& cfg, std::uint64_t seed,
                     const std::string& out_path);

}  // namespace uep
