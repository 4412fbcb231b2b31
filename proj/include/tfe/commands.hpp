#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tfe/io.hpp"

namespace tfe {

// Each command writes its files under cfg.out_dir and a short summary to log.
// Errors propagate as tfe::Error; config problems have kind ConfigError.
void cmd_kernel(const RunConfig& cfg, std::ostream& log);
// strict: residual above resid_tol is a numerical failure
void cmd_spectrum(const RunConfig& cfg, bool strict, std::ostream& log);
void cmd_evolve(const RunConfig& cfg, std::ostream& log);
void cmd_branch(const RunConfig& cfg, bool strict, std::ostream& log);
void cmd_continue(const RunConfig& cfg, std::ostream& log);
void cmd_diagnose(const RunConfig& cfg, std::ostream& log);

// 0 ok, 2 numerical failure, 3 config error
int exit_code(const std::exception& e);

// the kernel order a command needs for kmax
int table_order(const RunConfig& cfg);

}  // namespace tfe
