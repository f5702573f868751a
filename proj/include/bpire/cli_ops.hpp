#pragma once

#include <string>

#include "bpire/config.hpp"
#include "bpire/io.hpp"

namespace bpire {

// One function per CLI command, writing the documented artifacts into
// `out_dir`. The verify runner reuses these so CLI outputs and acceptance
// checks exercise the same code paths.

struct CommandOutcome {
  int exit_code = 0;        // 0 ok, 2 undecided certificate
  std::string message;
};

CommandOutcome run_classify(const ExperimentConfig& cfg,
                            const std::string& out_dir);
CommandOutcome run_kernel(const ExperimentConfig& cfg,
                          const std::string& out_dir);
CommandOutcome run_tail(const ExperimentConfig& cfg,
                        const std::string& out_dir);
CommandOutcome run_simulate(const ExperimentConfig& cfg,
                            const std::string& out_dir);
CommandOutcome run_report(const ExperimentConfig& cfg,
                          const std::string& out_dir);

// Builds the kernel series per the config's mode: "exact" enumerates (and
// fails over budget), "mc" uses the tilted estimator, "auto" picks exact
// when the budget allows.
KernelSeries kernel_for_config(const ExperimentConfig& cfg,
                               const Regime& regime, int n_max);

}  // namespace bpire
