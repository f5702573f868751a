#pragma once

#include <string>

#include <json.hpp>

#include "bpire/config.hpp"
#include "bpire/env.hpp"
#include "bpire/harmonic.hpp"
#include "bpire/kernel.hpp"
#include "bpire/sim.hpp"
#include "bpire/tail.hpp"

namespace bpire {

inline constexpr const char* kVersion = "0.1.0";

// Provenance block embedded in every artifact: config hash, seed, worker
// count and module versions.
struct RunMeta {
  std::string config_hash;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

nlohmann::json meta_to_json(const RunMeta& meta);
std::string meta_csv_comment(const RunMeta& meta);

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const nlohmann::json& j,
                     const RunMeta& meta);

std::string kernel_csv(const KernelSeries& ks, const RunMeta& meta);
std::string survival_csv(const SurvivalCurve& curve, const RunMeta& meta);
std::string samples_csv(const std::vector<LifePeriodSample>& samples,
                        const RunMeta& meta);

nlohmann::json regime_to_json(const Regime& regime);
nlohmann::json certificate_to_json(const RootCertificate& cert);
nlohmann::json fit_to_json(const FitResult& fit);
nlohmann::json renewal_to_json(const RenewalEstimate& est);

}  // namespace bpire
