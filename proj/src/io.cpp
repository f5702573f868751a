#include "bpire/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace bpire {

using nlohmann::json;

namespace {

// Shortest decimal round-trip formatting keeps the CSV artifacts
// byte-stable across runs.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json versions_json() {
  json v;
  for (const char* mod :
       {"laws", "env", "kernel", "tail", "sim", "harmonic", "cli"})
    v[mod] = kVersion;
  return v;
}

std::string versions_flat() {
  return std::string("laws,env,kernel,tail,sim,harmonic,cli=") + kVersion;
}

}  // namespace

json meta_to_json(const RunMeta& meta) {
  json j;
  j["config_hash"] = meta.config_hash;
  j["seed"] = meta.seed;
  j["workers"] = meta.workers;
  j["versions"] = versions_json();
  return j;
}

std::string meta_csv_comment(const RunMeta& meta) {
  std::ostringstream os;
  os << "# config_hash=" << meta.config_hash << " seed=" << meta.seed
     << " workers=" << meta.workers << " versions=" << versions_flat() << "\n";
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

void write_json_file(const std::string& path, const json& j,
                     const RunMeta& meta) {
  json full = j;
  full["meta"] = meta_to_json(meta);
  write_text_file(path, full.dump(2) + "\n");
}

std::string kernel_csv(const KernelSeries& ks, const RunMeta& meta) {
  std::ostringstream os;
  os << meta_csv_comment(meta);
  os << "# gamma=" << fmt(ks.gamma) << " delta=" << fmt(ks.delta)
     << " tail_const=" << fmt(ks.tail_const)
     << " tail_const_star=" << fmt(ks.tail_const_star) << "\n";
  os << "n,H,H_se,Hstar,Hstar_se,method\n";
  for (int n = 0; n <= ks.max_n(); ++n) {
    const auto& h = ks.H[static_cast<std::size_t>(n)];
    const auto& hs = ks.Hstar[static_cast<std::size_t>(n)];
    os << n << "," << fmt(h.value) << "," << fmt(h.se) << ",";
    if (n == 0)
      os << ",";
    else
      os << fmt(hs.value) << "," << fmt(hs.se);
    os << "," << to_string(h.method) << "\n";
  }
  return os.str();
}

std::string survival_csv(const SurvivalCurve& curve, const RunMeta& meta) {
  std::ostringstream os;
  os << meta_csv_comment(meta);
  os << "n,R,half_width,provenance\n";
  for (const auto& p : curve.points)
    os << p.n << "," << fmt(p.value) << "," << fmt(p.half_width) << ","
       << to_string(p.provenance) << "\n";
  return os.str();
}

std::string samples_csv(const std::vector<LifePeriodSample>& samples,
                        const RunMeta& meta) {
  std::ostringstream os;
  os << meta_csv_comment(meta);
  os << "zeta,censored,peak\n";
  for (const auto& s : samples)
    os << s.zeta << "," << (s.censored ? 1 : 0) << "," << s.peak << "\n";
  return os.str();
}

json regime_to_json(const Regime& regime) {
  json j;
  j["kind"] = to_string(regime.kind);
  if (regime.beta) j["beta"] = *regime.beta;
  j["delta"] = regime.delta;
  j["gamma"] = regime.gamma;
  j["mean_x"] = regime.mean_x;
  json flags;
  flags["a2"] = {{"status", regime.flags.a2_status},
                 {"lattice", regime.flags.lattice},
                 {"span", regime.flags.span}};
  flags["a3"] = {{"status", regime.flags.a3_status},
                 {"a", regime.flags.a},
                 {"log_theta_mean", regime.flags.a3_log_theta},
                 {"log_theta_pow_mean", regime.flags.a3_log_theta_pow}};
  flags["a4"] = {{"status", regime.flags.a4_status}};
  if (std::isfinite(regime.flags.a4_value))
    flags["a4"]["value"] = regime.flags.a4_value;
  flags["tilted_measure"] = regime.flags.tilted_measure;
  j["flags"] = flags;
  return j;
}

json certificate_to_json(const RootCertificate& cert) {
  json j;
  j["case"] = to_string(cert.kind);
  if (cert.kind == RootCase::Case1) {
    j["r"] = cert.r;
    j["bracket"] = {cert.bracket_lo, cert.bracket_hi};
    j["width_target_met"] = cert.width_target_met;
    j["t_residual_bound"] = cert.t_residual_bound;
  } else {
    j["r"] = nullptr;
  }
  json t1;
  t1["estimate"] = cert.t1_estimate;
  t1["lower"] = cert.t1_lower;
  if (cert.t1_upper_finite)
    t1["upper"] = cert.t1_upper;
  else
    t1["upper"] = nullptr;  // geometric bound diverges at the series radius
  j["t1"] = t1;
  return j;
}

json fit_to_json(const FitResult& fit) {
  json j;
  j["model"] = to_string(fit.model);
  j["rate"] = fit.rate;
  j["power"] = fit.power;
  j["prefactor"] = fit.prefactor;
  j["window"] = {fit.n_lo, fit.n_hi};
  j["residual_rms"] = fit.residual_rms;
  return j;
}

json renewal_to_json(const RenewalEstimate& est) {
  json j;
  j["x"] = est.x;
  j["U"] = est.value;
  j["se"] = est.se;
  j["cap_hits"] = est.cap_hit_fraction;
  return j;
}

}  // namespace bpire
