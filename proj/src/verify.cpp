#include "bpire/verify.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bpire/builtin.hpp"
#include "bpire/cli_ops.hpp"
#include "bpire/config.hpp"
#include "bpire/harmonic.hpp"
#include "bpire/kernel.hpp"
#include "bpire/sim.hpp"
#include "bpire/tail.hpp"

namespace bpire {

namespace fs = std::filesystem;

namespace {

class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) {
      ++passed_;
    } else {
      failures_.push_back(what);
    }
  }

  void expect_close(double got, double want, double tol,
                    const std::string& what) {
    std::ostringstream os;
    os << what << ": got " << got << ", want " << want << " +/- " << tol;
    expect(std::abs(got - want) <= tol, os.str());
  }

  bool pass() const { return failures_.empty(); }

  std::string detail(const std::string& ok_note) const {
    if (failures_.empty()) return ok_note;
    std::ostringstream os;
    for (std::size_t i = 0; i < failures_.size(); ++i) {
      if (i) os << " | ";
      os << failures_[i];
    }
    return os.str();
  }

 private:
  int passed_ = 0;
  std::vector<std::string> failures_;
};

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

// shared: recurrence-vs-simulation agreement on a built-in env
void oracle_check(Checker& ck, const std::string& env_name, int max_n,
                  std::uint64_t trajectories, const VerifyOptions& opt,
                  SurvivalCurve* rec_out = nullptr,
                  SurvivalCurve* emp_out = nullptr) {
  const EnvModel env = builtin_env(env_name);
  const Regime regime = classify(env);
  const KernelSeries ks = kernel_exact(env, regime, max_n - 1);
  const SurvivalCurve rec = survival_from_kernel(ks, r1(env), max_n);

  SimOptions sopt;
  sopt.trajectories = trajectories;
  sopt.cap = 10000;
  sopt.seed = opt.seed;
  sopt.workers = opt.workers;
  const auto samples = simulate_many(env, sopt);
  const SurvivalCurve emp = empirical_survival(samples, max_n);

  for (int n = 1; n <= max_n; ++n) {
    const auto& a = rec.at(n);
    const auto& b = emp.at(n);
    std::ostringstream os;
    os << env_name << " n=" << n << ": |recurrence - empirical| = "
       << std::abs(a.value - b.value) << " > " << a.half_width + b.half_width;
    ck.expect(std::abs(a.value - b.value) <= a.half_width + b.half_width,
              os.str());
  }

  std::uint64_t censored = 0;
  for (const auto& s : samples)
    if (s.censored) ++censored;
  ck.expect(static_cast<double>(censored) <=
                1e-5 * static_cast<double>(trajectories),
            env_name + ": censoring rate above 1e-5 at cap 10000");

  if (rec_out) *rec_out = rec;
  if (emp_out) *emp_out = emp;
}

CriterionResult criterion1(const VerifyOptions& opt) {
  Timer timer;
  Checker ck;
  SurvivalCurve rec, emp;
  oracle_check(ck, "D1", 12, 1000000, opt, &rec, &emp);
  ck.expect_close(rec.at(1).value, 0.448440, 0.0015, "D1 recurrence R1");
  ck.expect_close(emp.at(1).value, 0.448440, 0.0015, "D1 empirical R1");
  ck.expect_close(rec.at(2).value, 0.278018, 0.0014, "D1 recurrence R2");
  ck.expect_close(emp.at(2).value, 0.278018, 0.0014, "D1 empirical R2");
  return {1, "life-period oracle on D1 (exact kernel vs 1e6 trajectories)",
          ck.pass(), ck.detail("recurrence and simulation agree at 3 sigma, n <= 12"),
          timer.seconds()};
}

CriterionResult criterion2(const VerifyOptions& opt) {
  Timer timer;
  Checker ck;
  oracle_check(ck, "E_weak", 12, 1000000, opt);
  return {2, "life-period oracle on E_weak (exact kernel vs 1e6 trajectories)",
          ck.pass(), ck.detail("recurrence and simulation agree at 3 sigma, n <= 12"),
          timer.seconds()};
}

KernelSeries synthetic_geometric_kernel(int n_max) {
  KernelSeries ks;
  ks.gamma = 0.5;
  ks.delta = 1.0;
  ks.tail_const = 0.5;
  ks.tail_const_star = 0.0;
  for (int n = 0; n <= n_max; ++n) {
    ks.H.push_back({0.5 * std::pow(0.5, n + 1), 0.0, KernelMethod::Exact});
    ks.Hstar.push_back({0.0, 0.0, KernelMethod::Exact});
  }
  return ks;
}

CriterionResult criterion3(const VerifyOptions&) {
  Timer timer;
  Checker ck;
  const KernelSeries ks = synthetic_geometric_kernel(80);
  const SurvivalCurve curve = survival_from_kernel(ks, 0.5, 50);
  ck.expect_close(curve.at(1).value, 0.5, 0.0, "synthetic R1");
  for (int n = 2; n <= 50; ++n) {
    const double want = 0.125 * std::pow(0.75, n - 2);
    std::ostringstream os;
    os << "synthetic R_" << n;
    ck.expect(std::abs(curve.at(n).value - want) <= 1e-12, os.str());
  }

  const RootCertificate cert = find_root(ks, 1e-12);
  ck.expect(cert.kind == RootCase::Case1, "synthetic kernel: expected case1");
  ck.expect_close(cert.r, 4.0 / 3.0, 1e-9, "synthetic root r");
  ck.expect(cert.bracket_hi - cert.bracket_lo <= 1e-9 * cert.r,
            "synthetic root bracket width above 1e-9 relative");

  const double c = case1_constant(ks, 0.5, cert.r);
  ck.expect_close(c, 8.0 / 27.0, 1e-9, "case-1 prefactor");

  for (int n = 2; n <= 50; ++n) {
    const double asym = c * std::pow(cert.r, -(n + 1));
    const double want = 0.125 * std::pow(0.75, n - 2);
    std::ostringstream os;
    os << "case-1 formula at n=" << n << ": rel err "
       << std::abs(asym - want) / want;
    ck.expect(std::abs(asym - want) <= 1e-9 * want, os.str());
  }
  return {3, "synthetic geometric kernel: recurrence, certified root, prefactor",
          ck.pass(), ck.detail("closed forms reproduced to stated tolerances"),
          timer.seconds()};
}

CriterionResult criterion4(const VerifyOptions&) {
  Timer timer;
  Checker ck;

  const EnvModel weak = builtin_env("E_weak");
  const Regime rw = classify(weak);
  ck.expect(rw.kind == RegimeKind::Weakly, "E_weak: expected weakly");
  ck.expect(rw.beta.has_value(), "E_weak: beta missing");
  if (rw.beta)
    ck.expect_close(*rw.beta, 0.5 * std::log(7.0 / 3.0), 1e-10, "E_weak beta");
  ck.expect_close(rw.gamma, 2.0 * std::sqrt(0.21), 1e-10, "E_weak gamma");

  const EnvModel inter = builtin_env("E_inter");
  const Regime ri = classify(inter);
  ck.expect(ri.kind == RegimeKind::Intermediate, "E_inter: expected intermediate");
  ck.expect_close(ri.gamma, 1.0 / std::cosh(1.0), 1e-10, "E_inter gamma");

  const EnvModel strong = builtin_env("E_strong2");
  const Regime rs = classify(strong);
  ck.expect(rs.kind == RegimeKind::Strongly, "E_strong2: expected strongly");
  ck.expect_close(rs.gamma, 0.66, 1e-12, "E_strong2 gamma");

  const EnvModel tilted = tilt(weak, rw.delta);
  ck.expect_close(tilted.mean_x(), 0.0, 1e-12, "E_weak tilted E[X]");
  ck.expect_close(tilted.probs[0], 0.5, 1e-12, "E_weak tilted P(+1)");
  return {4, "regime classification closed forms (beta, gamma, tilt)",
          ck.pass(), ck.detail("beta, gamma, and tilted probabilities exact"),
          timer.seconds()};
}

CriterionResult criterion5(const VerifyOptions& opt) {
  Timer timer;
  Checker ck;

  const EnvModel d1 = builtin_env("D1");
  const Regime rd = classify(d1);
  const KernelSeries exact_d1 = kernel_exact(d1, rd, 8);
  McOptions mco;
  mco.samples = 1000;
  mco.seed = opt.seed;
  mco.workers = opt.workers;
  for (int n = 0; n <= 8; ++n) {
    const KernelMcResult mc = kernel_mc(d1, rd, n, KernelMethod::McTilted, mco);
    std::ostringstream os;
    os << "D1 tilted mc at n=" << n;
    ck.expect(std::abs(mc.h.value -
                       exact_d1.H[static_cast<std::size_t>(n)].value) <= 1e-12,
              os.str() + ": value differs from exact beyond 1e-12");
    ck.expect(mc.h.se <= 1e-12, os.str() + ": variance not zero");
  }

  const EnvModel weak = builtin_env("E_weak");
  const Regime rw = classify(weak);
  const KernelSeries exact_w = kernel_exact(weak, rw, 10);
  McOptions mcw;
  mcw.samples = 100000;
  mcw.seed = opt.seed;
  mcw.workers = opt.workers;
  const KernelMcResult tiltedw =
      kernel_mc(weak, rw, 10, KernelMethod::McTilted, mcw);
  const KernelMcResult directw =
      kernel_mc(weak, rw, 10, KernelMethod::McDirect, mcw);
  const double exact_h10 = exact_w.H[10].value;
  {
    std::ostringstream os;
    os << "E_weak tilted mc n=10: |" << tiltedw.h.value << " - " << exact_h10
       << "| > 3*SE = " << 3.0 * tiltedw.h.se;
    ck.expect(std::abs(tiltedw.h.value - exact_h10) <= 3.0 * tiltedw.h.se,
              os.str());
  }
  {
    std::ostringstream os;
    os << "E_weak n=10: tilted SE " << tiltedw.h.se << " not below direct SE "
       << directw.h.se;
    ck.expect(tiltedw.h.se < directw.h.se, os.str());
  }
  return {5, "change-of-measure estimator (zero variance on D1, variance win on E_weak)",
          ck.pass(), ck.detail("tilted estimator exact on D1 and tighter than direct on E_weak"),
          timer.seconds()};
}

CriterionResult criterion6(const VerifyOptions& opt) {
  Timer timer;
  Checker ck;
  const EnvModel env = builtin_env("E_strong2");
  const Regime regime = classify(env);
  McOptions mco;
  mco.samples = 1000000;
  mco.seed = opt.seed;
  mco.workers = opt.workers;
  const KernelSeries ks =
      kernel_mc_series(env, regime, 59, KernelMethod::McTilted, mco);
  const SurvivalCurve curve = survival_from_kernel(ks, r1(env), 60);
  const FitResult fit = decay_fit(curve, FitModel::PureExponential,
                                  std::make_pair(20, 60), std::nullopt);
  const RootCertificate cert = find_root(ks);
  ck.expect(cert.kind == RootCase::Case1, "E_strong2: expected case1 root");
  const double want_rate = 1.0 / cert.r;
  std::ostringstream os;
  os << "E_strong2 rate: fitted " << fit.rate << " vs 1/r " << want_rate
     << " (rel err " << std::abs(fit.rate - want_rate) / want_rate << ")";
  ck.expect(std::abs(fit.rate - want_rate) <= 0.02 * want_rate, os.str());
  return {6, "case-1 decay rate on E_strong2 (tilted-MC kernel vs certified root)",
          ck.pass(), ck.detail("fitted rate within 2% of the certified 1/r"),
          timer.seconds()};
}

CriterionResult criterion7(const VerifyOptions& opt) {
  Timer timer;
  Checker ck;
  const EnvModel env = builtin_env("E_case2");
  const Regime regime = classify(env);
  ck.expect(regime.kind == RegimeKind::Weakly, "E_case2: expected weakly");
  McOptions mco;
  mco.samples = 600000;
  mco.seed = opt.seed;
  mco.workers = opt.workers;
  const KernelSeries ks =
      kernel_mc_series(env, regime, 79, KernelMethod::McTilted, mco);
  const SurvivalCurve curve = survival_from_kernel(ks, r1(env), 80);
  const FitResult fit = decay_fit(curve, FitModel::ExponentialTimesPower,
                                  std::make_pair(30, 80), regime.gamma);
  std::ostringstream os;
  os << "E_case2 log-log slope of R_n gamma^-n: " << fit.power
     << " outside [-1.9, -1.1]";
  ck.expect(fit.power >= -1.9 && fit.power <= -1.1, os.str());
  return {7, "case-2 shape on E_case2 (slope of log(R_n gamma^-n) vs log n)",
          ck.pass(), ck.detail("slope lies in [-1.9, -1.1] (theory -1.5)"),
          timer.seconds()};
}

CriterionResult criterion8(const VerifyOptions& opt) {
  Timer timer;
  Checker ck;
  const EnvModel weak = builtin_env("E_weak");
  const EnvModel tilted = tilt(weak, *classify(weak).beta);
  RenewalOptions ro;
  ro.samples = 20000;
  ro.step_cap = 1000000;
  ro.seed = opt.seed;
  ro.workers = opt.workers;

  const RenewalEstimate u0 = renewal_U(tilted, 0.0, ro);
  ck.expect(u0.value == 1.0 && u0.se == 0.0, "U(0) must equal 1 exactly");
  const RenewalEstimate v0 = renewal_V(tilted, 0.0, ro);
  ck.expect(v0.value == 1.0 && v0.se == 0.0, "V(0) must equal 1 exactly");

  const RenewalEstimate u1 = renewal_U(tilted, 1.0, ro);
  std::ostringstream os1;
  os1 << "U(1) = " << u1.value << " not within 3*SE=" << 3.0 * u1.se << " of 2";
  ck.expect(std::abs(u1.value - 2.0) <= 3.0 * u1.se, os1.str());
  const RenewalEstimate u2 = renewal_U(tilted, 2.0, ro);
  std::ostringstream os2;
  os2 << "U(2) = " << u2.value << " not within 3*SE=" << 3.0 * u2.se << " of 3";
  ck.expect(std::abs(u2.value - 3.0) <= 3.0 * u2.se, os2.str());

  for (double x : {0.0, 1.0, 2.0}) {
    const HarmonicResidual h = harmonic_check(RenewalKind::U, tilted, x, ro);
    std::ostringstream os;
    os << "harmonic U residual at x=" << x << ": " << h.residual
       << " exceeds 3*SE=" << 3.0 * h.se;
    ck.expect(std::abs(h.residual) <= 3.0 * h.se, os.str());
  }
  for (double x : {0.0, -1.0, -2.0}) {
    const HarmonicResidual h = harmonic_check(RenewalKind::V, tilted, x, ro);
    std::ostringstream os;
    os << "harmonic V residual at x=" << x << ": " << h.residual
       << " exceeds 3*SE=" << 3.0 * h.se;
    ck.expect(std::abs(h.residual) <= 3.0 * h.se, os.str());
  }
  return {8, "renewal-function harmonicity on the tilted E_weak walk",
          ck.pass(), ck.detail("U, V ladder values and harmonic residuals within 3 sigma"),
          timer.seconds()};
}

CriterionResult criterion9(const VerifyOptions& opt) {
  Timer timer;
  Checker ck;
  Rng rng(derive_stream(opt.seed, hash_tag("pgf-properties"), 0));

  auto random_law = [&](int kind) {
    switch (kind % 4) {
      case 0: {
        const double b = 3.0 * rng.uniform();
        const double m = (1.0 + b) * (0.05 + 0.95 * rng.uniform());
        return PgfLaw::linear_fractional(m, b);
      }
      case 1:
        return PgfLaw::poisson(0.1 + 5.0 * rng.uniform());
      case 2:
        return PgfLaw::geometric(0.05 + 0.9 * rng.uniform());
      default: {
        std::vector<double> p(2 + static_cast<std::size_t>(rng.uniform() * 6));
        double sum = 0.0;
        for (double& v : p) {
          v = rng.uniform();
          sum += v;
        }
        for (double& v : p) v /= sum;
        return PgfLaw::table(std::move(p));
      }
    }
  };

  int norm_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const PgfLaw law = random_law(i);
    if (std::abs(law.eval(1.0) - 1.0) > 1e-12) ++norm_bad;
  }
  ck.expect(norm_bad == 0, std::to_string(norm_bad) +
                               " of 1000 random laws failed eval(1)=1 at 1e-12");

  int comp_bad = 0;
  for (int i = 0; i < 1000; ++i) {
    const double b1 = 3.0 * rng.uniform(), b2 = 3.0 * rng.uniform();
    const LfRep f{(1.0 + b1) * rng.uniform(), b1};
    const LfRep g{(1.0 + b2) * rng.uniform(), b2};
    const LfRep fg = lf_compose(f, g);
    for (int k = 0; k <= 100; ++k) {
      const double s = static_cast<double>(k) / 100.0;
      if (std::abs(fg.eval(s) - f.eval(g.eval(s))) > 1e-12) ++comp_bad;
    }
  }
  ck.expect(comp_bad == 0,
            std::to_string(comp_bad) +
                " grid points failed lf_compose vs iterated eval at 1e-12");

  int mono_bad = 0;
  for (int i = 0; i < 50; ++i) {
    std::vector<PgfLaw> chain;
    for (int n = 0; n < 20; ++n) chain.push_back(random_law(static_cast<int>(rng.next_u64() % 4)));
    double prev = 0.0;
    for (std::size_t n = 0; n <= chain.size(); ++n) {
      const double v = compose_chain(std::span(chain.data(), n), 0.0);
      if (v + 1e-12 < prev) ++mono_bad;
      prev = v;
    }
  }
  ck.expect(mono_bad == 0, "compose_chain(.,0) not monotone in chain length");

  ck.expect_close(PgfLaw::linear_fractional(0.5, 0.5).theta(1), 4.0, 1e-12,
                  "theta(lf(0.5,0.5), 1)");
  return {9, "pgf property suite (normalization, composition, monotonicity, theta)",
          ck.pass(), ck.detail("1000-law property sweep clean"), timer.seconds()};
}

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

CriterionResult criterion10(const VerifyOptions& opt) {
  Timer timer;
  Checker ck;
  const fs::path scratch = opt.scratch_dir.empty()
                               ? fs::temp_directory_path() / "bpire_verify"
                               : fs::path(opt.scratch_dir);
  std::error_code ec;
  fs::remove_all(scratch, ec);

  nlohmann::json jcfg;
  jcfg["env"] = "D1";
  jcfg["n_max"] = 8;
  jcfg["N"] = 8;
  jcfg["samples"] = 20000;
  jcfg["cap"] = 1000;
  jcfg["seed"] = opt.seed;
  jcfg["workers"] = opt.workers;
  const ExperimentConfig cfg = config_from_json(jcfg);

  const std::string dir_a = (scratch / "a").string();
  const std::string dir_b = (scratch / "b").string();
  for (const std::string& dir : {dir_a, dir_b}) {
    run_classify(cfg, dir);
    run_kernel(cfg, dir);
    run_tail(cfg, dir);
    run_simulate(cfg, dir);
    run_report(cfg, dir);
  }
  std::size_t compared = 0;
  for (const auto& entry : fs::directory_iterator(dir_a)) {
    const std::string name = entry.path().filename().string();
    const std::string a = read_file(entry.path());
    const std::string b = read_file(fs::path(dir_b) / name);
    ++compared;
    ck.expect(!a.empty() && a == b,
              "artifact " + name + " differs between identical runs");
  }
  ck.expect(compared >= 7, "expected at least 7 artifacts, saw " +
                               std::to_string(compared));
  fs::remove_all(scratch, ec);
  return {10, "determinism: identical (seed, workers) runs are byte-identical",
          ck.pass(), ck.detail("full artifact suite reproduced byte-for-byte"),
          timer.seconds()};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const VerifyOptions& opt) {
  std::vector<CriterionResult> out;
  out.push_back(criterion1(opt));
  out.push_back(criterion2(opt));
  out.push_back(criterion3(opt));
  out.push_back(criterion4(opt));
  out.push_back(criterion5(opt));
  out.push_back(criterion6(opt));
  out.push_back(criterion7(opt));
  out.push_back(criterion8(opt));
  out.push_back(criterion9(opt));
  out.push_back(criterion10(opt));
  return out;
}

bool all_pass(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace bpire
