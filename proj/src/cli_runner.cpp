#include "krylov/cli.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <set>
#include <sstream>

#include "krylov/config.hpp"
#include "krylov/io.hpp"
#include "krylov/lattice.hpp"
#include "krylov/models.hpp"
#include "krylov/opspace.hpp"
#include "krylov/parallel.hpp"
#include "krylov/postprocess.hpp"
#include "krylov/recursion.hpp"
#include "krylov/states.hpp"
#include "krylov/tridiag.hpp"

namespace krylov {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kToolVersion = "0.1.0";

struct CommandContext {
  std::string command;
  RunConfig cfg;
  fs::path out_dir;
  json manifest;
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  fs::path file(const std::string& name) {
    outputs.push_back(name);
    return out_dir / name;
  }
  void warn_all(const Flags& f) {
    for (const auto& w : f.warnings) warnings.push_back(w);
  }
  void finish() {
    manifest["tool_version"] = kToolVersion;
    manifest["command"] = command;
    manifest["config_hash"] = cfg.hash();
    manifest["config"] = json::object();
    for (const auto& [k, v] : cfg.entries()) manifest["config"][k] = v;
    manifest["warnings"] = warnings;
    manifest["outputs"] = outputs;
    manifest["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream mf(out_dir / "manifest.json");
    mf << manifest.dump(2) << "\n";
    // generic plot stub pointing at this run's data files
    std::ofstream plot(out_dir / "plot.py");
    plot << "#!/usr/bin/env python3\n"
            "# generic plotting stub: first column on x, the rest on y\n"
            "import csv, sys\n"
            "import matplotlib.pyplot as plt\n"
            "files = " << json(outputs).dump() << "\n"
            "for f in files:\n"
            "    if not f.endswith('.csv'):\n"
            "        continue\n"
            "    with open(f) as fh:\n"
            "        rows = list(csv.reader(fh))\n"
            "    hdr, data = rows[0], rows[1:]\n"
            "    cols = list(zip(*[[float(x) if x else float('nan') for x in r] for r in data]))\n"
            "    for i in range(1, len(cols)):\n"
            "        plt.plot(cols[0], cols[i], label=f'{f}:{hdr[i]}')\n"
            "plt.legend(); plt.xlabel('x'); plt.savefig('plot.png', dpi=150)\n";
  }
};

int boundary_from(const std::string& s, BoundaryCondition& bc) {
  if (s == "open") bc = BoundaryCondition::Open;
  else if (s == "periodic") bc = BoundaryCondition::Periodic;
  else return -1;
  return 0;
}

unsigned parse_precision(const std::string& p, bool& extended) {
  extended = false;
  if (p == "double") return 0;
  if (p.rfind("ext:", 0) == 0) {
    extended = true;
    const long d = std::stol(p.substr(4));
    if (d < 10 || d > 10000) throw ConfigError("precision: digits out of range");
    return static_cast<unsigned>(d);
  }
  throw ConfigError("precision: expected double or ext:N");
}

OracleSpec oracle_from_cfg(const RunConfig& c) {
  const std::string fam = c.get_str("family");
  if (fam == "sl2r") return OracleSpec::sl2r(c.get_num("alpha", 1.0), c.get_num("eta", 1.0));
  if (fam == "hw") return OracleSpec::hw(c.get_num("alpha", 1.0));
  if (fam == "su2") return OracleSpec::su2(c.get_num("alpha", 1.0), c.get_num("j", 1.0));
  if (fam == "open")
    return OracleSpec::open_exact(c.get_num("gamma", 1.0), c.get_num("u", 0.1),
                                  c.get_num("eta", 1.0));
  if (fam == "largeq")
    return OracleSpec::large_q_syk(c.get_num("coupling", 1.0), c.get_num("q", 4.0));
  if (fam == "cft") return OracleSpec::cft(c.get_num("delta", 1.0), c.get_num("beta", kPi));
  if (fam == "disssyk")
    return OracleSpec::diss_syk(c.get_num("coupling", 1.0), c.get_num("lambda_tilde", 0.1),
                                c.get_num("q", 4.0));
  throw ConfigError("unknown oracle family: " + fam);
}

series::AcParams<double> family_params(const OracleSpec& s) {
  series::AcParams<double> p;
  switch (s.family) {
    case OracleSpec::Family::SL2R:
      p.family = series::AcFamily::SechPow;
      p.alpha = s.alpha;
      p.eta = s.eta;
      break;
    case OracleSpec::Family::HW:
      p.family = series::AcFamily::Gauss;
      p.alpha = s.alpha;
      break;
    case OracleSpec::Family::SU2:
      p.family = series::AcFamily::CosPow;
      p.alpha = s.alpha;
      p.eta = 2 * s.j;
      break;
    case OracleSpec::Family::Cft:
      p.family = series::AcFamily::SechPow;
      p.alpha = kPi / s.beta;
      p.eta = 2 * s.delta;
      break;
    case OracleSpec::Family::LargeQSyk:
      p.family = series::AcFamily::LogSech;
      p.alpha = s.coupling;
      p.pref = 2.0 / s.q;
      break;
    case OracleSpec::Family::OpenExact:
      p.family = series::AcFamily::OpenExact;
      p.alpha = s.gamma;
      p.u = s.u;
      p.eta = s.eta;
      break;
    case OracleSpec::Family::DissSykAutocorr: {
      p.family = series::AcFamily::DissSykLog;
      const double a = std::sqrt(s.coupling * s.coupling + 0.25 * s.lambda_tilde * s.lambda_tilde);
      p.alpha = a;
      p.shift = std::asinh(0.5 * s.lambda_tilde / s.coupling);
      p.pref = 1.0 / s.q;
      p.jj = s.coupling;
      break;
    }
  }
  return p;
}

// Euclidean-time variant of the same family (for the Toda route).
series::AcParams<double> family_params_euclidean(const OracleSpec& s) {
  series::AcParams<double> p = family_params(s);
  switch (p.family) {
    case series::AcFamily::SechPow:
      p.family = series::AcFamily::SecPow;
      break;
    case series::AcFamily::Gauss:
      p.gauss_sign = +1;
      break;
    case series::AcFamily::CosPow:
      throw ConfigError("toda: compact-group autocorrelation has no Euclidean route here");
    default:
      throw ConfigError("toda: family not supported on the Euclidean side");
  }
  return p;
}

struct ModelInstance {
  Mat hamiltonian;
  Mat seed_op;             // operator runs
  Vec seed_state;          // state runs
  std::vector<Jump> jumps;
  std::string description;
};

ModelInstance build_model(const RunConfig& c, std::uint64_t sample_seed) {
  ModelInstance m;
  const std::string model = c.get_str("model");
  if (model == "syk") {
    SykSpec s;
    s.n_majorana = static_cast<int>(c.get_int("N"));
    s.q = static_cast<int>(c.get_int("q", 4));
    s.coupling = c.get_num("coupling", 1.0 / std::sqrt(2.0));
    s.seed = sample_seed;
    m.hamiltonian = syk_hamiltonian(s);
    const std::string seed_op = c.get_str("seed_op", "psi1");
    if (seed_op == "psi1")
      m.seed_op = std::sqrt(2.0) * majorana_strings(s.n_majorana)[0].to_dense();
    else
      throw ConfigError("syk: unknown seed_op " + seed_op);
    const double lambda = c.get_num("lambda", 0.0);
    if (lambda > 0) {
      SykJumpParams jp;
      jp.kind = SykJumpKind::Linear;
      jp.lambda = lambda;
      m.jumps = syk_jumps(s, jp);
    }
    m.description = "syk N=" + std::to_string(s.n_majorana) + " q=" + std::to_string(s.q);
  } else if (model == "gue" || model == "goe" || model == "gse") {
    RmtSpec s;
    s.ensemble = model == "gue" ? Ensemble::GUE
                                : (model == "goe" ? Ensemble::GOE : Ensemble::GSE);
    s.n = static_cast<int>(c.get_int("N"));
    s.sigma = c.get_num("sigma", 1.0 / std::sqrt(double(s.n)));
    s.seed = sample_seed;
    m.hamiltonian = rmt_sample(s);
    m.description = model + " N=" + std::to_string(s.n);
  } else if (model == "mfim") {
    const int n = static_cast<int>(c.get_int("N"));
    BoundaryCondition bc = BoundaryCondition::Periodic;
    if (boundary_from(c.get_str("bc", "periodic"), bc) != 0)
      throw ConfigError("mfim: bc must be open|periodic");
    m.hamiltonian = mfim_hamiltonian(n, c.get_num("g"), c.get_num("h"), bc);
    const std::string seed_op = c.get_str("seed_op", "sz1");
    if (seed_op == "sz1") {
      const int d = 1 << n;
      Mat sz = Mat::Zero(d, d);
      for (int b = 0; b < d; ++b) sz(b, b) = (b & 1) ? -1.0 : 1.0;
      m.seed_op = sz;
    } else {
      throw ConfigError("mfim: unknown seed_op " + seed_op);
    }
    m.description = "mfim N=" + std::to_string(n);
  } else if (model == "lmg") {
    const double s = c.get_num("spin");
    m.hamiltonian = lmg_hamiltonian(s);
    m.seed_op = lmg_seed_z(s);
    m.description = "lmg s=" + std::to_string(s);
  } else if (model == "su2") {
    const double j = c.get_num("j");
    m.hamiltonian = su2_ladder_generator(j, c.get_num("alpha", 1.0));
    Vec e0 = Vec::Zero(m.hamiltonian.rows());
    e0[0] = 1;
    m.seed_state = e0;
    m.description = "su2 ladder j=" + std::to_string(j);
  } else {
    throw ConfigError("unknown model: " + model);
  }
  return m;
}

InnerProductSpec ip_from_cfg(const RunConfig& c) {
  const std::string ip = c.get_str("ip", "inft");
  if (ip == "inft") return InnerProductSpec::infinite_temperature();
  if (ip == "wightman") return InnerProductSpec::wightman(c.get_num("beta"));
  if (ip == "standard") return InnerProductSpec::standard(c.get_num("beta"));
  throw ConfigError("unknown inner product: " + ip);
}

RVec time_grid(const RunConfig& c) {
  const double tmax = c.get_num("tmax", 5.0);
  const long nt = c.get_int("nt", 101);
  if (nt < 2 || tmax <= 0) throw ConfigError("bad time grid");
  return RVec::LinSpaced(nt, 0.0, tmax);
}

// mean and standard error over sample rows
void write_mean_table(const fs::path& path, const std::string& xname, const RVec& x,
                      const std::vector<RVec>& samples) {
  const Eigen::Index n = x.size();
  RVec mean = RVec::Zero(n), err = RVec::Zero(n);
  Eigen::Index count = samples.size();
  for (const auto& s : samples)
    for (Eigen::Index i = 0; i < n && i < s.size(); ++i) mean[i] += s[i];
  mean /= double(count);
  for (const auto& s : samples)
    for (Eigen::Index i = 0; i < n && i < s.size(); ++i) {
      const double d = s[i] - mean[i];
      err[i] += d * d;
    }
  for (Eigen::Index i = 0; i < n; ++i)
    err[i] = count > 1 ? std::sqrt(err[i] / count / (count - 1)) : 0.0;
  io::write_series(path, xname + ",mean,stderr", {x, mean, err});
}

int common_lanczos_like(CommandContext& ctx) {
  const auto& c = ctx.cfg;
  const int samples = static_cast<int>(c.get_int("samples", 1));
  const std::uint64_t master = static_cast<std::uint64_t>(c.get_int("seed", 0));
  const int max_n = static_cast<int>(c.get_int("max_n", 60));
  const std::string reortho = c.get_str("reortho", "full");
  const auto ip_spec = ip_from_cfg(c);
  const std::string cmd = ctx.command;

  std::vector<RVec> b_rows(samples), a_im_rows(samples), a_re_rows(samples);
  std::vector<std::vector<std::string>> warn_rows(samples);
  std::vector<std::uint64_t> seeds(samples);
  std::atomic<int> failures{0};
  bool breakdown = false;

  par::ensemble_for(samples, [&](int i) {
    try {
      const std::uint64_t sample_seed = derive_seed(master, i);
      seeds[i] = sample_seed;
      auto model = build_model(c, sample_seed);
      LanczosOptions opt;
      opt.max_n = max_n;
      opt.reortho = reortho == "none" ? Reortho::None : Reortho::Full;
      InnerProduct ip(ip_spec, &model.hamiltonian);
      if (cmd == "lanczos" && model.seed_state.size() > 0) {
        auto res = lanczos_matrix(model.hamiltonian, model.seed_state, opt);
        b_rows[i] = res.b;
        a_re_rows[i] = res.a;
        a_im_rows[i] = RVec::Zero(res.a.size());
        warn_rows[i] = res.flags.warnings;
      } else if (cmd == "lanczos") {
        auto L = build_liouvillian(model.hamiltonian);
        auto res = lanczos_operator(L, model.seed_op, ip, opt);
        b_rows[i] = res.b;
        a_re_rows[i] = res.a;
        a_im_rows[i] = RVec::Zero(res.a.size());
        warn_rows[i] = res.flags.warnings;
      } else if (cmd == "monic") {
        auto L = build_liouvillian(model.hamiltonian);
        auto res = lanczos_monic(L, model.seed_op, ip, opt);
        b_rows[i] = res.b();
        a_re_rows[i] = res.a;
        a_im_rows[i] = RVec::Zero(res.a.size());
        warn_rows[i] = res.flags.warnings;
      } else if (cmd == "arnoldi" || cmd == "bilanczos") {
        auto Lo = build_adjoint_lindbladian(model.hamiltonian, model.jumps,
                                            static_cast<int>(c.get_int("sign", -1)));
        if (cmd == "arnoldi") {
          auto res = arnoldi(Lo, model.seed_op, ip, opt);
          const int nn = static_cast<int>(std::min(res.h.rows(), res.h.cols()));
          RVec habs(nn), hsub(std::max(0, nn - 1));
          for (int k = 0; k < nn; ++k) habs[k] = std::abs(res.h(k, k));
          for (int k = 1; k < nn; ++k) hsub[k - 1] = std::abs(res.h(k, k - 1));
          a_im_rows[i] = habs;  // |h_nn| reported on the diagonal column
          a_re_rows[i] = RVec::Zero(nn);
          b_rows[i] = hsub;
          warn_rows[i] = res.flags.warnings;
        } else {
          auto res = bilanczos(Lo, model.seed_op, ip, opt);
          b_rows[i] = res.b;
          a_re_rows[i].resize(res.a.size());
          a_im_rows[i].resize(res.a.size());
          for (Eigen::Index k = 0; k < res.a.size(); ++k) {
            a_re_rows[i][k] = res.a[k].real();
            a_im_rows[i][k] = res.a[k].imag();
          }
          warn_rows[i] = res.flags.warnings;
        }
      } else {
        throw ConfigError("unhandled engine " + cmd);
      }
    } catch (const std::exception& e) {
      ++failures;
      warn_rows[i] = {std::string("sample failed: ") + e.what()};
    }
  });

  std::vector<RVec> good_b;
  for (int i = 0; i < samples; ++i) {
    for (const auto& w : warn_rows[i]) {
      ctx.warnings.push_back("sample " + std::to_string(i) + ": " + w);
      if (w.find("breakdown") != std::string::npos) breakdown = true;
    }
    if (b_rows[i].size() > 0) good_b.push_back(b_rows[i]);
  }
  if (good_b.empty()) throw NumericalBreakdown("all samples failed");

  // per-sample coefficient files plus the ensemble mean
  Eigen::Index maxlen = 0;
  for (const auto& r : good_b) maxlen = std::max(maxlen, r.size());
  for (int i = 0; i < std::min(samples, 4); ++i) {
    if (b_rows[i].size() == 0) continue;
    Vec a(a_re_rows[i].size());
    for (Eigen::Index k = 0; k < a.size(); ++k) a[k] = cxd(a_re_rows[i][k], a_im_rows[i][k]);
    io::write_coefficients(ctx.file("coefficients_sample" + std::to_string(i) + ".csv"), a,
                           b_rows[i], b_rows[i]);
  }
  RVec n_idx = RVec::LinSpaced(maxlen, 1, double(maxlen));
  std::vector<RVec> padded;
  for (auto& r : good_b) {
    RVec p = RVec::Constant(maxlen, std::nan(""));
    p.head(r.size()) = r;
    padded.push_back(p);
  }
  // average only rows where every sample is defined
  Eigen::Index common = maxlen;
  for (auto& r : good_b) common = std::min(common, r.size());
  std::vector<RVec> trimmed;
  for (auto& r : good_b) trimmed.push_back(r.head(common));
  write_mean_table(ctx.file("b_mean.csv"), "n", RVec::LinSpaced(common, 1, double(common)),
                   trimmed);
  if (ctx.command == "bilanczos" || ctx.command == "arnoldi") {
    Eigen::Index commona = a_im_rows[0].size();
    std::vector<RVec> atr;
    for (int i = 0; i < samples; ++i)
      if (a_im_rows[i].size() > 0) commona = std::min(commona, a_im_rows[i].size());
    for (int i = 0; i < samples; ++i)
      if (a_im_rows[i].size() > 0) atr.push_back(a_im_rows[i].cwiseAbs().head(commona));
    write_mean_table(ctx.file("a_abs_mean.csv"), "n",
                     RVec::LinSpaced(commona, 0, double(commona - 1)), atr);
  }

  ctx.manifest["samples"] = samples;
  ctx.manifest["failed_samples"] = failures.load();
  ctx.manifest["per_sample_seeds"] = seeds;
  return breakdown ? 3 : 0;
}

int cmd_moments(CommandContext& ctx) {
  const auto& c = ctx.cfg;
  const int n_max = static_cast<int>(c.get_int("n_max", 12));
  const auto kind = c.get_str("kind", "operator") == "state" ? MomentKind::State
                                                             : MomentKind::Operator;
  bool extended = false;
  const unsigned digits = parse_precision(c.get_str("precision", "double"), extended);
  auto spec = AutocorrSpec::closed_form(family_params(oracle_from_cfg(c)));

  std::ofstream f(ctx.file("moments.csv"));
  f << "n,m_re,m_im\n";
  MomentToLanczosResult rec;
  if (!extended) {
    auto seq = moments_from_autocorr(spec, n_max, kind);
    ctx.warn_all(seq.flags);
    for (int n = 0; n <= n_max; ++n)
      f << n << "," << io::format_double(seq.m[n].real()) << ","
        << io::format_double(seq.m[n].imag()) << "\n";
    rec = lanczos_from_moments(seq.m);
  } else {
    auto m = moments_from_autocorr_ext(spec, n_max, kind, digits);
    PrecisionGuard g(digits);
    for (int n = 0; n <= n_max; ++n)
      f << n << "," << m[n].re.str(digits) << "," << m[n].im.str(digits) << "\n";
    ctx.manifest["digits"] = digits;
    rec = lanczos_from_moments_ext(m, digits);
  }
  ctx.warn_all(rec.flags);
  io::write_coefficients(ctx.file("coefficients.csv"), rec.a, rec.b, rec.b);
  ctx.manifest["valid_n"] = rec.valid_n;
  return rec.flags.has("Hankel") ? 3 : 0;
}

int cmd_toda(CommandContext& ctx) {
  const auto& c = ctx.cfg;
  const int n_max = static_cast<int>(c.get_int("n_max", 10));
  bool extended = false;
  unsigned digits = parse_precision(c.get_str("precision", "ext:60"), extended);
  if (!extended) digits = 30;
  auto spec = AutocorrSpec::closed_form(family_params_euclidean(oracle_from_cfg(c)));
  auto res = toda_lanczos(spec, n_max, c.get_num("tau0", 0.0), digits);
  ctx.warn_all(res.flags);
  io::write_coefficients(ctx.file("coefficients.csv"), res.a, res.b, res.b);
  ctx.manifest["hirota_residual"] = res.hirota_residual;
  return res.flags.has("underflow") ? 3 : 0;
}

ChainSpec chain_from_cfg(const RunConfig& c) {
  if (c.has("family")) {
    auto o = oracle(oracle_from_cfg(c));
    int sites = static_cast<int>(c.get_int("sites", 200));
    if (o.krylov_dim > 0) sites = o.krylov_dim;
    RVec b(sites - 1);
    for (int n = 1; n < sites; ++n) b[n - 1] = o.b(n);
    const bool open = o.spec.family == OracleSpec::Family::OpenExact ||
                      o.spec.family == OracleSpec::Family::DissSykAutocorr;
    if (open) {
      Vec a(sites);
      for (int n = 0; n < sites; ++n) a[n] = o.a(n);
      return ChainSpec::open(std::move(b), std::move(a));
    }
    return ChainSpec::closed(std::move(b));
  }
  // chain file: CSV with the coefficient-table layout
  const std::string path = c.get_str("chain");
  std::ifstream f(path);
  if (!f) throw ConfigError("chain: cannot open " + path);
  std::string line;
  std::getline(f, line);
  std::vector<double> are, aim, bs;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    double n, ar, ai, b;
    char c1, c2, c3;
    std::istringstream ss(line);
    if (!(ss >> n >> c1 >> ar >> c2 >> ai >> c3 >> b)) continue;
    are.push_back(ar);
    aim.push_back(ai);
    if (n >= 1) bs.push_back(b);
  }
  if (are.size() < 2) throw ConfigError("chain: too few rows in " + path);
  Vec a(are.size());
  for (size_t i = 0; i < are.size(); ++i) a[i] = cxd(are[i], aim[i]);
  RVec b = Eigen::Map<const RVec>(bs.data(), bs.size());
  const std::string kind = c.get_str("kind", "closed");
  if (kind == "closed") return ChainSpec::closed(b.head(a.size() - 1));
  if (kind == "state") return ChainSpec::state(b.head(a.size() - 1), a.real());
  if (kind == "open") return ChainSpec::open(b.head(a.size() - 1), a);
  if (kind == "density") return ChainSpec::density(b.head(a.size() - 1));
  throw ConfigError("chain: unknown kind " + kind);
}

int cmd_propagate(CommandContext& ctx, bool trace_only) {
  const auto& c = ctx.cfg;
  auto chain = chain_from_cfg(c);
  ctx.warn_all(chain.flags);
  const RVec t = time_grid(c);
  const std::string method = c.get_str("method", "auto");
  PropagationMethod pm = PropagationMethod::Auto;
  if (method == "eig") pm = PropagationMethod::Eig;
  else if (method == "expm") pm = PropagationMethod::Expm;
  else if (method == "ode") pm = PropagationMethod::AdaptiveOde;
  else if (method != "auto") throw ConfigError("method: eig|expm|ode|auto");
  auto wf = propagate(chain, t, pm);
  ctx.warn_all(wf.flags);
  if (!trace_only && c.get_bool("snapshots", true))
    io::write_wavefunction(ctx.file("wavefunction.csv"), wf);
  auto tr = complexity_trace(wf, c.get_bool("normalize", true));
  ctx.warn_all(tr.flags);
  io::write_trace(ctx.file("trace.csv"), tr);
  return 0;
}

int cmd_spread(CommandContext& ctx) {
  const auto& c = ctx.cfg;
  const int samples = static_cast<int>(c.get_int("samples", 1));
  const std::uint64_t master = static_cast<std::uint64_t>(c.get_int("seed", 0));
  const double beta = c.get_num("beta", 0.0);
  const RVec t = time_grid(c);
  std::vector<RVec> traces(samples);
  std::vector<std::uint64_t> seeds(samples);
  par::ensemble_for(samples, [&](int i) {
    seeds[i] = derive_seed(master, i);
    auto model = build_model(c, seeds[i]);
    auto spec = SpectrumDecomp::compute(model.hamiltonian);
    auto res = spread_tfd(spec, beta, t);
    traces[i] = res.trace.K;
  });
  write_mean_table(ctx.file("spread.csv"), "t", t, traces);
  // plateau over the last quarter of the grid
  double plateau = 0;
  int cnt = 0;
  for (const auto& tr : traces)
    for (Eigen::Index j = 3 * t.size() / 4; j < t.size(); ++j) {
      plateau += tr[j];
      ++cnt;
    }
  ctx.manifest["plateau_mean"] = plateau / cnt;
  ctx.manifest["samples"] = samples;
  ctx.manifest["per_sample_seeds"] = seeds;
  return 0;
}

int cmd_sff(CommandContext& ctx) {
  const auto& c = ctx.cfg;
  const int samples = static_cast<int>(c.get_int("samples", 1));
  const std::uint64_t master = static_cast<std::uint64_t>(c.get_int("seed", 0));
  const double beta = c.get_num("beta", 0.0);
  const RVec t = time_grid(c);
  std::vector<RVec> rows(samples);
  std::vector<std::uint64_t> seeds(samples);
  par::ensemble_for(samples, [&](int i) {
    seeds[i] = derive_seed(master, i);
    auto model = build_model(c, seeds[i]);
    auto spec = SpectrumDecomp::compute(model.hamiltonian);
    rows[i] = sff(spec, beta, t);
  });
  write_mean_table(ctx.file("sff.csv"), "t", t, rows);
  ctx.manifest["samples"] = samples;
  ctx.manifest["per_sample_seeds"] = seeds;
  return 0;
}

int cmd_spectral_complexity(CommandContext& ctx) {
  const auto& c = ctx.cfg;
  const int samples = static_cast<int>(c.get_int("samples", 1));
  const std::uint64_t master = static_cast<std::uint64_t>(c.get_int("seed", 0));
  const double beta = c.get_num("beta", 0.0);
  const RVec t = time_grid(c);
  std::vector<RVec> rows(samples);
  std::vector<std::uint64_t> seeds(samples);
  int n_dim = 0;
  par::ensemble_for(samples, [&](int i) {
    seeds[i] = derive_seed(master, i);
    auto model = build_model(c, seeds[i]);
    auto spec = SpectrumDecomp::compute(model.hamiltonian);
    rows[i] = spectral_complexity(spec, beta, t).value;
    if (i == 0) n_dim = static_cast<int>(spec.energies.size());
  });
  write_mean_table(ctx.file("spectral_complexity.csv"), "t", t, rows);
  if (c.get_str("model") == "gue" && beta == 0.0) {
    RVec an = gue_spectral_complexity_analytic(n_dim, t);
    io::write_series(ctx.file("spectral_complexity_analytic.csv"), "t,value", {t, an});
  }
  ctx.manifest["samples"] = samples;
  ctx.manifest["per_sample_seeds"] = seeds;
  return 0;
}

int cmd_density(CommandContext& ctx) {
  const auto& c = ctx.cfg;
  const std::uint64_t master = static_cast<std::uint64_t>(c.get_int("seed", 0));
  auto model = build_model(c, derive_seed(master, 0));
  const int d = static_cast<int>(model.hamiltonian.rows());
  // random mixed initial state from a seeded unitary and weights
  std::mt19937_64 rng(derive_seed(master, 1));
  std::normal_distribution<double> g(0, 1);
  Mat v(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) v(i, j) = cxd(g(rng), g(rng));
  Eigen::HouseholderQR<Mat> qr(v);
  Mat Q = qr.householderQ();
  std::uniform_real_distribution<double> u(0.05, 1.0);
  RVec p(d);
  for (int i = 0; i < d; ++i) p[i] = u(rng);
  p /= p.sum();
  Mat rho0 = Mat::Zero(d, d);
  for (int i = 0; i < d; ++i) rho0 += p[i] * Q.col(i) * Q.col(i).adjoint();

  auto chain = density_krylov(model.hamiltonian, rho0,
                              static_cast<int>(c.get_int("max_n", 4 * d * d)));
  ctx.warn_all(chain.flags);
  Vec a = Vec::Zero(chain.traces.size());
  io::write_coefficients(ctx.file("coefficients.csv"), a, chain.b, chain.b);
  io::write_series(ctx.file("traces.csv"), "n,trace",
                   {RVec::LinSpaced(chain.traces.size(), 0, double(chain.traces.size() - 1)),
                    chain.traces});
  auto wf = density_propagate(chain, time_grid(c));
  auto tr = complexity_trace(wf, false);
  io::write_trace(ctx.file("trace.csv"), tr);
  ctx.manifest["krylov_dim"] = chain.krylov_dim;
  ctx.manifest["purity"] = chain.purity0;
  return 0;
}

int cmd_dos(CommandContext& ctx) {
  const auto& c = ctx.cfg;
  const std::string direction = c.get_str("direction", "forward");
  const std::string profile = c.get_str("profile", "semicircle");
  std::function<double(double)> b;
  if (profile == "semicircle")
    b = [](double x) { return std::sqrt(std::max(0.0, 1.0 - x)); };
  else if (profile == "constant")
    b = [](double) { return 1.0; };
  else
    throw ConfigError("dos: profile semicircle|constant");
  auto a0 = [](double) { return 0.0; };
  RVec e = RVec::LinSpaced(static_cast<int>(c.get_int("ne", 201)), -c.get_num("emax", 2.0),
                           c.get_num("emax", 2.0));
  if (direction == "forward") {
    RVec rho = dos_from_mean_lanczos(b, a0, e);
    io::write_series(ctx.file("dos.csv"), "E,rho", {e, rho});
    return 0;
  }
  if (direction != "inverse") throw ConfigError("dos: direction forward|inverse");
  RVec rho(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i)
    rho[i] = profile == "semicircle" ? std::sqrt(std::max(0.0, 4 - e[i] * e[i])) / (2 * kPi)
                                     : 1.0 / (kPi * std::sqrt(std::max(1e-12, 4 - e[i] * e[i])));
  RVec x = RVec::LinSpaced(static_cast<int>(c.get_int("nx", 41)), 0.02, 0.92);
  RVec binv = mean_lanczos_from_dos(e, rho, x);
  io::write_series(ctx.file("mean_b.csv"), "x,b", {x, binv});
  return 0;
}

int cmd_oracle_check(CommandContext& ctx) {
  const auto& c = ctx.cfg;
  auto o = oracle(oracle_from_cfg(c));
  RVec t = RVec::LinSpaced(13, 0.0, c.get_num("tmax", 3.0));
  const int sites = o.krylov_dim > 0 ? o.krylov_dim : 2500;
  auto res = o.self_check(t, sites);
  // propagation cross-check
  int chain_sites = o.krylov_dim > 0 ? o.krylov_dim : static_cast<int>(c.get_int("sites", 1200));
  RVec b(chain_sites - 1);
  for (int n = 1; n < chain_sites; ++n) b[n - 1] = o.b(n);
  const bool open = o.spec.family == OracleSpec::Family::OpenExact ||
                    o.spec.family == OracleSpec::Family::DissSykAutocorr;
  ChainSpec chain = ChainSpec::closed(b);
  if (open) {
    Vec a(chain_sites);
    for (int n = 0; n < chain_sites; ++n) a[n] = o.a(n);
    chain = ChainSpec::open(RVec(b), std::move(a));
  }
  auto wf = propagate(chain, t);
  double prop_err = 0;
  for (Eigen::Index j = 0; j < t.size(); ++j)
    for (int n = 0; n < std::min(chain_sites, 60); ++n)
      prop_err = std::max(prop_err, std::abs(wf.amp(n, j) - o.phi(n, t[j])));
  std::ofstream f(ctx.file("oracle_check.txt"));
  f << "recurrence_residual " << io::format_double(res.recurrence) << "\n"
    << "normalization_defect " << io::format_double(res.normalization) << "\n"
    << "complexity_defect " << io::format_double(res.complexity) << "\n"
    << "propagation_error " << io::format_double(prop_err) << "\n";
  ctx.manifest["recurrence_residual"] = res.recurrence;
  ctx.manifest["normalization_defect"] = res.normalization;
  ctx.manifest["complexity_defect"] = res.complexity;
  ctx.manifest["propagation_error"] = prop_err;
  const double tol = c.get_num("tol", 1e-7);
  std::cout << "oracle-check residuals: recurrence " << res.recurrence << ", normalization "
            << res.normalization << ", propagation " << prop_err << "\n";
  return (res.recurrence <= tol && res.normalization <= tol && prop_err <= tol) ? 0 : 3;
}

int cmd_cd(CommandContext& ctx) {
  const auto& c = ctx.cfg;
  auto chain = chain_from_cfg(c);
  int dk = static_cast<int>(c.get_int("dk", chain.sites()));
  if (dk % 2 != 0) --dk;
  auto cd = cd_coefficients(chain.b, dk, c.get_num("b0", 1.0));
  io::write_series(ctx.file("cd_alpha.csv"), "k,alpha",
                   {RVec::LinSpaced(cd.alpha.size(), 1, double(cd.alpha.size())), cd.alpha});
  ctx.manifest["cost"] = cd.cost;
  return 0;
}

const std::map<std::string, std::set<std::string>>& schemas() {
  static const std::set<std::string> common{"out", "samples", "seed", "precision", "workers",
                                            "config"};
  static const std::set<std::string> model{"model", "N",        "q",    "coupling", "lambda",
                                           "g",     "h",        "bc",   "spin",     "j",
                                           "alpha", "seed_op",  "sigma"};
  static std::map<std::string, std::set<std::string>> s;
  if (s.empty()) {
    auto add = [&](const std::string& cmd, std::set<std::string> extra) {
      std::set<std::string> keys = common;
      keys.insert(extra.begin(), extra.end());
      s[cmd] = std::move(keys);
    };
    std::set<std::string> eng{"max_n", "reortho", "ip", "beta", "sign"};
    eng.insert(model.begin(), model.end());
    add("lanczos", eng);
    add("monic", eng);
    add("arnoldi", eng);
    add("bilanczos", eng);
    add("moments", {"family", "alpha", "eta", "j", "gamma", "u", "coupling", "q", "delta",
                    "beta", "lambda_tilde", "n_max", "kind"});
    add("toda", {"family", "alpha", "eta", "coupling", "q", "delta", "beta", "lambda_tilde",
                 "n_max", "tau0", "gamma", "u", "j"});
    std::set<std::string> chain{"family", "alpha", "eta",  "j",     "gamma",        "u",
                                "coupling", "q",   "delta", "beta", "lambda_tilde", "chain",
                                "kind",     "sites", "tmax", "nt",  "method",       "normalize",
                                "snapshots"};
    add("propagate", chain);
    add("complexity", chain);
    std::set<std::string> ens{"model", "N", "sigma", "beta", "tmax", "nt"};
    add("spread", ens);
    add("sff", ens);
    add("spectral-complexity", ens);
    std::set<std::string> dens{"model", "N", "q", "coupling", "g", "h", "bc", "spin", "sigma",
                               "max_n", "tmax", "nt", "seed_op", "j", "alpha"};
    add("density", dens);
    add("dos", {"direction", "profile", "ne", "nx", "emax"});
    add("oracle-check", {"family", "alpha", "eta", "j", "gamma", "u", "coupling", "q", "delta",
                         "beta", "lambda_tilde", "tmax", "sites", "tol"});
    add("cd", chain);
  }
  return s;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    std::cout
        << "usage: krylov <command> [key=value | --key value]...\n"
           "commands: lanczos monic arnoldi bilanczos moments toda propagate complexity\n"
           "          spread sff spectral-complexity density dos oracle-check cd\n"
           "common keys: out samples seed precision workers config\n"
           "exit codes: 0 ok, 2 config error, 3 numerical breakdown, 4 resource guard\n";
    return args.empty() ? 2 : 0;
  }
  CommandContext ctx;
  ctx.command = args[0];
  try {
    const auto& schema_map = schemas();
    const auto sit = schema_map.find(ctx.command);
    if (sit == schema_map.end()) throw ConfigError("unknown command: " + ctx.command);

    // flags: either "key=value" or "--key value"
    RunConfig flags;
    for (size_t i = 1; i < args.size(); ++i) {
      std::string a = args[i];
      if (a.rfind("--", 0) == 0) {
        std::string key = a.substr(2);
        for (auto& ch : key)
          if (ch == '-') ch = '_';
        if (i + 1 >= args.size()) throw ConfigError("flag " + key + " needs a value");
        flags.set(key, args[++i]);
      } else {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value: " + a);
        flags.set(a.substr(0, eq), a.substr(eq + 1));
      }
    }
    ctx.cfg = flags;
    if (flags.has("config")) {
      // file values override inline flags
      auto file_cfg = RunConfig::parse_file(flags.get_str("config"));
      for (const auto& [k, v] : file_cfg.entries()) ctx.cfg.set(k, v);
    }
    ctx.cfg.check_schema(sit->second);

    if (ctx.cfg.has("workers"))
      par::set_worker_count(static_cast<int>(ctx.cfg.get_int("workers")));
    ctx.out_dir = ctx.cfg.get_str("out", "krylov_out");
    fs::create_directories(ctx.out_dir);

    int rc = 0;
    if (ctx.command == "lanczos" || ctx.command == "monic" || ctx.command == "arnoldi" ||
        ctx.command == "bilanczos")
      rc = common_lanczos_like(ctx);
    else if (ctx.command == "moments")
      rc = cmd_moments(ctx);
    else if (ctx.command == "toda")
      rc = cmd_toda(ctx);
    else if (ctx.command == "propagate")
      rc = cmd_propagate(ctx, false);
    else if (ctx.command == "complexity")
      rc = cmd_propagate(ctx, true);
    else if (ctx.command == "spread")
      rc = cmd_spread(ctx);
    else if (ctx.command == "sff")
      rc = cmd_sff(ctx);
    else if (ctx.command == "spectral-complexity")
      rc = cmd_spectral_complexity(ctx);
    else if (ctx.command == "density")
      rc = cmd_density(ctx);
    else if (ctx.command == "dos")
      rc = cmd_dos(ctx);
    else if (ctx.command == "oracle-check")
      rc = cmd_oracle_check(ctx);
    else if (ctx.command == "cd")
      rc = cmd_cd(ctx);
    else
      throw ConfigError("unknown command: " + ctx.command);

    ctx.manifest["exit_code"] = rc;
    ctx.finish();
    return rc;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceGuardError& e) {
    std::cerr << "resource guard: " << e.what() << "\n";
    return 4;
  } catch (const NumericalBreakdown& e) {
    std::cerr << "numerical breakdown: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace krylov
