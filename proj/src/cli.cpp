#include <lrme/cli.hpp>

#include <lrme/certificates.hpp>
#include <lrme/solver.hpp>

#include "CLI11.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#ifndef LRME_VERSION
#define LRME_VERSION "0.0.0"
#endif

namespace lrme {

std::string version_string() { return LRME_VERSION; }

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double clock_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

std::string fmt(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::to_string(v);
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

RunManifest::RunManifest(std::string command, std::vector<std::string> argv)
    : command_(std::move(command)), argv_(std::move(argv)), started_(utc_now()),
      started_clock_(clock_seconds()) {}

void RunManifest::write(const fs::path& path) {
  json j;
  j["command"] = command_;
  j["argv"] = argv_;
  j["version"] = version_string();
  j["base_seed"] = base_seed_;
  j["config"] = config_;
  j["started_at"] = started_;
  j["finished_at"] = utc_now();
  j["wall_seconds"] = clock_seconds() - started_clock_;
  for (auto& [k, v] : extra_.items()) j[k] = v;
  json files = json::array();
  for (const auto& p : outputs_) {
    std::error_code ec;
    const auto size = fs::file_size(p, ec);
    files.push_back({{"path", p.filename().string()}, {"bytes", ec ? 0 : size}});
  }
  j["outputs"] = files;
  write_json(path, j);
}

// ---------------------------------------------------------------------------
// Sweep configuration as JSON

json to_json(const GammaPolicy& g) {
  json j;
  j["mode"] = g.mode == GammaPolicy::Mode::Theorem ? "theorem"
              : g.mode == GammaPolicy::Mode::Scaled ? "scaled"
                                                    : "fixed";
  j["value"] = g.value;
  j["count_block"] = g.count_block;
  j["formula"] = g.describe();
  return j;
}

GammaPolicy gamma_policy_from_json(const json& j) {
  GammaPolicy g;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "theorem") return GammaPolicy::theorem();
    if (s == "unit") return GammaPolicy::unit_constant();
    throw IoError("gamma policy must be \"theorem\", \"unit\" or an object");
  }
  if (j.contains("mode")) {
    const auto m = j.at("mode").get<std::string>();
    if (m == "theorem") g.mode = GammaPolicy::Mode::Theorem;
    else if (m == "scaled") g.mode = GammaPolicy::Mode::Scaled;
    else if (m == "fixed") g.mode = GammaPolicy::Mode::Fixed;
    else throw IoError("unknown gamma mode '" + m + "'");
  }
  if (j.contains("value")) g.value = j.at("value").get<double>();
  if (j.contains("count_block")) g.count_block = j.at("count_block").get<bool>();
  return g;
}

json to_json(const SweepConfig& c) {
  json j;
  j["axis"] = to_string(c.axis);
  j["fixed"] = to_json(c.fixed);
  j["n_list"] = c.n_list;
  j["trials_per_point"] = c.trials_per_point;
  j["success_threshold"] = c.success_threshold;
  j["bisection_tol"] = c.resolved_bisection_tol();
  if (c.coarse_grid) j["coarse_grid"] = *c.coarse_grid;
  else j["coarse_grid"] = "default";
  j["base_seed"] = c.base_seed;
  j["max_solver_iter"] = c.max_solver_iter;
  j["solver_tol"] = c.solver_tol;
  j["penalty_growth"] = c.penalty_growth;
  j["gamma"] = to_json(c.gamma);
  return j;
}

SweepConfig sweep_config_from_json(const json& j, SweepConfig c) {
  try {
    if (!j.is_object()) throw IoError("sweep config must be a JSON object");
    if (j.contains("axis")) c.axis = axis_from_string(j.at("axis").get<std::string>());
    if (j.contains("fixed")) {
      json merged = to_json(c.fixed);
      merged.update(j.at("fixed"));
      c.fixed = gen_params_from_json(merged);
    }
    if (j.contains("n_list")) c.n_list = j.at("n_list").get<std::vector<Index>>();
    if (j.contains("trials_per_point")) c.trials_per_point = j.at("trials_per_point").get<int>();
    if (j.contains("success_threshold")) c.success_threshold = j.at("success_threshold").get<double>();
    if (j.contains("bisection_tol")) c.bisection_tol = j.at("bisection_tol").get<double>();
    if (j.contains("coarse_grid")) {
      const auto& g = j.at("coarse_grid");
      if (g.is_string()) c.coarse_grid.reset();
      else c.coarse_grid = g.get<std::vector<double>>();
    }
    if (j.contains("base_seed")) c.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("max_solver_iter")) c.max_solver_iter = j.at("max_solver_iter").get<int>();
    if (j.contains("solver_tol")) c.solver_tol = j.at("solver_tol").get<double>();
    if (j.contains("penalty_growth")) c.penalty_growth = j.at("penalty_growth").get<double>();
    if (j.contains("gamma")) c.gamma = gamma_policy_from_json(j.at("gamma"));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed sweep config: ") + e.what());
  }
  return c;
}

json to_json(const CriticalResult& r) {
  json j;
  j["n"] = r.n;
  j["critical_value"] = r.critical_value;
  j["good"] = r.good ? json(*r.good) : json(nullptr);
  j["bad"] = r.bad ? json(*r.bad) : json(nullptr);
  j["boundary"] = r.boundary ? json(*r.boundary) : json(nullptr);
  json probes = json::array();
  for (const auto& p : r.probes)
    probes.push_back({{"value", p.value}, {"successes", p.successes}, {"trials", p.trials}});
  j["probes"] = probes;
  j["errors"] = r.errors;
  return j;
}

std::string render_svg(const SweepResult& result) {
  const double w = 480, h = 320, left = 60, right = 20, top = 30, bottom = 45;
  const auto& rows = result.rows;
  double nmin = 0, nmax = 1, vmax = 0;
  if (!rows.empty()) {
    nmin = static_cast<double>(rows.front().n);
    nmax = nmin;
  }
  for (const auto& r : rows) {
    nmin = std::min(nmin, static_cast<double>(r.n));
    nmax = std::max(nmax, static_cast<double>(r.n));
    vmax = std::max(vmax, r.critical_value);
  }
  if (nmax == nmin) nmax = nmin + 1;
  if (vmax <= 0) vmax = 1;
  vmax *= 1.1;
  auto x = [&](double n) { return left + (n - nmin) / (nmax - nmin) * (w - left - right); };
  auto y = [&](double v) { return h - bottom - v / vmax * (h - top - bottom); };

  std::ostringstream s;
  s << std::fixed << std::setprecision(2);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<text x=\"" << w / 2 << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">critical "
    << to_string(result.config.axis) << " vs n</text>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << h - bottom << "\" x2=\"" << w - right << "\" y2=\""
    << h - bottom << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << h - bottom
    << "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double v = vmax * k / 4;
    s << "<text x=\"" << left - 6 << "\" y=\"" << y(v) + 4 << "\" text-anchor=\"end\" font-size=\"11\">"
      << std::setprecision(3) << v << std::setprecision(2) << "</text>\n";
  }
  std::string points;
  for (const auto& r : rows) {
    const double px = x(static_cast<double>(r.n)), py = y(r.critical_value);
    std::ostringstream pt;
    pt << std::fixed << std::setprecision(2) << px << "," << py << " ";
    points += pt.str();
    s << "<circle cx=\"" << px << "\" cy=\"" << py << "\" r=\"3\" fill=\"steelblue\"/>\n";
    s << "<text x=\"" << px << "\" y=\"" << h - bottom + 16 << "\" text-anchor=\"middle\" font-size=\"11\">"
      << r.n << "</text>\n";
  }
  s << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\" points=\"" << points << "\"/>\n";
  s << "<text x=\"" << w / 2 << "\" y=\"" << h - 8 << "\" text-anchor=\"middle\" font-size=\"12\">n</text>\n";
  s << "</svg>\n";
  return s.str();
}

// ---------------------------------------------------------------------------
// Commands

namespace {

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  bool quiet = false;
  int workers = 0;
};

int resolve_workers(int flag) {
  if (const char* env = std::getenv("LRME_WORKERS"); env && *env) {
    int v = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), v);
    if (ec != std::errc{} || *ptr != '\0' || v < 1) throw ArgumentError("LRME_WORKERS must be a positive integer");
    return v;
  }
  if (flag > 0) return flag;
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

double parse_gamma(const std::string& text, double auto_value, const GenParams* params) {
  if (text == "auto") return auto_value;
  if (text == "unit") {
    if (!params) throw ArgumentError("--gamma unit needs params.json in the input");
    return 1.0 / std::sqrt(params->p0 * static_cast<double>(std::min(params->n1, params->n2)));
  }
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(v > 0))
    throw ArgumentError("--gamma must be a positive number, \"auto\" or \"unit\"");
  return v;
}

void refuse_overwrite_input(const fs::path& input, const fs::path& out) {
  std::error_code ec;
  if (fs::exists(out) && fs::equivalent(input, out, ec)) {
    throw ArgumentError("--out must differ from --input; inputs are never modified");
  }
}

struct GenArgs {
  Index n = 0, n2 = 0, r = 2, d = 0;
  double p0 = 1.0, tau = 0.0;
  std::string sign = "symmetric-random", magnitude = "auto", model = "gaussian", out;
};

int cmd_gen(const GenArgs& a, const Globals& g, const std::vector<std::string>& argv, std::ostream& out) {
  GenParams p;
  p.n1 = a.n;
  p.n2 = a.n2 > 0 ? a.n2 : a.n;
  p.r = a.r;
  p.p0 = a.p0;
  p.tau = a.tau;
  p.d_block = a.d;
  p.corruption_sign = corruption_sign_from_string(a.sign);
  p.low_rank_model = low_rank_model_from_string(a.model);
  if (a.magnitude != "auto") {
    double m = 0;
    auto [ptr, ec] = std::from_chars(a.magnitude.data(), a.magnitude.data() + a.magnitude.size(), m);
    if (ec != std::errc{} || ptr != a.magnitude.data() + a.magnitude.size() || !(m > 0))
      throw ArgumentError("--magnitude must be a positive number or \"auto\"");
    p.corruption_magnitude = m;
  }
  p.seed = g.seed;
  p.validate();

  RunManifest manifest("gen", argv);
  manifest.set_config(to_json(p));
  manifest.set_base_seed(p.seed);
  const ProblemInstance inst = gen_instance(p);
  const fs::path dir = a.out;
  save_instance(dir, inst);
  for (const char* f : {"params.json", "B_star.bin", "A_star.bin", "observed.bin", "Phi.csv", "Omega.csv",
                        "Omega_d.csv", "Phi_d_complement.csv"})
    manifest.add_output(dir / f);
  manifest.set("mu", inst.mu);
  manifest.write(dir / "manifest.json");
  if (!g.quiet) {
    out << "wrote " << dir.string() << " (n1=" << p.n1 << " n2=" << p.n2 << " r=" << p.r
        << " |Phi|=" << inst.Phi.size() << " |Omega|=" << inst.Omega.size() << " mu=" << inst.mu << ")\n";
  }
  return kExitOk;
}

struct SolveArgs {
  std::string input, out, gamma = "auto";
  double tol = 1e-8, growth = 1.5;
  int max_iter = 1000;
};

int cmd_solve(const SolveArgs& a, const Globals& g, const std::vector<std::string>& argv, std::ostream& out) {
  const fs::path in = a.input, dir = a.out;
  if (!fs::is_directory(in)) throw IoError("input directory not found: " + in.string());
  refuse_overwrite_input(in, dir);
  const MatrixXd observed = read_matrix(in / "observed.bin");
  const EntrySet phi = read_entry_set_csv(in / "Phi.csv");
  std::optional<GenParams> params;
  if (fs::exists(in / "params.json")) params = gen_params_from_json(read_json(in / "params.json"));
  double auto_gamma = 0;
  if (params) {
    auto_gamma = gamma_default(params->p0, static_cast<double>(params->d_block),
                               static_cast<double>(std::min(observed.rows(), observed.cols())));
  } else if (a.gamma == "auto") {
    throw ArgumentError("--gamma auto needs params.json in the input");
  }

  SolverConfig<double> sc;
  sc.gamma = parse_gamma(a.gamma, auto_gamma, params ? &*params : nullptr);
  sc.tol = a.tol;
  sc.penalty_growth = a.growth;
  sc.max_iter = a.max_iter;
  sc.validate();

  RunManifest manifest("solve", argv);
  json cfg;
  cfg["input"] = in.string();
  cfg["gamma"] = sc.gamma;
  cfg["gamma_arg"] = a.gamma;
  cfg["tol"] = sc.tol;
  cfg["penalty_growth"] = sc.penalty_growth;
  cfg["penalty_init"] = "auto";
  cfg["max_iter"] = sc.max_iter;
  manifest.set_config(cfg);
  manifest.set_base_seed(params ? params->seed : 0);

  const auto res = solve(observed, phi, sc);
  fs::create_directories(dir);
  write_matrix_binary(dir / "A_hat.bin", res.A_hat);
  write_matrix_binary(dir / "B_hat.bin", res.B_hat);
  json rj = to_json(res);
  rj["gamma"] = sc.gamma;
  if (fs::exists(in / "B_star.bin")) {
    const MatrixXd b_star = read_matrix(in / "B_star.bin");
    const double rel = relative_error(res.B_hat, b_star);
    rj["relative_error"] = rel;
    rj["success"] = res.converged && rel < 1e-6;
  }
  write_json(dir / "result.json", rj);
  for (const char* f : {"A_hat.bin", "B_hat.bin", "result.json"}) manifest.add_output(dir / f);
  manifest.write(dir / "manifest.json");
  if (!g.quiet) {
    out << "iterations " << res.iterations << (res.converged ? " (converged)" : " (not converged)")
        << ", objective " << res.objective;
    if (rj.contains("relative_error")) out << ", relative error " << rj["relative_error"].get<double>();
    out << "\n";
  }
  return res.converged ? kExitOk : kExitDomain;
}

struct CertifyArgs {
  std::string input, out, kind = "deterministic", gamma = "auto";
  int k0 = 0;
};

int cmd_certify(const CertifyArgs& a, const Globals& g, const std::vector<std::string>& argv,
                std::ostream& out) {
  const fs::path in = a.input, report_path = a.out;
  if (a.kind != "deterministic" && a.kind != "golfing")
    throw ArgumentError("--kind must be deterministic or golfing");
  const ProblemInstance inst = load_instance(in);
  if (!inst.tangent.valid()) throw ArgumentError("certify: instance has rank 0");
  const double n1 = static_cast<double>(inst.B_star.rows()), n2 = static_cast<double>(inst.B_star.cols());
  const double r = static_cast<double>(inst.params.r);

  RunManifest manifest("certify", argv);
  json cfg;
  cfg["input"] = in.string();
  cfg["kind"] = a.kind;
  cfg["gamma_arg"] = a.gamma;

  CertificateReport report;
  json extra;
  if (a.kind == "deterministic") {
    const EntrySet gamma_c = inst.Gamma().complement();
    const Index d = gamma_c.max_line_count();
    const auto interval = deterministic_gamma_interval(inst.mu, r, static_cast<double>(d), n1, n2);
    const double auto_gamma =
        interval.lower < interval.upper
            ? 0.5 * (interval.lower + interval.upper)
            : gamma_default(inst.params.p0, static_cast<double>(inst.params.d_block), std::min(n1, n2));
    const double gamma = parse_gamma(a.gamma, auto_gamma, &inst.params);
    cfg["gamma"] = gamma;
    extra["d"] = d;
    extra["mu"] = inst.mu;
    extra["alpha"] = interval.alpha;
    extra["gamma_interval"] = {interval.lower, interval.upper};
    const auto tv = check_transversality(inst.tangent, gamma_c, inst.mu, r, d);
    extra["empirical_contraction"] = tv.empirical_contraction;
    if (!tv.ok) {
      report.kind = CertificateKind::Deterministic;
      report.conditions.push_back(
          make_condition("transversality_alpha", tv.alpha, 1.0, Relation::Less, ConditionRole::Optimality));
      report.warnings.push_back("alpha >= 1: the Neumann series is not guaranteed to converge; not built");
      report.finalize();
    } else {
      try {
        report = certify_deterministic(inst, gamma).report;
      } catch (const NumericalError& e) {
        report.kind = CertificateKind::Deterministic;
        report.conditions.push_back(
            make_condition("transversality_alpha", tv.alpha, 1.0, Relation::Less, ConditionRole::Optimality));
        report.conditions.push_back(make_condition("series_converged", 1.0, 0.0, Relation::Equal,
                                                   ConditionRole::Optimality));
        report.warnings.push_back(e.what());
        report.finalize();
      }
    }
  } else {
    const double gamma = parse_gamma(
        a.gamma,
        gamma_default(inst.params.p0, static_cast<double>(inst.params.d_block), std::min(n1, n2)),
        &inst.params);
    cfg["gamma"] = gamma;
    GolfingParams gp;
    gp.k0 = a.k0;
    gp.seed = g.seed;
    cfg["k0"] = gp.resolved_k0(inst.n());
    cfg["golfing_seed"] = gp.seed;
    const auto cert = build_golfing_certificate(inst, gamma, gp);
    report = verify_probabilistic(cert.W, inst, gamma);
    report.iterations = cert.k0;
    report.convergence_trace = cert.decay_trace;
    extra["q"] = cert.q;
  }
  manifest.set_config(cfg);
  manifest.set_base_seed(g.seed);

  json rj = to_json(report);
  for (auto& [k, v] : extra.items()) rj[k] = v;
  if (report_path.has_parent_path()) fs::create_directories(report_path.parent_path());
  write_json(report_path, rj);
  manifest.add_output(report_path);
  fs::path manifest_path = report_path;
  manifest_path.replace_extension(".manifest.json");
  manifest.write(manifest_path);
  if (!g.quiet) {
    for (const auto& c : report.conditions) {
      out << (c.satisfied ? "ok   " : "FAIL ") << c.name << ": " << c.value << " " << to_string(c.relation)
          << " " << c.threshold << "\n";
    }
    for (const auto& w : report.warnings) out << "warning: " << w << "\n";
    out << (report.passed ? "certificate passed" : "certificate failed") << "\n";
  }
  return report.passed ? kExitOk : kExitDomain;
}

struct SweepArgs {
  std::string experiment = "1", config, out;
};

int cmd_sweep(const SweepArgs& a, const Globals& g, const std::vector<std::string>& argv, std::ostream& out) {
  SweepConfig config;
  if (a.experiment == "custom") {
    if (a.config.empty()) throw ArgumentError("--experiment custom needs --config");
  } else if (a.experiment == "1" || a.experiment == "2" || a.experiment == "3") {
    config = experiment_preset(std::stoi(a.experiment));
  } else {
    throw ArgumentError("--experiment must be 1, 2, 3 or custom");
  }
  if (!a.config.empty()) config = sweep_config_from_json(read_json(a.config), config);
  if (g.seed_given) config.base_seed = g.seed;
  config.workers = resolve_workers(g.workers);
  config.validate();

  RunManifest manifest("sweep", argv);
  manifest.set_config(to_json(config));
  manifest.set_base_seed(config.base_seed);
  manifest.set("experiment", a.experiment);
  manifest.set("workers", config.workers);

  const SweepResult res = sweep(config);
  const fs::path dir = a.out;
  fs::create_directories(dir);
  std::string sweep_csv = "n,critical_value\n", probes_csv = "n,probe_value,successes,trials\n";
  json rows = json::array();
  for (const auto& r : res.rows) {
    sweep_csv += std::to_string(r.n) + "," + fmt(r.critical_value) + "\n";
    for (const auto& p : r.probes)
      probes_csv += std::to_string(r.n) + "," + fmt(p.value) + "," + std::to_string(p.successes) + "," +
                    std::to_string(p.trials) + "\n";
    rows.push_back(to_json(r));
  }
  write_file_atomic(dir / "sweep.csv", sweep_csv);
  write_file_atomic(dir / "probes.csv", probes_csv);
  write_file_atomic(dir / "fig.svg", render_svg(res));
  manifest.set("results", rows);
  manifest.set("sweep_seconds", res.wall_seconds);
  manifest.set("trials_run", res.trials_run);
  for (const char* f : {"sweep.csv", "probes.csv", "fig.svg"}) manifest.add_output(dir / f);
  manifest.write(dir / "manifest.json");
  if (!g.quiet) {
    for (const auto& r : res.rows) {
      out << "n=" << r.n << " critical " << to_string(config.axis) << " = " << r.critical_value;
      if (r.boundary) out << " [" << *r.boundary << "]";
      out << "\n";
    }
    out << res.trials_run << " trials in " << res.wall_seconds << " s\n";
  }
  return kExitOk;
}

struct DiagArgs {
  std::string input, set = "observed", out;
  double p = 0;
};

int cmd_diag(const DiagArgs& a, const Globals& g, const std::vector<std::string>& argv, std::ostream& out) {
  const ProblemInstance inst = load_instance(a.input);
  if (!inst.tangent.valid()) throw ArgumentError("diag: instance has rank 0");
  EntrySet sample;
  double p = a.p;
  if (a.set == "observed") {
    sample = inst.Phi;
    if (p == 0) p = inst.params.p0;
  } else if (a.set == "clean") {
    sample = inst.Gamma();
    if (p == 0) p = inst.params.p0 * (1.0 - inst.params.tau);
  } else {
    throw ArgumentError("--set must be observed or clean");
  }
  const std::uint64_t seed = g.seed_given ? g.seed : 0xd1a9ULL;
  const double dev = sampling_deviation(inst.tangent, sample, inst.Gamma_d(), p, seed);
  const double threshold = 1.0 / 3.0;
  const bool within = dev <= threshold;
  if (!g.quiet) {
    out << "deviation " << dev << "\nthreshold " << threshold << "\n"
        << (within ? "within threshold" : "exceeds threshold") << "\n";
  }
  if (!a.out.empty()) {
    RunManifest manifest("diag", argv);
    json cfg{{"input", a.input}, {"set", a.set}, {"p", p}, {"seed", seed}};
    manifest.set_config(cfg);
    manifest.set_base_seed(seed);
    const fs::path path = a.out;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_json(path, {{"deviation", dev}, {"threshold", threshold}, {"within", within}, {"p", p}});
    manifest.add_output(path);
    fs::path mp = path;
    mp.replace_extension(".manifest.json");
    manifest.write(mp);
  }
  return within ? kExitOk : kExitDomain;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-rank plus sparse recovery under errors and erasures", "lrme"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version_string());

  Globals g;
  auto* seed_opt = app.add_option("--seed", g.seed, "Seed (instance seed for gen, base seed for sweep)");
  app.add_flag("--quiet,-q", g.quiet, "Suppress progress output");
  app.add_option("--workers", g.workers, "Worker threads for sweeps (LRME_WORKERS overrides)")
      ->check(CLI::PositiveNumber);

  GenArgs ga;
  auto* gen = app.add_subcommand("gen", "Generate a problem instance directory");
  gen->add_option("--n", ga.n, "Rows (and columns unless --n2)")->required()->check(CLI::PositiveNumber);
  gen->add_option("--n2", ga.n2, "Columns")->check(CLI::PositiveNumber);
  gen->add_option("--r", ga.r, "Rank")->check(CLI::NonNegativeNumber);
  gen->add_option("--p0", ga.p0, "Observation probability")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--tau", ga.tau, "Corruption probability")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--d", ga.d, "Side of the adversarial block")->check(CLI::NonNegativeNumber);
  gen->add_option("--sign", ga.sign, "fixed-positive or symmetric-random")
      ->check(CLI::IsMember({"fixed-positive", "symmetric-random"}));
  gen->add_option("--magnitude", ga.magnitude, "Corruption magnitude or auto");
  gen->add_option("--model", ga.model, "gaussian or rademacher")->check(CLI::IsMember({"gaussian", "rademacher"}));
  gen->add_option("--out", ga.out, "Output directory")->required();

  SolveArgs sa;
  auto* solve_cmd = app.add_subcommand("solve", "Solve an instance");
  solve_cmd->add_option("--input", sa.input, "Instance directory")->required();
  solve_cmd->add_option("--gamma", sa.gamma, "Tradeoff parameter, auto (theorem) or unit (1/sqrt(p0 n))");
  solve_cmd->add_option("--tol", sa.tol, "Relative residual tolerance")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iter", sa.max_iter, "Iteration cap")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--growth", sa.growth, "Penalty growth factor");
  solve_cmd->add_option("--out", sa.out, "Output directory")->required();

  CertifyArgs ca;
  auto* certify = app.add_subcommand("certify", "Build and verify a dual certificate");
  certify->add_option("--input", ca.input, "Instance directory")->required();
  certify->add_option("--kind", ca.kind, "deterministic or golfing")
      ->check(CLI::IsMember({"deterministic", "golfing"}));
  certify->add_option("--gamma", ca.gamma, "Tradeoff parameter or auto");
  certify->add_option("--k0", ca.k0, "Golfing batches (default ceil(4 ln n))")->check(CLI::NonNegativeNumber);
  certify->add_option("--out", ca.out, "Report path")->required();

  SweepArgs wa;
  auto* sweep_cmd = app.add_subcommand("sweep", "Phase-transition sweep");
  sweep_cmd->add_option("--experiment", wa.experiment, "1, 2, 3 or custom");
  sweep_cmd->add_option("--config", wa.config, "JSON config (overrides the preset)");
  sweep_cmd->add_option("--out", wa.out, "Output directory")->required();

  DiagArgs da;
  auto* diag = app.add_subcommand("diag", "Sampling-operator deviation estimate");
  diag->add_option("--input", da.input, "Instance directory")->required();
  diag->add_option("--set", da.set, "observed (Phi) or clean (Phi minus Omega)")
      ->check(CLI::IsMember({"observed", "clean"}));
  diag->add_option("--p", da.p, "Sampling probability (default from params)")->check(CLI::Range(0.0, 1.0));
  diag->add_option("--out", da.out, "Optional JSON output");

  for (auto* sub : {gen, solve_cmd, certify, sweep_cmd, diag}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }
  g.seed_given = seed_opt->count() > 0;

  std::vector<std::string> argv{"lrme"};
  argv.insert(argv.end(), args.begin(), args.end());
  try {
    if (*gen) return cmd_gen(ga, g, argv, out);
    if (*solve_cmd) return cmd_solve(sa, g, argv, out);
    if (*certify) return cmd_certify(ca, g, argv, out);
    if (*sweep_cmd) return cmd_sweep(wa, g, argv, out);
    if (*diag) return cmd_diag(da, g, argv, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace lrme
