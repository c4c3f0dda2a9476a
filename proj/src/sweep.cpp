#include <lrme/sweep.hpp>

#include <lrme/rng.hpp>
#include <lrme/solver.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <thread>

namespace lrme {

std::string to_string(Axis a) {
  switch (a) {
    case Axis::P0: return "p0";
    case Axis::Tau: return "tau";
    case Axis::D: return "d";
  }
  return "?";
}

Axis axis_from_string(const std::string& s) {
  if (s == "p0") return Axis::P0;
  if (s == "tau") return Axis::Tau;
  if (s == "d") return Axis::D;
  throw ArgumentError("unknown axis '" + s + "' (expected p0, tau or d)");
}

double GammaPolicy::gamma_for(const GenParams& p) const {
  if (mode == Mode::Fixed) return value;
  const double d = count_block ? static_cast<double>(p.d_block) : 0.0;
  const double g = gamma_default(p.p0, d, static_cast<double>(std::min(p.n1, p.n2)));
  return mode == Mode::Scaled ? value * g : g;
}

std::string GammaPolicy::describe() const {
  const std::string root = count_block ? "sqrt(p0 (d + 1) n)" : "sqrt(p0 n)";
  std::ostringstream s;
  s << value;
  switch (mode) {
    case Mode::Theorem: return "1 / (32 " + root + ")";
    case Mode::Scaled: return value == 32.0 ? "1 / " + root : s.str() + " / (32 " + root + ")";
    case Mode::Fixed: return s.str();
  }
  return "?";
}

double SweepConfig::resolved_bisection_tol() const {
  if (bisection_tol) return *bisection_tol;
  return axis == Axis::D ? 1.0 : 0.01;
}

std::vector<double> SweepConfig::resolved_coarse_grid(Index n) const {
  std::vector<double> grid;
  if (coarse_grid) {
    grid = *coarse_grid;
  } else {
    for (int k = 0; k < 8; ++k) {
      switch (axis) {
        case Axis::P0: grid.push_back((8 - k) / 8.0); break;
        case Axis::Tau: grid.push_back(k / 8.0); break;
        case Axis::D: grid.push_back(std::round(k * (static_cast<double>(n) / 2.0) / 7.0)); break;
      }
    }
  }
  // Easy end first: large p0, small tau, small d.
  if (axis == Axis::P0) std::sort(grid.begin(), grid.end(), std::greater<>());
  else std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

void SweepConfig::validate() const {
  if (n_list.empty()) throw ArgumentError("sweep: n_list must not be empty");
  for (Index n : n_list)
    if (n < 1) throw ArgumentError("sweep: every n must be >= 1");
  if (trials_per_point < 1) throw ArgumentError("sweep: trials_per_point must be >= 1");
  if (!(success_threshold > 0.0)) throw ArgumentError("sweep: success_threshold must be positive");
  if (!(resolved_bisection_tol() > 0.0)) throw ArgumentError("sweep: bisection_tol must be positive");
  if (max_solver_iter < 1) throw ArgumentError("sweep: max_solver_iter must be >= 1");
  if (!(penalty_growth > 1.0)) throw ArgumentError("sweep: penalty_growth must be > 1");
  if (!(gamma.value > 0.0)) throw ArgumentError("sweep: gamma value must be positive");
  if (workers < 1) throw ArgumentError("sweep: workers must be >= 1");
  if (coarse_grid && coarse_grid->empty()) throw ArgumentError("sweep: coarse_grid must not be empty");
  for (Index n : n_list) {
    for (double v : resolved_coarse_grid(n)) {
      const bool ok = axis == Axis::P0    ? (v > 0.0 && v <= 1.0)
                      : axis == Axis::Tau ? (v >= 0.0 && v <= 1.0)
                                          : (v >= 0.0 && v <= static_cast<double>(n) && v == std::floor(v));
      if (!ok) throw ArgumentError("sweep: coarse probe " + std::to_string(v) + " is outside the axis range");
    }
  }
}

SweepConfig experiment_preset(int experiment) {
  SweepConfig c;
  c.fixed.r = 2;
  c.fixed.corruption_sign = CorruptionSign::SymmetricRandom;
  c.fixed.tau = 0.1;
  c.fixed.d_block = 0;
  c.gamma = GammaPolicy::unit_constant();
  c.penalty_growth = 1.1;
  c.max_solver_iter = 300;
  switch (experiment) {
    case 1:
      c.axis = Axis::P0;
      break;
    case 2:
      c.axis = Axis::Tau;
      c.fixed.p0 = 0.9;
      break;
    case 3:
      c.axis = Axis::D;
      c.fixed.p0 = 0.5;
      break;
    default:
      throw ArgumentError("unknown experiment " + std::to_string(experiment) + " (expected 1, 2 or 3)");
  }
  return c;
}

std::uint64_t trial_seed(std::uint64_t base_seed, Index n, int probe, int trial) {
  return derive_seed(base_seed, {static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(probe),
                                 static_cast<std::uint64_t>(trial)});
}

GenParams probe_params(const SweepConfig& config, Index n, double value, std::uint64_t seed) {
  GenParams p = config.fixed;
  p.n1 = p.n2 = n;
  p.seed = seed;
  switch (config.axis) {
    case Axis::P0: p.p0 = value; break;
    case Axis::Tau: p.tau = value; break;
    case Axis::D: p.d_block = static_cast<Index>(value); break;
  }
  return p;
}

TrialOutcome run_trial(const GenParams& params, double gamma, const SweepConfig& config) {
  TrialOutcome out;
  try {
    const ProblemInstance inst = gen_instance(params);
    SolverConfig<double> sc;
    sc.gamma = gamma;
    sc.penalty_growth = config.penalty_growth;
    sc.tol = config.solver_tol;
    sc.max_iter = config.max_solver_iter;
    const auto res = solve(inst.observed, inst.Phi, sc);
    out.iterations = res.iterations;
    out.relative_error = relative_error(res.B_hat, inst.B_star);
    out.success = is_success(res, inst.B_star, config.success_threshold);
  } catch (const NumericalError& e) {
    out.success = false;
    out.error = e.what();
  }
  return out;
}

namespace {

// Runs fn(0..count-1) on up to `workers` threads. Results are written by
// index, so the schedule never affects the output.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(std::max(1, workers)), count);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

class Search {
 public:
  Search(Index n, const SweepConfig& config)
      : config_(config), grid_(config.resolved_coarse_grid(n)), tol_(config.resolved_bisection_tol()) {
    result_.n = n;
  }

  bool done() const { return done_; }
  int probe_index() const { return static_cast<int>(result_.probes.size()); }

  double next_value() const {
    if (scanning_) return grid_[scan_];
    const double mid = 0.5 * (*result_.good + *result_.bad);
    return config_.axis == Axis::D ? std::floor(mid) : mid;
  }

  void record(double value, const std::vector<TrialOutcome>& outcomes) {
    Probe p;
    p.value = value;
    p.trials = static_cast<int>(outcomes.size());
    for (std::size_t t = 0; t < outcomes.size(); ++t) {
      if (outcomes[t].success) ++p.successes;
      if (outcomes[t].error) {
        result_.errors.push_back("n=" + std::to_string(result_.n) + " " + to_string(config_.axis) + "=" +
                                 std::to_string(value) + " trial " + std::to_string(t) + ": " +
                                 *outcomes[t].error);
      }
    }
    result_.probes.push_back(p);
    const bool ok = p.succeeded();
    if (scanning_) {
      if (ok) {
        result_.good = value;
        if (++scan_ == grid_.size()) finish_boundary("recovery-at-all-probes", value);
        return;
      }
      result_.bad = value;
      if (!result_.good) {
        finish_boundary("no-recovery-at-" + format_value(value), value);
        return;
      }
      scanning_ = false;
    } else if (ok) {
      result_.good = value;
    } else {
      result_.bad = value;
    }
    if (std::abs(*result_.bad - *result_.good) <= tol_ + 1e-12) {
      result_.critical_value = 0.5 * (*result_.good + *result_.bad);
      done_ = true;
    }
  }

  CriticalResult take() { return std::move(result_); }

 private:
  std::string format_value(double v) const {
    if (config_.axis == Axis::D || v == std::floor(v)) return std::to_string(static_cast<long long>(v));
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    return s;
  }

  void finish_boundary(std::string flag, double value) {
    result_.boundary = std::move(flag);
    result_.critical_value = value;
    done_ = true;
  }

  const SweepConfig& config_;
  std::vector<double> grid_;
  double tol_;
  std::size_t scan_ = 0;
  bool scanning_ = true;
  bool done_ = false;
  CriticalResult result_;
};

struct Task {
  std::size_t search;
  int trial;
  GenParams params;
};

}  // namespace

SweepResult sweep(const SweepConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  SweepResult out;
  out.config = config;

  std::vector<Search> searches;
  searches.reserve(config.n_list.size());
  for (Index n : config.n_list) searches.emplace_back(n, config);

  // Every unfinished search contributes one probe per round; all trials of
  // the round share the worker pool.
  while (std::any_of(searches.begin(), searches.end(), [](const Search& s) { return !s.done(); })) {
    std::vector<Task> tasks;
    std::vector<double> values(searches.size(), 0.0);
    for (std::size_t s = 0; s < searches.size(); ++s) {
      if (searches[s].done()) continue;
      values[s] = searches[s].next_value();
      const Index n = config.n_list[s];
      for (int t = 0; t < config.trials_per_point; ++t) {
        tasks.push_back({s, t,
                         probe_params(config, n, values[s],
                                      trial_seed(config.base_seed, n, searches[s].probe_index(), t))});
      }
    }
    std::vector<TrialOutcome> outcomes(tasks.size());
    parallel_for(tasks.size(), config.workers, [&](std::size_t i) {
      outcomes[i] = run_trial(tasks[i].params, config.gamma.gamma_for(tasks[i].params), config);
    });
    out.trials_run += static_cast<long long>(tasks.size());

    std::vector<std::vector<TrialOutcome>> per_search(searches.size());
    for (std::size_t i = 0; i < tasks.size(); ++i) per_search[tasks[i].search].push_back(outcomes[i]);
    for (std::size_t s = 0; s < searches.size(); ++s)
      if (!searches[s].done()) searches[s].record(values[s], per_search[s]);
  }

  for (auto& s : searches) out.rows.push_back(s.take());
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

CriticalResult find_critical(Index n, const SweepConfig& config) {
  SweepConfig single = config;
  single.n_list = {n};
  return std::move(sweep(single).rows.front());
}

}  // namespace lrme
