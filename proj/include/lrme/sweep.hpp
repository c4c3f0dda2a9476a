#pragma once

// Monte-Carlo phase-transition search. For each matrix size, a coarse scan
// walks the axis from the easy end until the first failing probe, then the
// bracket is bisected. A probe succeeds when at least half of its trials
// recover B* to the success threshold.

#include <lrme/synth.hpp>
#include <lrme/types.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lrme {

enum class Axis { P0, Tau, D };

std::string to_string(Axis a);
Axis axis_from_string(const std::string& s);

// How a trial picks gamma.
//   theorem  1 / (32 sqrt(p0 (d + 1) n))
//   scaled   scale times the theorem value
//   fixed    value, independent of the trial
// count_block decides whether the adversarial block side enters as d.
struct GammaPolicy {
  enum class Mode { Theorem, Scaled, Fixed };
  Mode mode = Mode::Theorem;
  double value = 1.0;
  bool count_block = true;

  double gamma_for(const GenParams& p) const;
  std::string describe() const;

  static GammaPolicy theorem() { return {}; }
  // 1 / sqrt(p0 n): the theorem's scaling with unit constant and no block term.
  static GammaPolicy unit_constant() { return {Mode::Scaled, 32.0, false}; }
};

struct SweepConfig {
  Axis axis = Axis::P0;
  GenParams fixed;
  std::vector<Index> n_list{50, 100, 200, 400};
  int trials_per_point = 10;
  double success_threshold = 1e-6;
  std::optional<double> bisection_tol;      // default 0.01, or 1 for axis d
  std::optional<std::vector<double>> coarse_grid;  // default 8 evenly spaced probes
  std::uint64_t base_seed = 0;
  int max_solver_iter = 1000;
  double solver_tol = 1e-8;
  double penalty_growth = 1.5;
  GammaPolicy gamma;
  int workers = 1;

  double resolved_bisection_tol() const;
  // Coarse probes for size n, ordered from the easy end of the axis.
  std::vector<double> resolved_coarse_grid(Index n) const;
  void validate() const;
};

// Presets for the three experiments: 1 sweeps p0, 2 sweeps tau, 3 sweeps the
// adversarial block side d.
SweepConfig experiment_preset(int experiment);

struct TrialOutcome {
  bool success = false;
  double relative_error = 0.0;
  int iterations = 0;
  std::optional<std::string> error;
};

// Generate, solve, score. Solver failures are reported as unsuccessful.
TrialOutcome run_trial(const GenParams& params, double gamma, const SweepConfig& config);

struct Probe {
  double value = 0.0;
  int successes = 0;
  int trials = 0;
  bool succeeded() const { return 2 * successes >= trials; }
};

struct CriticalResult {
  Index n = 0;
  double critical_value = 0.0;
  std::optional<double> good;  // easiest-side probe known to succeed nearest the transition
  std::optional<double> bad;   // nearest probe known to fail
  std::optional<std::string> boundary;  // set when no bracket was found
  std::vector<Probe> probes;   // in evaluation order
  std::vector<std::string> errors;
};

struct SweepResult {
  SweepConfig config;
  std::vector<CriticalResult> rows;  // one per n, in n_list order
  double wall_seconds = 0.0;
  long long trials_run = 0;
};

CriticalResult find_critical(Index n, const SweepConfig& config);
SweepResult sweep(const SweepConfig& config);

// Seed of one trial; unique per (n, probe index, trial index).
std::uint64_t trial_seed(std::uint64_t base_seed, Index n, int probe, int trial);

// Parameters of one trial at a given axis value.
GenParams probe_params(const SweepConfig& config, Index n, double value, std::uint64_t seed);

}  // namespace lrme
