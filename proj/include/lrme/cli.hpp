#pragma once

// Command-line front end. run_cli takes the arguments after the program name
// and returns the process exit code:
//   0  success
//   1  domain failure (certificate failed, solver did not converge, ...)
//   2  usage or I/O error

#include <lrme/io.hpp>
#include <lrme/sweep.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace lrme {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version_string();

json to_json(const GammaPolicy& g);
GammaPolicy gamma_policy_from_json(const json& j);
json to_json(const SweepConfig& c);
// Fields absent from j keep their value in `base`.
SweepConfig sweep_config_from_json(const json& j, SweepConfig base = {});
json to_json(const CriticalResult& r);

// Line chart of critical value against n.
std::string render_svg(const SweepResult& result);

class RunManifest {
 public:
  RunManifest(std::string command, std::vector<std::string> argv);

  void set_config(json config) { config_ = std::move(config); }
  void set_base_seed(std::uint64_t seed) { base_seed_ = seed; }
  void set(const std::string& key, json value) { extra_[key] = std::move(value); }
  void add_output(const fs::path& path) { outputs_.push_back(path); }

  // Stamps the end time, lists the outputs with their sizes and writes the
  // manifest atomically.
  void write(const fs::path& path);

 private:
  std::string command_;
  std::vector<std::string> argv_;
  json config_ = json::object();
  json extra_ = json::object();
  std::uint64_t base_seed_ = 0;
  std::string started_;
  double started_clock_ = 0.0;
  std::vector<fs::path> outputs_;
};

}  // namespace lrme
