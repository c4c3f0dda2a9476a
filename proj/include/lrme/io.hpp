#pragma once

// File formats.
//
//   matrix CSV     first line "rows,cols", then one comma-separated row per line
//   matrix binary  "LRME", rows (u32 LE), cols (u32 LE), rows*cols f64 LE, row-major
//   entry set CSV  first line "rows,cols", then one "i,j" line per member
//
// An instance directory holds params.json, B_star.bin, A_star.bin,
// observed.bin, Phi.csv and Omega.csv (plus Omega_d.csv and
// Phi_d_complement.csv for the deterministic components).

#include <lrme/certificates.hpp>
#include <lrme/entry_set.hpp>
#include <lrme/solver.hpp>
#include <lrme/synth.hpp>
#include <lrme/types.hpp>

#include "json.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>

namespace lrme {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Missing files and malformed content.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_matrix_csv(const fs::path& path, const MatrixXd& m);
MatrixXd read_matrix_csv(const fs::path& path);
void write_matrix_binary(const fs::path& path, const MatrixXd& m);
MatrixXd read_matrix_binary(const fs::path& path);
// Dispatches on the magic bytes.
MatrixXd read_matrix(const fs::path& path);

void write_entry_set_csv(const fs::path& path, const EntrySet& s);
EntrySet read_entry_set_csv(const fs::path& path);

json to_json(const GenParams& p);
GenParams gen_params_from_json(const json& j);

void save_instance(const fs::path& dir, const ProblemInstance& inst);
// Rebuilds the tangent space and incoherence from B_star and params.r.
ProblemInstance load_instance(const fs::path& dir);

json to_json(const Condition& c);
json to_json(const CertificateReport& r);
json to_json(const SolverResult<double>& r);

void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

// Write to a sibling temporary and rename over the target.
void write_file_atomic(const fs::path& path, const std::string& content);

}  // namespace lrme
