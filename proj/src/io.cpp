#include <lrme/io.hpp>

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace lrme {

namespace {

std::ifstream open_in(const fs::path& path, std::ios::openmode mode = std::ios::in) {
  std::ifstream in(path, mode);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

std::string format_double(double v) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw IoError("cannot format value");
  return std::string(buf.data(), end);
}

std::vector<std::string> split_commas(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

double parse_double(const std::string& text, const fs::path& path, std::size_t line_no) {
  const std::string t = trim(text);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad number '" + t + "'");
  }
  return v;
}

long long parse_int(const std::string& text, const fs::path& path, std::size_t line_no) {
  const std::string t = trim(text);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty()) {
    throw IoError(path.string() + ":" + std::to_string(line_no) + ": bad integer '" + t + "'");
  }
  return v;
}

std::pair<Index, Index> read_shape_header(std::istream& in, const fs::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw IoError(path.string() + ": empty file");
  const auto f = split_commas(line);
  if (f.size() != 2) throw IoError(path.string() + ":1: expected header 'rows,cols'");
  const long long rows = parse_int(f[0], path, 1), cols = parse_int(f[1], path, 1);
  if (rows < 0 || cols < 0) throw IoError(path.string() + ":1: negative shape");
  return {static_cast<Index>(rows), static_cast<Index>(cols)};
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int b = bytes - 1; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

constexpr std::array<char, 4> kMagic{'L', 'R', 'M', 'E'};

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    auto out = open_out(tmp, std::ios::binary);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_matrix_csv(const fs::path& path, const MatrixXd& m) {
  std::string s = std::to_string(m.rows()) + "," + std::to_string(m.cols()) + "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j) s += ',';
      s += format_double(m(i, j));
    }
    s += '\n';
  }
  write_file_atomic(path, s);
}

MatrixXd read_matrix_csv(const fs::path& path) {
  auto in = open_in(path);
  const auto [rows, cols] = read_shape_header(in, path);
  MatrixXd m(rows, cols);
  std::string line;
  for (Index i = 0; i < rows; ++i) {
    const std::size_t line_no = static_cast<std::size_t>(i) + 2;
    if (!std::getline(in, line)) throw IoError(path.string() + ": expected " + std::to_string(rows) + " rows");
    const auto f = split_commas(line);
    if (static_cast<Index>(f.size()) != cols) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(cols) + " values");
    }
    for (Index j = 0; j < cols; ++j) m(i, j) = parse_double(f[j], path, line_no);
  }
  if (!m.allFinite()) throw IoError(path.string() + ": non-finite value");
  return m;
}

void write_matrix_binary(const fs::path& path, const MatrixXd& m) {
  if (m.rows() > UINT32_MAX || m.cols() > UINT32_MAX) throw IoError("matrix too large for binary format");
  std::string s(kMagic.begin(), kMagic.end());
  s.reserve(12 + 8 * static_cast<std::size_t>(m.size()));
  put_u32(s, static_cast<std::uint32_t>(m.rows()));
  put_u32(s, static_cast<std::uint32_t>(m.cols()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) put_u64(s, std::bit_cast<std::uint64_t>(m(i, j)));
  write_file_atomic(path, s);
}

MatrixXd read_matrix_binary(const fs::path& path) {
  auto in = open_in(path, std::ios::binary);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), kMagic.data(), 4) != 0) {
    throw IoError(path.string() + ": not an LRME binary matrix");
  }
  const auto rows = static_cast<Index>(get_le(buf.data() + 4, 4));
  const auto cols = static_cast<Index>(get_le(buf.data() + 8, 4));
  const std::size_t expected = 12 + 8 * static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (buf.size() != expected) {
    throw IoError(path.string() + ": size " + std::to_string(buf.size()) + " does not match header (" +
                  std::to_string(expected) + ")");
  }
  MatrixXd m(rows, cols);
  const unsigned char* p = buf.data() + 12;
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j, p += 8) m(i, j) = std::bit_cast<double>(get_le(p, 8));
  if (!m.allFinite()) throw IoError(path.string() + ": non-finite value");
  return m;
}

MatrixXd read_matrix(const fs::path& path) {
  auto in = open_in(path, std::ios::binary);
  char head[4] = {};
  in.read(head, 4);
  if (in.gcount() == 4 && std::memcmp(head, kMagic.data(), 4) == 0) return read_matrix_binary(path);
  return read_matrix_csv(path);
}

void write_entry_set_csv(const fs::path& path, const EntrySet& s) {
  std::string out = std::to_string(s.rows()) + "," + std::to_string(s.cols()) + "\n";
  for (const auto& [i, j] : s.indices()) out += std::to_string(i) + "," + std::to_string(j) + "\n";
  write_file_atomic(path, out);
}

EntrySet read_entry_set_csv(const fs::path& path) {
  auto in = open_in(path);
  const auto [rows, cols] = read_shape_header(in, path);
  std::vector<std::pair<Index, Index>> idx;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_commas(line);
    if (f.size() != 2) throw IoError(path.string() + ":" + std::to_string(line_no) + ": expected 'i,j'");
    idx.emplace_back(parse_int(f[0], path, line_no), parse_int(f[1], path, line_no));
  }
  try {
    return EntrySet::from_indices(rows, cols, idx);
  } catch (const ArgumentError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

json to_json(const GenParams& p) {
  json j;
  j["n1"] = p.n1;
  j["n2"] = p.n2;
  j["r"] = p.r;
  j["p0"] = p.p0;
  j["tau"] = p.tau;
  j["d_block"] = p.d_block;
  j["corruption_sign"] = to_string(p.corruption_sign);
  if (p.corruption_magnitude) j["corruption_magnitude"] = *p.corruption_magnitude;
  else j["corruption_magnitude"] = "auto";
  j["seed"] = p.seed;
  j["low_rank_model"] = to_string(p.low_rank_model);
  return j;
}

GenParams gen_params_from_json(const json& j) {
  GenParams p;
  try {
    if (j.contains("n")) p.n1 = p.n2 = j.at("n").get<Index>();
    if (j.contains("n1")) p.n1 = j.at("n1").get<Index>();
    if (j.contains("n2")) p.n2 = j.at("n2").get<Index>();
    if (j.contains("r")) p.r = j.at("r").get<Index>();
    if (j.contains("p0")) p.p0 = j.at("p0").get<double>();
    if (j.contains("tau")) p.tau = j.at("tau").get<double>();
    if (j.contains("d_block")) p.d_block = j.at("d_block").get<Index>();
    if (j.contains("corruption_sign"))
      p.corruption_sign = corruption_sign_from_string(j.at("corruption_sign").get<std::string>());
    if (j.contains("corruption_magnitude")) {
      const auto& m = j.at("corruption_magnitude");
      if (m.is_string()) {
        if (m.get<std::string>() != "auto") throw IoError("corruption_magnitude must be a number or \"auto\"");
        p.corruption_magnitude.reset();
      } else {
        p.corruption_magnitude = m.get<double>();
      }
    }
    if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("low_rank_model"))
      p.low_rank_model = low_rank_model_from_string(j.at("low_rank_model").get<std::string>());
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed parameters: ") + e.what());
  }
  return p;
}

void save_instance(const fs::path& dir, const ProblemInstance& inst) {
  fs::create_directories(dir);
  write_json(dir / "params.json", to_json(inst.params));
  write_matrix_binary(dir / "B_star.bin", inst.B_star);
  write_matrix_binary(dir / "A_star.bin", inst.A_star);
  write_matrix_binary(dir / "observed.bin", inst.observed);
  write_entry_set_csv(dir / "Phi.csv", inst.Phi);
  write_entry_set_csv(dir / "Omega.csv", inst.Omega);
  write_entry_set_csv(dir / "Omega_d.csv", inst.Omega_d);
  write_entry_set_csv(dir / "Phi_d_complement.csv", inst.Phi_d_complement);
}

ProblemInstance load_instance(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("instance directory not found: " + dir.string());
  ProblemInstance inst;
  inst.params = gen_params_from_json(read_json(dir / "params.json"));
  inst.B_star = read_matrix(dir / "B_star.bin");
  inst.A_star = read_matrix(dir / "A_star.bin");
  inst.observed = read_matrix(dir / "observed.bin");
  inst.Phi = read_entry_set_csv(dir / "Phi.csv");
  inst.Omega = read_entry_set_csv(dir / "Omega.csv");
  const Index n1 = inst.B_star.rows(), n2 = inst.B_star.cols();
  inst.Omega_d = fs::exists(dir / "Omega_d.csv") ? read_entry_set_csv(dir / "Omega_d.csv")
                                                 : gen_adversarial_block(n1, n2, inst.params.d_block).support;
  inst.Phi_d_complement = fs::exists(dir / "Phi_d_complement.csv")
                              ? read_entry_set_csv(dir / "Phi_d_complement.csv")
                              : EntrySet(n1, n2);
  auto same = [&](Index r, Index c) { return r == n1 && c == n2; };
  if (!same(inst.A_star.rows(), inst.A_star.cols()) || !same(inst.observed.rows(), inst.observed.cols()) ||
      !same(inst.Phi.rows(), inst.Phi.cols()) || !same(inst.Omega.rows(), inst.Omega.cols()) ||
      !same(inst.Omega_d.rows(), inst.Omega_d.cols()) ||
      !same(inst.Phi_d_complement.rows(), inst.Phi_d_complement.cols())) {
    throw IoError(dir.string() + ": instance files disagree on the matrix shape");
  }
  const Index r = inst.params.r;
  if (r < 0 || r > std::min(n1, n2)) throw IoError(dir.string() + ": params.r out of range");
  if (r == 0) {
    inst.tangent = TangentSpace<double>::empty(n1, n2);
  } else {
    auto dec = svd(inst.B_star);
    inst.tangent = TangentSpace<double>(dec.U.leftCols(r), dec.V.leftCols(r), 1e-8);
    inst.singular_values = dec.singular_values.head(r);
    inst.mu = incoherence(inst.tangent);
  }
  return inst;
}

json to_json(const Condition& c) {
  json j;
  j["name"] = c.name;
  j["value"] = c.value;
  j["threshold"] = c.threshold;
  j["direction"] = to_string(c.relation);
  j["margin"] = c.margin;
  j["passed"] = c.satisfied;
  j["role"] = c.role == ConditionRole::Optimality ? "optimality" : "analytic-bound";
  return j;
}

json to_json(const CertificateReport& r) {
  json j;
  j["kind"] = to_string(r.kind);
  j["passed"] = r.passed;
  j["bounds_hold"] = r.bounds_hold;
  j["iterations"] = r.iterations;
  j["conditions"] = json::array();
  for (const auto& c : r.conditions) j["conditions"].push_back(to_json(c));
  j["convergence_trace"] = r.convergence_trace;
  j["warnings"] = r.warnings;
  return j;
}

json to_json(const SolverResult<double>& r) {
  json j;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["objective"] = r.objective;
  j["residuals"] = r.residual_history;
  return j;
}

void write_json(const fs::path& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

}  // namespace lrme
