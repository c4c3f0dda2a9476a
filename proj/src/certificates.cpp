#include <lrme/certificates.hpp>

#include <algorithm>
#include <cmath>

namespace lrme {

std::string to_string(CertificateKind k) {
  return k == CertificateKind::Deterministic ? "deterministic" : "golfing";
}

std::string to_string(Relation r) {
  switch (r) {
    case Relation::Less: return "<";
    case Relation::LessEqual: return "<=";
    case Relation::Equal: return "==";
  }
  return "?";
}

Condition make_condition(std::string name, double value, double threshold, Relation relation,
                         ConditionRole role) {
  Condition c;
  c.name = std::move(name);
  c.value = value;
  c.threshold = threshold;
  c.relation = relation;
  c.role = role;
  c.margin = threshold - value;
  switch (relation) {
    case Relation::Less:
      c.satisfied = c.margin > 0.0;
      break;
    case Relation::LessEqual:
      // Non-strict inequalities between computed norms and closed-form bounds
      // can be attained exactly; allow for rounding in the last few digits.
      c.satisfied = value <= threshold + 1e-12 * std::max(1.0, std::abs(threshold));
      break;
    case Relation::Equal:
      c.satisfied = value <= threshold;
      break;
  }
  if (!std::isfinite(value)) c.satisfied = false;
  return c;
}

const Condition& CertificateReport::at(const std::string& name) const {
  for (const auto& c : conditions)
    if (c.name == name) return c;
  throw ArgumentError("certificate report has no condition '" + name + "'");
}

void CertificateReport::finalize() {
  passed = true;
  bounds_hold = true;
  for (const auto& c : conditions) {
    if (c.role == ConditionRole::Optimality) passed = passed && c.satisfied;
    else bounds_hold = bounds_hold && c.satisfied;
  }
}

DeterministicRun certify_deterministic(const ProblemInstance& inst, double gamma, double tol,
                                       int max_terms) {
  const EntrySet gamma_set = inst.Gamma();
  const EntrySet gamma_c = gamma_set.complement();
  const MatrixXd sign = sgn(inst.A_star);
  DeterministicRun run;
  run.certificate = build_deterministic_certificate(inst.tangent, gamma_c, inst.Phi, sign, gamma,
                                                    tol, max_terms);
  run.report = verify_deterministic(run.certificate.Q, inst.tangent, gamma_set, gamma_c, inst.Phi,
                                    sign, gamma);
  run.report.iterations = run.certificate.terms;
  run.report.convergence_trace = run.certificate.trace_b;
  return run;
}

GammaInterval deterministic_gamma_interval(double mu, double r, double d, double n1, double n2,
                                           double eta) {
  GammaInterval out;
  out.alpha = alpha_param(mu, r, d, n1, n2);
  const double incoh = std::sqrt(mu * r / (n1 * n2));
  out.lower = 1.0 - 2.0 * out.alpha > 0.0 ? incoh / (1.0 - 2.0 * out.alpha)
                                          : std::numeric_limits<double>::infinity();
  out.upper = d > 0.0 ? (1.0 - out.alpha) / (eta * d) - incoh
                      : std::numeric_limits<double>::infinity();
  return out;
}

int GolfingParams::resolved_k0(Index n) const {
  if (k0 > 0) return k0;
  return std::max(1, static_cast<int>(std::ceil(4.0 * std::log(static_cast<double>(n)))));
}

namespace {

// Membership of one entry in k0 batches, each Ber(q), conditioned on the entry
// belonging to at least one of them. The first batch index is a truncated
// geometric draw; later batches are independent Ber(q).
void conditional_memberships(Rng& rng, int k0, double q, std::vector<char>& member) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  member.assign(k0, 0);
  if (q >= 1.0) {
    std::fill(member.begin(), member.end(), 1);
    return;
  }
  const double total = 1.0 - std::pow(1.0 - q, k0);
  const double u = unif(rng) * total;
  int first = k0 - 1;
  double cumulative = 0.0;
  double miss = 1.0;
  for (int k = 0; k < k0; ++k) {
    cumulative += miss * q;
    miss *= 1.0 - q;
    if (u < cumulative) {
      first = k;
      break;
    }
  }
  member[first] = 1;
  for (int k = first + 1; k < k0; ++k) member[k] = unif(rng) < q ? 1 : 0;
}

}  // namespace

std::vector<EntrySet> sample_golfing_batches(const ProblemInstance& inst, int k0, double q1,
                                             double q2, std::uint64_t seed) {
  if (k0 < 1) throw ArgumentError("golfing: k0 must be >= 1");
  if (!(q1 > 0.0 && q1 <= 1.0) || !(q2 > 0.0 && q2 <= 1.0)) {
    throw ArgumentError("golfing: q1 and q2 must lie in (0, 1]");
  }
  const Index n1 = inst.B_star.rows(), n2 = inst.B_star.cols();
  std::vector<EntrySet> omega_k(k0, EntrySet(n1, n2)), phi_k(k0, EntrySet(n1, n2));
  std::vector<char> member;

  Rng rng_omega(derive_seed(seed, "golfing_clean"));
  for (const auto& [i, j] : inst.Omega.complement().indices()) {
    conditional_memberships(rng_omega, k0, q1, member);
    for (int k = 0; k < k0; ++k)
      if (member[k]) omega_k[k].insert(i, j);
  }
  Rng rng_phi(derive_seed(seed, "golfing_observed"));
  for (const auto& [i, j] : inst.Phi.indices()) {
    conditional_memberships(rng_phi, k0, q2, member);
    for (int k = 0; k < k0; ++k)
      if (member[k]) phi_k[k].insert(i, j);
  }
  const EntrySet gamma_d = inst.Gamma_d();
  std::vector<EntrySet> batches;
  batches.reserve(k0);
  for (int k = 0; k < k0; ++k) batches.push_back(omega_k[k] & phi_k[k] & gamma_d);
  return batches;
}

GolfingCertificate<double> build_golfing_certificate(const ProblemInstance& inst, double gamma,
                                                     const GolfingParams& params) {
  const int k0 = params.resolved_k0(inst.n());
  const double tau = inst.params.tau, p0 = inst.params.p0;
  const double q1 = params.q1 ? *params.q1 : 1.0 - std::pow(tau, 1.0 / k0);
  const double q2 = params.q2 ? *params.q2 : 1.0 - std::pow(1.0 - p0, 1.0 / k0);
  if (!(q1 * q2 > 0.0)) throw ArgumentError("golfing: q = q1 * q2 must be positive");
  auto batches = sample_golfing_batches(inst, k0, q1, q2, params.seed);
  return run_golfing(inst.tangent, inst.E_star(), gamma, std::move(batches), q1 * q2);
}

CertificateReport verify_probabilistic(const MatrixXd& w, const ProblemInstance& inst, double gamma) {
  return verify_probabilistic(w, inst.tangent, inst.E_star(), inst.Gamma(), gamma);
}

}  // namespace lrme
