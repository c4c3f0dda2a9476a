#pragma once

// Dual certificates for the recovery program.
//
// Two constructions are provided:
//   * the deterministic one, Q = Q_a + Q_b, built from alternating
//     projections onto T and Gamma^c; it converges geometrically whenever the
//     transversality constant alpha is below one;
//   * the golfing one, W = sum_k R_k(D_{k-1}), built from k0 independently
//     sampled batches of observed clean entries.
// Verifiers evaluate every optimality condition numerically and report
// margins. They never claim more than the numbers show.

#include <lrme/entry_set.hpp>
#include <lrme/linops.hpp>
#include <lrme/rng.hpp>
#include <lrme/synth.hpp>
#include <lrme/types.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace lrme {

enum class CertificateKind { Deterministic, Golfing };
std::string to_string(CertificateKind k);

// Less: value < threshold. LessEqual: value <= threshold up to rounding.
// Equal: value is a residual that must not exceed the tolerance in threshold.
enum class Relation { Less, LessEqual, Equal };
std::string to_string(Relation r);

// Optimality conditions decide `passed`; analytic bounds are reported
// alongside and decide `bounds_hold`.
enum class ConditionRole { Optimality, AnalyticBound };

struct Condition {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  Relation relation = Relation::Less;
  ConditionRole role = ConditionRole::Optimality;
  double margin = 0.0;  // threshold - value
  bool satisfied = false;
};

Condition make_condition(std::string name, double value, double threshold, Relation relation,
                         ConditionRole role = ConditionRole::Optimality);

struct CertificateReport {
  CertificateKind kind = CertificateKind::Deterministic;
  std::vector<Condition> conditions;
  bool passed = false;
  bool bounds_hold = true;
  int iterations = 0;  // series terms or golfing batches
  std::vector<double> convergence_trace;
  std::vector<std::string> warnings;

  const Condition& at(const std::string& name) const;
  void finalize();  // recompute passed / bounds_hold from the conditions
};

// ---------------------------------------------------------------------------
// Transversality

struct Transversality {
  double alpha = 0.0;
  bool ok = false;
  double empirical_contraction = 0.0;
};

/// alpha from (mu, r, d) and the largest observed ratio
/// ||P_T(P_{Gamma^c}(M))||_inf / ||M||_inf over `samples` random M on Gamma^c.
/// Throws ArgumentError when some row or column of gamma_c holds more than d entries.
template <typename Scalar>
Transversality check_transversality(const TangentSpace<Scalar>& t, const EntrySet& gamma_c,
                                    double mu, double r, Index d, std::uint64_t seed = 0x7a5ULL,
                                    int samples = 50) {
  if (gamma_c.rows() != t.rows() || gamma_c.cols() != t.cols()) {
    throw DimensionError("check_transversality: entry set shape does not match T");
  }
  const int actual = gamma_c.max_line_count();
  if (d < 0 || actual > d) {
    throw ArgumentError("check_transversality: Gamma^c has " + std::to_string(actual) +
                        " entries in some row or column, more than d = " + std::to_string(d));
  }
  Transversality out;
  out.alpha = alpha_param(mu, r, static_cast<double>(d), static_cast<double>(t.rows()),
                          static_cast<double>(t.cols()));
  out.ok = out.alpha < 1.0;
  if (gamma_c.is_empty()) return out;

  Rng rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const auto idx = gamma_c.indices();
  for (int s = 0; s < samples; ++s) {
    Matrix<Scalar> m = Matrix<Scalar>::Zero(t.rows(), t.cols());
    for (const auto& [i, j] : idx) m(i, j) = static_cast<Scalar>(unif(rng));
    const Scalar denom = inf_norm(m);
    if (denom == Scalar(0)) continue;
    const double ratio = static_cast<double>(inf_norm(project_tangent(t, m)) / denom);
    out.empirical_contraction = std::max(out.empirical_contraction, ratio);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Deterministic certificate

template <typename Scalar>
struct DeterministicCertificate {
  Matrix<Scalar> Q;
  Matrix<Scalar> Q_a;  // P_T(Q_a) = 0, P_{Gamma^c}(Q_a) = gamma P_Phi(sgn A*)
  Matrix<Scalar> Q_b;  // P_T(Q_b) = U V^T, P_{Gamma^c}(Q_b) = 0
  double alpha = 0.0;
  int terms = 0;                   // longest series length
  std::vector<double> trace_a;     // ||term_k||_inf of the Q_a series
  std::vector<double> trace_b;     // ||term_k||_inf of the Q_b series
};

namespace detail {

// S_W = W + (P_T P_{Gamma^c}) W + (P_T P_{Gamma^c})^2 W + ..., summed until a
// term drops below tol in max-abs norm.
template <typename Scalar>
Matrix<Scalar> neumann_sum(const TangentSpace<Scalar>& t, const EntrySet& gamma_c,
                           Matrix<Scalar> term, double tol, int max_terms,
                           std::vector<double>& trace, int& terms) {
  Matrix<Scalar> sum = Matrix<Scalar>::Zero(term.rows(), term.cols());
  trace.clear();
  for (terms = 0; terms < max_terms; ++terms) {
    const double norm = static_cast<double>(inf_norm(term));
    trace.push_back(norm);
    if (norm < tol) return sum;
    sum += term;
    term = project_tangent(t, project_entries(term, gamma_c));
  }
  throw ConvergenceError("deterministic certificate: series did not converge in " +
                         std::to_string(max_terms) + " terms (last term norm " +
                         std::to_string(trace.back()) + ")");
}

}  // namespace detail

/// Q = Q_a + Q_b with Q_b = P_Gamma(S_{UV^T}) and Q_a = M* - P_Gamma(S_{P_T M*}),
/// M* = gamma P_Phi(sgn A*). Throws ArgumentError when alpha >= 1 and
/// ConvergenceError when a series is still above tol after max_terms.
template <typename Scalar, typename Derived>
DeterministicCertificate<Scalar> build_deterministic_certificate(
    const TangentSpace<Scalar>& t, const EntrySet& gamma_c, const EntrySet& phi,
    const Eigen::MatrixBase<Derived>& sgn_a_star, Scalar gamma, double tol = 1e-12,
    int max_terms = 500) {
  if (!t.valid()) throw ArgumentError("deterministic certificate: tangent space has rank 0");
  const Index d = gamma_c.max_line_count();
  const double mu = static_cast<double>(incoherence(t));
  const auto trans = check_transversality(t, gamma_c, mu, static_cast<double>(t.rank()), d);
  if (!trans.ok) {
    throw ArgumentError("deterministic certificate: precondition alpha < 1 violated (alpha = " +
                        std::to_string(trans.alpha) + ")");
  }
  const EntrySet gamma_set = gamma_c.complement();
  const Matrix<Scalar> m_star = gamma * project_entries(sgn_a_star, phi);
  const Matrix<Scalar> n_star = t.uvt();

  DeterministicCertificate<Scalar> out;
  out.alpha = trans.alpha;
  int terms_a = 0, terms_b = 0;
  const Matrix<Scalar> s_a =
      detail::neumann_sum(t, gamma_c, project_tangent(t, m_star), tol, max_terms, out.trace_a, terms_a);
  const Matrix<Scalar> s_b = detail::neumann_sum(t, gamma_c, n_star, tol, max_terms, out.trace_b, terms_b);
  out.terms = std::max(terms_a, terms_b);
  out.Q_a = m_star - project_entries(s_a, gamma_set);
  out.Q_b = project_entries(s_b, gamma_set);
  out.Q = out.Q_a + out.Q_b;

  const double check = 10.0 * tol;
  const double r1 = static_cast<double>(inf_norm(project_tangent(t, out.Q_b) - n_star));
  const double r2 = static_cast<double>(inf_norm(project_tangent(t, out.Q_a)));
  const double r3 = static_cast<double>(inf_norm(project_entries(out.Q_a, gamma_c) - m_star));
  const double r4 = static_cast<double>(inf_norm(project_entries(out.Q_b, gamma_c)));
  const double r5 = static_cast<double>(inf_norm(project_entries(out.Q, phi.complement())));
  const double worst = std::max({r1, r2, r3, r4, r5});
  if (worst > check * std::max(1.0, static_cast<double>(inf_norm(n_star) + inf_norm(m_star)))) {
    throw NumericalError("deterministic certificate: equality residual " + std::to_string(worst) +
                         " exceeds " + std::to_string(check));
  }
  return out;
}

/// Evaluates P_T(Q) = UV^T, P_{Gamma^c}(Q) = gamma P_Phi(sgn A*), P_{Phi^c}(Q) = 0,
/// ||P_{T-perp}(Q)|| < 1, ||P_Gamma(Q)||_inf < gamma and alpha < 1, plus the
/// analytic bounds on ||P_Gamma(Q)||_inf and ||P_{T-perp}(Q)|| with eta = 1.
template <typename Scalar, typename DQ, typename DS>
CertificateReport verify_deterministic(const Eigen::MatrixBase<DQ>& q, const TangentSpace<Scalar>& t,
                                       const EntrySet& gamma_set, const EntrySet& gamma_c,
                                       const EntrySet& phi, const Eigen::MatrixBase<DS>& sgn_a_star,
                                       Scalar gamma, double eq_tol = 1e-8) {
  if (!(gamma_set.complement() == gamma_c)) {
    throw ArgumentError("verify_deterministic: Gamma and Gamma^c are not complementary");
  }
  CertificateReport rep;
  rep.kind = CertificateKind::Deterministic;
  if (gamma >= Scalar(1)) rep.warnings.push_back("gamma >= 1");

  const Matrix<Scalar> qm = q;
  const Matrix<Scalar> target_gc = gamma * project_entries(sgn_a_star, phi);
  const Matrix<Scalar> perp = project_tangent_complement(t, qm);
  const double perp_norm = static_cast<double>(op_norm(perp));
  const double gamma_inf = static_cast<double>(inf_norm(project_entries(qm, gamma_set)));

  const int d = gamma_c.max_line_count();
  const double r = static_cast<double>(t.rank());
  const double mu = t.valid() ? static_cast<double>(incoherence(t)) : 0.0;
  const double n1 = static_cast<double>(t.rows()), n2 = static_cast<double>(t.cols());
  const double alpha = alpha_param(mu, r, d, n1, n2);
  const double g = static_cast<double>(gamma);

  auto add = [&](std::string name, double value, double threshold, Relation rel,
                 ConditionRole role = ConditionRole::Optimality) {
    rep.conditions.push_back(make_condition(std::move(name), value, threshold, rel, role));
  };
  add("tangent_equals_UVt", static_cast<double>(inf_norm(project_tangent(t, qm) - t.uvt())), eq_tol,
      Relation::Equal);
  add("gamma_c_equals_gamma_sgn", static_cast<double>(inf_norm(project_entries(qm, gamma_c) - target_gc)),
      eq_tol, Relation::Equal);
  add("zero_off_observed", static_cast<double>(inf_norm(project_entries(qm, phi.complement()))), eq_tol,
      Relation::Equal);
  add("tangent_perp_op_norm", perp_norm, 1.0, Relation::Less);
  add("gamma_inf_norm", gamma_inf, g, Relation::Less);
  add("transversality_alpha", alpha, 1.0, Relation::Less);

  const double incoh = std::sqrt(mu * r / (n1 * n2));
  const double inf = std::numeric_limits<double>::infinity();
  const double bound_inf = alpha < 1.0 ? (incoh + alpha * g) / (1.0 - alpha) : inf;
  const double bound_op = alpha < 1.0 ? d * (incoh + g) / (1.0 - alpha) : inf;
  if (alpha >= 1.0) rep.warnings.push_back("analytic bounds require alpha < 1");
  add("bound_gamma_inf_norm", gamma_inf, bound_inf, Relation::LessEqual, ConditionRole::AnalyticBound);
  add("bound_tangent_perp_op_norm", perp_norm, bound_op, Relation::LessEqual,
      ConditionRole::AnalyticBound);
  if (alpha >= 1.0) {
    for (auto& c : rep.conditions)
      if (c.role == ConditionRole::AnalyticBound) c.satisfied = false;
  }
  rep.finalize();
  return rep;
}

/// Gamma^c, sgn(A*) and T taken from the instance; Q is built and verified.
struct DeterministicRun {
  DeterministicCertificate<double> certificate;
  CertificateReport report;
};
DeterministicRun certify_deterministic(const ProblemInstance& inst, double gamma,
                                       double tol = 1e-12, int max_terms = 500);

/// [lower, upper] range of gamma for which the deterministic certificate is
/// guaranteed; empty when lower > upper.
struct GammaInterval {
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.0;
  bool empty() const { return !(lower <= upper); }
  double midpoint() const { return 0.5 * (lower + upper); }
};
GammaInterval deterministic_gamma_interval(double mu, double r, double d, double n1, double n2,
                                           double eta = 1.0);

// ---------------------------------------------------------------------------
// Golfing certificate

struct GolfingParams {
  int k0 = 0;                 // 0 = ceil(4 ln n)
  std::optional<double> q1;   // default 1 - tau^(1/k0)
  std::optional<double> q2;   // default 1 - (1 - p0)^(1/k0)
  std::uint64_t seed = 0;

  int resolved_k0(Index n) const;
};

template <typename Scalar>
struct GolfingCertificate {
  Matrix<Scalar> W;
  std::vector<double> decay_trace;  // ||D_k||_F for k = 0..k0
  std::vector<EntrySet> batches;    // Gamma^(k) & Gamma_d, k = 1..k0
  double q = 0.0;                   // q1 * q2
  int k0 = 0;
};

/// Batches Gamma^(k) = Omega^(k) & Phi^(k), k = 1..k0. Omega^(k) ~ Ber(q1)
/// and Phi^(k) ~ Ber(q2) are drawn conditionally on the instance so that
/// their unions are exactly Omega^c and Phi; every batch therefore lies in
/// the observed clean set. Batches overlap and do not tile Gamma.
std::vector<EntrySet> sample_golfing_batches(const ProblemInstance& inst, int k0, double q1,
                                             double q2, std::uint64_t seed);

/// W_k = W_{k-1} + q^-1 P_{batch_k}(D_{k-1}), D_k = UV^T - gamma P_T(E*) - P_T(W_k).
template <typename Scalar, typename DE>
GolfingCertificate<Scalar> run_golfing(const TangentSpace<Scalar>& t, const Eigen::MatrixBase<DE>& e_star,
                                       Scalar gamma, std::vector<EntrySet> batches, double q) {
  if (!(q > 0.0)) throw ArgumentError("golfing: batch probability q must be positive");
  GolfingCertificate<Scalar> out;
  out.q = q;
  out.k0 = static_cast<int>(batches.size());
  const Matrix<Scalar> target = t.uvt() - gamma * project_tangent(t, e_star);
  out.W = Matrix<Scalar>::Zero(e_star.rows(), e_star.cols());
  Matrix<Scalar> d = target;
  out.decay_trace.push_back(static_cast<double>(d.norm()));
  const Scalar inv_q = Scalar(1.0 / q);
  for (const auto& batch : batches) {
    out.W += inv_q * project_entries(d, batch);
    d = target - project_tangent(t, out.W);
    out.decay_trace.push_back(static_cast<double>(d.norm()));
  }
  out.batches = std::move(batches);
  return out;
}

GolfingCertificate<double> build_golfing_certificate(const ProblemInstance& inst, double gamma,
                                                     const GolfingParams& params);

/// Conditions (a)-(e): (a) ||P_T W - (UV^T - gamma P_T E*)||_F <= gamma / sqrt(n);
/// (b) P_{Gamma^c} W = 0; (c) ||P_Gamma W||_inf < gamma / 2;
/// (d) ||P_{T-perp} W|| < 1/4; (e) ||gamma P_{T-perp} E*|| < 1/4.
template <typename Scalar, typename DW, typename DE>
CertificateReport verify_probabilistic(const Eigen::MatrixBase<DW>& w, const TangentSpace<Scalar>& t,
                                       const Eigen::MatrixBase<DE>& e_star, const EntrySet& gamma_set,
                                       Scalar gamma, double eq_tol = 1e-10) {
  CertificateReport rep;
  rep.kind = CertificateKind::Golfing;
  if (gamma >= Scalar(1)) rep.warnings.push_back("gamma >= 1");
  const Matrix<Scalar> wm = w;
  const double n = static_cast<double>(std::min(wm.rows(), wm.cols()));
  const double g = static_cast<double>(gamma);
  const Matrix<Scalar> target = t.uvt() - gamma * project_tangent(t, e_star);

  auto add = [&](std::string name, double value, double threshold, Relation rel) {
    rep.conditions.push_back(make_condition(std::move(name), value, threshold, rel));
  };
  add("a_tangent_error_fro", static_cast<double>((project_tangent(t, wm) - target).norm()),
      g / std::sqrt(n), Relation::LessEqual);
  add("b_zero_off_gamma", static_cast<double>(inf_norm(project_entries(wm, gamma_set.complement()))),
      eq_tol, Relation::Equal);
  add("c_gamma_inf_norm", static_cast<double>(inf_norm(project_entries(wm, gamma_set))), g / 2.0,
      Relation::Less);
  add("d_tangent_perp_op_norm", static_cast<double>(op_norm(project_tangent_complement(t, wm))), 0.25,
      Relation::Less);
  const Matrix<Scalar> e_perp = gamma * project_tangent_complement(t, e_star);
  add("e_sign_perp_op_norm", static_cast<double>(op_norm(e_perp)), 0.25, Relation::Less);
  rep.finalize();
  return rep;
}

CertificateReport verify_probabilistic(const MatrixXd& w, const ProblemInstance& inst, double gamma);

// ---------------------------------------------------------------------------
// Sampling-operator deviation

/// Estimates || p^-1 P_T P_{S & Gamma_d} P_T - P_T || by power iteration on
/// the self-adjoint map, started from a seeded random point of T.
template <typename Scalar>
double sampling_deviation(const TangentSpace<Scalar>& t, const EntrySet& sample_set,
                          const EntrySet& gamma_d, double p, std::uint64_t seed = 0xd1a9ULL,
                          double tol = 1e-6, int max_iter = 2000) {
  if (!(p > 0.0 && p <= 1.0)) throw ArgumentError("sampling_deviation: p must lie in (0, 1]");
  if (sample_set.rows() != t.rows() || sample_set.cols() != t.cols() ||
      gamma_d.rows() != t.rows() || gamma_d.cols() != t.cols()) {
    throw DimensionError("sampling_deviation: entry set shape does not match T");
  }
  if (!t.valid()) return 0.0;
  const EntrySet support = sample_set & gamma_d;
  const Scalar inv_p = Scalar(1.0 / p);
  auto apply = [&](const Matrix<Scalar>& x) -> Matrix<Scalar> {
    const Matrix<Scalar> px = project_tangent(t, x);
    return inv_p * project_tangent(t, project_entries(px, support)) - px;
  };

  Rng rng(seed);
  std::normal_distribution<double> normal;
  Matrix<Scalar> x(t.rows(), t.cols());
  for (Index i = 0; i < x.rows(); ++i)
    for (Index j = 0; j < x.cols(); ++j) x(i, j) = static_cast<Scalar>(normal(rng));
  x = project_tangent(t, x);
  x /= x.norm();

  double est = static_cast<double>(apply(x).norm());
  for (int it = 0; it < max_iter; ++it) {
    Matrix<Scalar> y = apply(x);
    const Scalar yn = y.norm();
    if (yn <= Scalar(1e-14)) return 0.0;
    x = y / yn;
    const double next = static_cast<double>(apply(x).norm());
    if (std::abs(next - est) <= tol * std::max(next, 1e-300)) return next;
    est = next;
  }
  throw ConvergenceError("sampling_deviation: no convergence after " + std::to_string(max_iter) +
                         " iterations (last estimate " + std::to_string(est) + ")");
}

}  // namespace lrme
