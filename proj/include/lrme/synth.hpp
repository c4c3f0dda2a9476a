#pragma once

#include <lrme/entry_set.hpp>
#include <lrme/linops.hpp>
#include <lrme/types.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace lrme {

enum class CorruptionSign { FixedPositive, SymmetricRandom };
enum class LowRankModel { Gaussian, Rademacher };

std::string to_string(CorruptionSign s);
std::string to_string(LowRankModel m);
CorruptionSign corruption_sign_from_string(const std::string& s);
LowRankModel low_rank_model_from_string(const std::string& s);

struct GenParams {
  Index n1 = 100;
  Index n2 = 100;
  Index r = 2;
  double p0 = 1.0;
  double tau = 0.0;
  Index d_block = 0;
  CorruptionSign corruption_sign = CorruptionSign::SymmetricRandom;
  std::optional<double> corruption_magnitude;  // nullopt = "auto" = ||B*||_inf
  std::uint64_t seed = 0;
  LowRankModel low_rank_model = LowRankModel::Gaussian;

  // Throws ArgumentError naming the offending field.
  void validate() const;
};

struct LowRank {
  MatrixXd matrix;
  TangentSpace<double> tangent;
  VectorXd singular_values;
};

struct ProblemInstance {
  GenParams params;
  MatrixXd B_star;
  TangentSpace<double> tangent;
  VectorXd singular_values;
  MatrixXd A_star;
  EntrySet Phi;               // observed entries
  EntrySet Omega;             // corruption support, Omega_r | Omega_d
  EntrySet Omega_d;           // deterministic (block) corruptions
  EntrySet Phi_d_complement;  // deterministic erasures
  MatrixXd observed;          // P_Phi(A* + B*)
  double mu = 0.0;            // incoherence of B*, 0 when r = 0

  Index n() const { return std::min(B_star.rows(), B_star.cols()); }
  // Observed clean entries, Phi \ Omega.
  EntrySet Gamma() const { return Phi - Omega; }
  // Deterministic observed clean entries, Phi_d \ Omega_d.
  EntrySet Gamma_d() const { return Phi_d_complement.complement() - Omega_d; }
  // E* = P_Phi(sgn(A*)).
  MatrixXd E_star() const { return project_entries(sgn(A_star), Phi); }
};

/// B* = L R^T with L (n1 x r), R (n2 x r) i.i.d. N(0,1), plus its SVD factors.
/// r = 0 yields the zero matrix and an empty (invalid) tangent space.
LowRank gen_low_rank(Index n1, Index n2, Index r, std::uint64_t seed,
                     LowRankModel model = LowRankModel::Gaussian);

/// Each entry included independently with probability p.
EntrySet gen_bernoulli_set(Index n1, Index n2, double p, std::uint64_t seed);

/// A* supported exactly on omega with values s * m, m = magnitude or ||B*||_inf.
MatrixXd gen_corruption(const MatrixXd& B_star, const EntrySet& omega, CorruptionSign sign,
                        std::optional<double> magnitude, std::uint64_t seed);

struct AdversarialBlock {
  EntrySet support;
  MatrixXd values;
};

/// d x d block of ones in the top-left corner.
AdversarialBlock gen_adversarial_block(Index n1, Index n2, Index d);

/// Smallest mu satisfying all three incoherence inequalities.
template <typename Scalar>
Scalar incoherence(const TangentSpace<Scalar>& t) {
  if (!t.valid()) throw ArgumentError("incoherence: rank must be positive");
  const Scalar r = static_cast<Scalar>(t.rank());
  const Scalar n1 = static_cast<Scalar>(t.rows());
  const Scalar n2 = static_cast<Scalar>(t.cols());
  const Scalar row_u = t.U().rowwise().squaredNorm().maxCoeff();
  const Scalar row_v = t.V().rowwise().squaredNorm().maxCoeff();
  const Scalar uv = (t.U() * t.V().transpose()).cwiseAbs().maxCoeff();
  return std::max({n1 / r * row_u, n2 / r * row_v, n1 * n2 / r * uv * uv});
}

/// sqrt(mu r d / n1) + sqrt(mu r d / n2) + sqrt(mu r d / max(n1, n2)).
double alpha_param(double mu, double r, double d, double n1, double n2);

/// 1 / (32 sqrt(p0 (d + 1) n)).
double gamma_default(double p0, double d, double n);

/// Compose a full instance. Every random component draws from its own
/// sub-seed so it can be replayed independently.
ProblemInstance gen_instance(const GenParams& params,
                             const std::optional<EntrySet>& deterministic_erasures = std::nullopt);

}  // namespace lrme
