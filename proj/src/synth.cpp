#include <lrme/rng.hpp>
#include <lrme/synth.hpp>

#include <cmath>
#include <random>

namespace lrme {

std::string to_string(CorruptionSign s) {
  return s == CorruptionSign::FixedPositive ? "fixed-positive" : "symmetric-random";
}

std::string to_string(LowRankModel m) {
  return m == LowRankModel::Gaussian ? "gaussian" : "rademacher";
}

CorruptionSign corruption_sign_from_string(const std::string& s) {
  if (s == "fixed-positive" || s == "positive") return CorruptionSign::FixedPositive;
  if (s == "symmetric-random" || s == "symmetric") return CorruptionSign::SymmetricRandom;
  throw ArgumentError("unknown corruption sign model '" + s + "'");
}

LowRankModel low_rank_model_from_string(const std::string& s) {
  if (s == "gaussian") return LowRankModel::Gaussian;
  if (s == "rademacher") return LowRankModel::Rademacher;
  throw ArgumentError("unknown low-rank model '" + s + "'");
}

void GenParams::validate() const {
  if (n1 <= 0) throw ArgumentError("n1 must be positive");
  if (n2 <= 0) throw ArgumentError("n2 must be positive");
  if (r < 0 || r > std::min(n1, n2)) throw ArgumentError("r must lie in [0, min(n1, n2)]");
  if (!(p0 >= 0.0 && p0 <= 1.0)) throw ArgumentError("p0 must lie in [0, 1]");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ArgumentError("tau must lie in [0, 1]");
  if (d_block < 0 || d_block > std::min(n1, n2)) {
    throw ArgumentError("d_block must lie in [0, min(n1, n2)]");
  }
  if (corruption_magnitude && !(*corruption_magnitude > 0.0 && std::isfinite(*corruption_magnitude))) {
    throw ArgumentError("corruption_magnitude must be positive");
  }
}

LowRank gen_low_rank(Index n1, Index n2, Index r, std::uint64_t seed, LowRankModel model) {
  if (n1 <= 0 || n2 <= 0) throw ArgumentError("gen_low_rank: dimensions must be positive");
  if (r < 0 || r > std::min(n1, n2)) throw ArgumentError("gen_low_rank: r must lie in [0, min(n1, n2)]");
  if (r == 0) {
    return {MatrixXd::Zero(n1, n2), TangentSpace<double>::empty(n1, n2), VectorXd(0)};
  }
  Rng rng(seed);
  std::normal_distribution<double> normal;
  std::bernoulli_distribution coin(0.5);
  auto draw = [&]() {
    return model == LowRankModel::Gaussian ? normal(rng) : (coin(rng) ? 1.0 : -1.0);
  };
  // Row-major fill so the stream order does not depend on storage order.
  MatrixXd left(n1, r), right(n2, r);
  for (Index i = 0; i < n1; ++i)
    for (Index k = 0; k < r; ++k) left(i, k) = draw();
  for (Index j = 0; j < n2; ++j)
    for (Index k = 0; k < r; ++k) right(j, k) = draw();
  MatrixXd b = left * right.transpose();
  auto dec = svd(b);
  return {std::move(b),
          TangentSpace<double>(dec.U.leftCols(r), dec.V.leftCols(r), 1e-10),
          dec.singular_values.head(r)};
}

EntrySet gen_bernoulli_set(Index n1, Index n2, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw ArgumentError("gen_bernoulli_set: p must lie in [0, 1]");
  EntrySet out(n1, n2);
  Rng rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Index i = 0; i < n1; ++i)
    for (Index j = 0; j < n2; ++j)
      if (unif(rng) < p) out.insert(i, j);
  return out;
}

MatrixXd gen_corruption(const MatrixXd& B_star, const EntrySet& omega, CorruptionSign sign,
                        std::optional<double> magnitude, std::uint64_t seed) {
  if (omega.rows() != B_star.rows() || omega.cols() != B_star.cols()) {
    throw DimensionError("gen_corruption: support shape does not match B*");
  }
  double m = 0.0;
  if (magnitude) {
    if (!(*magnitude > 0.0)) throw ArgumentError("gen_corruption: magnitude must be positive");
    m = *magnitude;
  } else {
    m = inf_norm(B_star);
    if (m == 0.0) m = 1.0;  // zero signal (r = 0): unit corruptions keep supp(A*) = Omega
  }
  MatrixXd a = MatrixXd::Zero(B_star.rows(), B_star.cols());
  Rng rng(seed);
  std::bernoulli_distribution coin(0.5);
  for (const auto& [i, j] : omega.indices()) {
    const double s = sign == CorruptionSign::FixedPositive ? 1.0 : (coin(rng) ? 1.0 : -1.0);
    a(i, j) = s * m;
  }
  return a;
}

AdversarialBlock gen_adversarial_block(Index n1, Index n2, Index d) {
  if (d < 0 || d > std::min(n1, n2)) {
    throw ArgumentError("gen_adversarial_block: d must lie in [0, min(n1, n2)]");
  }
  AdversarialBlock out{EntrySet(n1, n2), MatrixXd::Zero(n1, n2)};
  for (Index i = 0; i < d; ++i)
    for (Index j = 0; j < d; ++j) {
      out.support.insert(i, j);
      out.values(i, j) = 1.0;
    }
  return out;
}

double alpha_param(double mu, double r, double d, double n1, double n2) {
  const double k = mu * r * d;
  return std::sqrt(k / n1) + std::sqrt(k / n2) + std::sqrt(k / std::max(n1, n2));
}

double gamma_default(double p0, double d, double n) {
  if (!(p0 > 0.0 && p0 <= 1.0)) throw ArgumentError("gamma_default: p0 must lie in (0, 1]");
  if (!(n >= 1.0)) throw ArgumentError("gamma_default: n must be >= 1");
  if (!(d >= 0.0)) throw ArgumentError("gamma_default: d must be >= 0");
  return 1.0 / (32.0 * std::sqrt(p0 * (d + 1.0) * n));
}

ProblemInstance gen_instance(const GenParams& params,
                             const std::optional<EntrySet>& deterministic_erasures) {
  params.validate();
  const Index n1 = params.n1, n2 = params.n2;
  ProblemInstance inst;
  inst.params = params;

  auto low = gen_low_rank(n1, n2, params.r, derive_seed(params.seed, "low_rank"),
                          params.low_rank_model);
  inst.B_star = std::move(low.matrix);
  inst.tangent = std::move(low.tangent);
  inst.singular_values = std::move(low.singular_values);
  inst.mu = inst.tangent.valid() ? incoherence(inst.tangent) : 0.0;

  const EntrySet omega_r =
      gen_bernoulli_set(n1, n2, params.tau, derive_seed(params.seed, "corruption_support"));
  auto block = gen_adversarial_block(n1, n2, params.d_block);
  inst.Omega_d = block.support;
  inst.Omega = omega_r | inst.Omega_d;

  // Random corruptions off the block, ones on the block.
  const MatrixXd random_part =
      gen_corruption(inst.B_star, omega_r - inst.Omega_d, params.corruption_sign,
                     params.corruption_magnitude, derive_seed(params.seed, "corruption_values"));
  inst.A_star = random_part + block.values;

  const EntrySet phi_r =
      gen_bernoulli_set(n1, n2, params.p0, derive_seed(params.seed, "observation"));
  if (deterministic_erasures) {
    if (deterministic_erasures->rows() != n1 || deterministic_erasures->cols() != n2) {
      throw DimensionError("gen_instance: deterministic erasure set has the wrong shape");
    }
    inst.Phi_d_complement = *deterministic_erasures;
  } else {
    inst.Phi_d_complement = EntrySet(n1, n2);
  }
  inst.Phi = phi_r - inst.Phi_d_complement;
  inst.observed = project_entries(inst.A_star + inst.B_star, inst.Phi);
  return inst;
}

}  // namespace lrme
