#pragma once

// Shared fixtures and reference computations for the unit and acceptance
// tests. The references avoid the library's own kernels where possible.

#include <lrme/linops.hpp>
#include <lrme/rng.hpp>
#include <lrme/synth.hpp>

#include <Eigen/QR>
#include <Eigen/SVD>

#include <random>

namespace lrme::testing {

inline MatrixXd gaussian(Index rows, Index cols, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> nd;
  MatrixXd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = nd(rng);
  return m;
}

inline MatrixXd orthonormal(Index rows, Index r, std::uint64_t seed) {
  Eigen::HouseholderQR<MatrixXd> qr(gaussian(rows, r, seed));
  return qr.householderQ() * MatrixXd::Identity(rows, r);
}

inline TangentSpace<double> random_tangent(Index n1, Index n2, Index r, std::uint64_t seed) {
  return TangentSpace<double>(orthonormal(n1, r, seed), orthonormal(n2, r, mix64(seed)));
}

// P_T via the complement (I - UU^T) M (I - VV^T), with explicit projectors.
inline MatrixXd dense_project_tangent(const MatrixXd& u, const MatrixXd& v, const MatrixXd& m) {
  const MatrixXd pu = MatrixXd::Identity(u.rows(), u.rows()) - u * u.transpose();
  const MatrixXd pv = MatrixXd::Identity(v.rows(), v.rows()) - v * v.transpose();
  return m - pu * m * pv;
}

inline EntrySet random_set(Index n1, Index n2, double p, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EntrySet s(n1, n2);
  for (Index i = 0; i < n1; ++i)
    for (Index j = 0; j < n2; ++j)
      if (u(rng) < p) s.insert(i, j);
  return s;
}

inline double reference_nuclear(const MatrixXd& m) {
  return Eigen::JacobiSVD<MatrixXd>(m).singularValues().sum();
}

// Euclidean projection onto the spectral-norm unit ball.
inline MatrixXd clip_spectral(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> s(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd sv = s.singularValues().cwiseMin(1.0);
  return s.matrixU().leftCols(sv.size()) * sv.asDiagonal() * s.matrixV().leftCols(sv.size()).transpose();
}

// Primal-dual hybrid gradient for min_A gamma ||A||_1 + ||C - A||_* (every
// entry observed, so B = C - A). The conjugate of z -> ||C - z||_* is
// <y, C> + indicator(||y|| <= 1), whose prox is a spectral clip.
inline double pdhg_objective(const MatrixXd& c, double gamma, const MatrixXd& a0, double tol = 1e-9,
                             int max_iter = 2000000) {
  const double tau = 0.5, sigma = 0.5;
  MatrixXd a = a0, y = MatrixXd::Zero(c.rows(), c.cols());
  for (int it = 0; it < max_iter; ++it) {
    const MatrixXd v = a - tau * y;
    const MatrixXd a_next = (v.array().abs() - tau * gamma).max(0.0) * v.array().sign();
    const MatrixXd y_next = clip_spectral(y + sigma * (2 * a_next - a) - sigma * c);
    const double step = std::max((a_next - a).cwiseAbs().maxCoeff(), (y_next - y).cwiseAbs().maxCoeff());
    y = y_next;
    a = a_next;
    if (step < tol) break;
  }
  return gamma * a.cwiseAbs().sum() + reference_nuclear(c - a);
}

// Worst observed violation of each linear-algebra invariant over `count`
// seeded random matrices with both dimensions in [2, 64].
struct AlgebraReport {
  int matrices = 0;
  double entries_idempotency = 0;     // exact: must be 0
  double tangent_idempotency = 0;     // ||P_T P_T M - P_T M||_inf
  double tangent_reference = 0;       // ||P_T M - dense reference||_inf / ||M||_inf
  double orthogonality = 0;           // |<P_T M, P_T-perp M>| / ||M||_F^2
  double self_adjointness = 0;        // |<P_T A, B> - <A, P_T B>| / (||A||_F ||B||_F)
  double decomposition = 0;           // ||P_T M + P_T-perp M - M||_inf / ||M||_inf
  double contraction_excess = 0;      // max of norm(P x) / norm(x) - 1 over the projections
  double svd_reconstruction = 0;      // relative Frobenius
  double svd_orthonormality = 0;
  bool svd_sorted_nonnegative = true;
  bool svd_sign_convention = true;
  double norm_order_excess = 0;       // violations of inf <= op <= fro <= nuclear
  double power_vs_svd = 0;            // relative
};

inline AlgebraReport algebra_suite(int count, std::uint64_t seed) {
  AlgebraReport rep;
  Rng rng(seed);
  std::uniform_int_distribution<int> dim(2, 64);
  for (int k = 0; k < count; ++k) {
    const Index n1 = dim(rng), n2 = dim(rng);
    std::uniform_int_distribution<int> rank(1, static_cast<int>(std::min(n1, n2)));
    const Index r = rank(rng);
    const std::uint64_t s = derive_seed(seed, {static_cast<std::uint64_t>(k)});
    const MatrixXd m = gaussian(n1, n2, s);
    const MatrixXd b = gaussian(n1, n2, mix64(s));
    const auto t = random_tangent(n1, n2, r, mix64(s + 1));
    const EntrySet set = random_set(n1, n2, 0.4, mix64(s + 2));

    const MatrixXd pe = project_entries(m, set);
    rep.entries_idempotency = std::max(rep.entries_idempotency, (project_entries(pe, set) - pe).cwiseAbs().maxCoeff());
    const MatrixXd pt = project_tangent(t, m);
    const MatrixXd perp = project_tangent_complement(t, m);
    const double minf = m.cwiseAbs().maxCoeff(), mf = m.norm();
    rep.tangent_idempotency = std::max(rep.tangent_idempotency, (project_tangent(t, pt) - pt).cwiseAbs().maxCoeff());
    rep.tangent_reference = std::max(
        rep.tangent_reference, (pt - dense_project_tangent(t.U(), t.V(), m)).cwiseAbs().maxCoeff() / minf);
    rep.orthogonality = std::max(rep.orthogonality, std::abs((pt.array() * perp.array()).sum()) / (mf * mf));
    const double lhs = (project_tangent(t, m).array() * b.array()).sum();
    const double rhs = (m.array() * project_tangent(t, b).array()).sum();
    rep.self_adjointness = std::max(rep.self_adjointness, std::abs(lhs - rhs) / (mf * b.norm()));
    rep.decomposition = std::max(rep.decomposition, (pt + perp - m).cwiseAbs().maxCoeff() / minf);

    const Eigen::JacobiSVD<MatrixXd> ref(m);
    const double sigma_max = ref.singularValues()(0);
    const double excess = std::max({pt.norm() / mf, perp.norm() / mf, pe.norm() / mf,
                                    Eigen::JacobiSVD<MatrixXd>(perp).singularValues()(0) / sigma_max}) - 1.0;
    rep.contraction_excess = std::max(rep.contraction_excess, excess);

    const auto dec = svd(m);
    rep.svd_reconstruction = std::max(rep.svd_reconstruction, (dec.reconstruct() - m).norm() / mf);
    const Index kk = dec.size();
    rep.svd_orthonormality = std::max(
        {rep.svd_orthonormality,
         (dec.U.transpose() * dec.U - MatrixXd::Identity(kk, kk)).cwiseAbs().maxCoeff(),
         (dec.V.transpose() * dec.V - MatrixXd::Identity(kk, kk)).cwiseAbs().maxCoeff()});
    for (Index i = 0; i < kk; ++i) {
      if (dec.singular_values(i) < 0 || (i > 0 && dec.singular_values(i) > dec.singular_values(i - 1)))
        rep.svd_sorted_nonnegative = false;
      Index arg = 0;
      dec.U.col(i).cwiseAbs().maxCoeff(&arg);
      if (dec.U(arg, i) < 0) rep.svd_sign_convention = false;
    }

    const double ninf = inf_norm(m), nop = op_norm(m), nfro = fro_norm(m), nnuc = nuclear_norm(m);
    rep.norm_order_excess = std::max({rep.norm_order_excess, ninf - nop, nop - nfro, nfro - nnuc});
    rep.power_vs_svd = std::max(rep.power_vs_svd, std::abs(op_norm_power(m) - sigma_max) / sigma_max);
    ++rep.matrices;
  }
  return rep;
}

inline bool algebra_ok(const AlgebraReport& r) {
  return r.entries_idempotency == 0 && r.tangent_idempotency <= 1e-10 && r.tangent_reference <= 1e-10 &&
         r.orthogonality <= 1e-8 && r.self_adjointness <= 1e-10 && r.decomposition <= 1e-12 &&
         r.contraction_excess <= 1e-12 && r.svd_reconstruction <= 1e-8 && r.svd_orthonormality <= 1e-8 &&
         r.svd_sorted_nonnegative && r.svd_sign_convention && r.norm_order_excess <= 1e-10 &&
         r.power_vs_svd <= 1e-6;
}

// Worst deviation of soft_threshold and svt from their optimality oracles on
// 3 x 3 inputs.
struct ProxReport {
  double soft_subgradient = 0;  // distance of (M - X)/t from the l1 subdifferential at X
  double soft_grid = 0;         // objective gap to an entrywise grid search (negative = prox better)
  double svt_subgradient = 0;   // distance of (M - X)/t from the nuclear subdifferential at X
  double svt_grid = 0;          // objective gap to a grid over singular values
  double svt_perturbation = 0;  // objective gap to random perturbations of the prox output
};

inline ProxReport prox_suite(int cases, std::uint64_t seed) {
  ProxReport rep;
  rep.soft_grid = rep.svt_grid = rep.svt_perturbation = -1e300;
  Rng rng(seed);
  std::uniform_real_distribution<double> tdist(0.1, 1.5);
  for (int c = 0; c < cases; ++c) {
    const MatrixXd m = gaussian(3, 3, derive_seed(seed, {static_cast<std::uint64_t>(c)}));
    const double t = tdist(rng);

    // l1: subgradient membership and a per-entry grid over [-|m|-1, |m|+1].
    const MatrixXd x = soft_threshold(m, t);
    const MatrixXd g = (m - x) / t;
    for (Index k = 0; k < 9; ++k) {
      const double xv = x(k), gv = g(k);
      const double dist = xv != 0 ? std::abs(gv - (xv > 0 ? 1.0 : -1.0)) : std::max(0.0, std::abs(gv) - 1.0);
      rep.soft_subgradient = std::max(rep.soft_subgradient, dist);
      auto f = [&](double v) { return t * std::abs(v) + 0.5 * (v - m(k)) * (v - m(k)); };
      const double span = std::abs(m(k)) + 1.0;
      double best = 1e300;
      for (int s = -20000; s <= 20000; ++s) best = std::min(best, f(span * s / 20000.0));
      rep.soft_grid = std::max(rep.soft_grid, f(xv) - best);
    }

    // Nuclear norm: subgradient at X = U_r (S - t) V_r^T is U_r V_r^T + W with
    // W orthogonal to both factors and ||W|| <= 1.
    const MatrixXd y = svt(m, t);
    const MatrixXd gy = (m - y) / t;
    Eigen::JacobiSVD<MatrixXd> ys(y, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Index r = 0;
    while (r < 3 && ys.singularValues()(r) > 1e-12) ++r;
    const MatrixXd ur = ys.matrixU().leftCols(r), vr = ys.matrixV().leftCols(r);
    const MatrixXd pu = MatrixXd::Identity(3, 3) - ur * ur.transpose();
    const MatrixXd pv = MatrixXd::Identity(3, 3) - vr * vr.transpose();
    const MatrixXd w = pu * gy * pv;
    const double in_t = (gy - w - ur * vr.transpose()).cwiseAbs().maxCoeff();
    const double w_norm = Eigen::JacobiSVD<MatrixXd>(w).singularValues()(0);
    rep.svt_subgradient = std::max({rep.svt_subgradient, in_t, std::max(0.0, w_norm - 1.0)});

    auto obj = [&](const MatrixXd& z) { return t * reference_nuclear(z) + 0.5 * (z - m).squaredNorm(); };
    const double at_prox = obj(y);
    Eigen::JacobiSVD<MatrixXd> ms(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector3d sv = ms.singularValues();
    const int steps = 60;
    double best = 1e300;
    for (int a = 0; a <= steps; ++a)
      for (int b = 0; b <= steps; ++b)
        for (int d = 0; d <= steps; ++d) {
          const Eigen::Vector3d s(sv(0) * a / steps, sv(1) * b / steps, sv(2) * d / steps);
          const MatrixXd z = ms.matrixU() * s.asDiagonal() * ms.matrixV().transpose();
          best = std::min(best, t * s.sum() + 0.5 * (z - m).squaredNorm());
        }
    rep.svt_grid = std::max(rep.svt_grid, at_prox - best);
    for (int p = 0; p < 200; ++p) {
      const MatrixXd delta = 1e-3 * gaussian(3, 3, derive_seed(seed, {static_cast<std::uint64_t>(c), 7,
                                                                      static_cast<std::uint64_t>(p)}));
      rep.svt_perturbation = std::max(rep.svt_perturbation, at_prox - obj(y + delta));
    }
  }
  return rep;
}

inline bool prox_ok(const ProxReport& r) {
  return r.soft_subgradient <= 1e-6 && r.soft_grid <= 1e-6 && r.svt_subgradient <= 1e-6 && r.svt_grid <= 1e-6 &&
         r.svt_perturbation <= 1e-6;
}

// Rank-1 instance with U = V = ones / sqrt(n) up to signs (mu = 1), every
// entry observed, no random corruption and a d x d block of ones.
inline ProblemInstance incoherent_block_instance(Index n, Index d, std::uint64_t seed) {
  GenParams p;
  p.n1 = p.n2 = n;
  p.r = 1;
  p.p0 = 1.0;
  p.tau = 0.0;
  p.d_block = d;
  p.low_rank_model = LowRankModel::Rademacher;
  p.seed = seed;
  return gen_instance(p);
}

}  // namespace lrme::testing
