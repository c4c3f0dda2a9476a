#include "doctest.h"

#include <lrme/synth.hpp>

using namespace lrme;

TEST_CASE("gen_low_rank") {
  const auto full = gen_low_rank(4, 4, 4, 5);
  CHECK(full.singular_values(3) > 1e-8);
  const auto dec = svd(full.matrix);
  CHECK(dec.singular_values(3) > 1e-8);

  const auto a = gen_low_rank(30, 20, 3, 9), b = gen_low_rank(30, 20, 3, 9);
  CHECK(a.matrix == b.matrix);
  const auto s = svd(a.matrix).singular_values;
  CHECK(s(3) / s(0) < 1e-10);

  const auto zero = gen_low_rank(5, 5, 0, 1);
  CHECK(zero.matrix == MatrixXd::Zero(5, 5));
  CHECK_FALSE(zero.tangent.valid());
  CHECK_THROWS_AS(gen_low_rank(3, 3, 4, 1), ArgumentError);
}

TEST_CASE("gen_bernoulli_set") {
  CHECK(gen_bernoulli_set(10, 10, 0.0, 1).is_empty());
  CHECK(gen_bernoulli_set(10, 10, 1.0, 1).size() == 100);
  const double frac = static_cast<double>(gen_bernoulli_set(200, 200, 0.5, 0).size()) / 40000.0;
  CHECK(frac >= 0.48);
  CHECK(frac <= 0.52);
  CHECK(gen_bernoulli_set(20, 20, 0.3, 4) == gen_bernoulli_set(20, 20, 0.3, 4));
  CHECK_THROWS_AS(gen_bernoulli_set(2, 2, 1.5, 0), ArgumentError);
}

TEST_CASE("gen_corruption") {
  const MatrixXd b = MatrixXd::Constant(3, 3, 2.0);
  CHECK(gen_corruption(b, EntrySet(3, 3), CorruptionSign::SymmetricRandom, std::nullopt, 1) ==
        MatrixXd::Zero(3, 3));
  const MatrixXd one = gen_corruption(b, EntrySet::from_indices(3, 3, {{0, 0}}),
                                      CorruptionSign::FixedPositive, 1.0, 1);
  MatrixXd e11 = MatrixXd::Zero(3, 3);
  e11(0, 0) = 1;
  CHECK(one == e11);
  const MatrixXd autom = gen_corruption(b, EntrySet::full(3, 3), CorruptionSign::FixedPositive,
                                        std::nullopt, 1);
  CHECK(autom == MatrixXd::Constant(3, 3, 2.0));

  const MatrixXd big = MatrixXd::Ones(100, 100);
  const MatrixXd signs = gen_corruption(big, EntrySet::full(100, 100), CorruptionSign::SymmetricRandom,
                                        1.0, 17);
  CHECK(std::abs(signs.mean()) <= 0.05);
  CHECK(signs.cwiseAbs().minCoeff() == 1.0);
  CHECK_THROWS_AS(gen_corruption(b, EntrySet(3, 3), CorruptionSign::FixedPositive, -1.0, 1), ArgumentError);
}

TEST_CASE("gen_adversarial_block") {
  const auto z = gen_adversarial_block(4, 4, 0);
  CHECK(z.support.is_empty());
  CHECK(z.values == MatrixXd::Zero(4, 4));
  const auto blk = gen_adversarial_block(3, 3, 2);
  CHECK(blk.support == EntrySet::from_indices(3, 3, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
  CHECK(blk.support.row_counts().maxCoeff() <= 2);
  CHECK(blk.values.sum() == 4);
}

TEST_CASE("incoherence") {
  const Index n = 16;
  const MatrixXd ones = VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  CHECK(incoherence(TangentSpace<double>(ones, ones)) == doctest::Approx(1.0));
  // Spiky case: the row conditions alone give n, ||UV^T||_inf = 1 forces n^2.
  const MatrixXd e1 = VectorXd::Unit(n, 0);
  CHECK(incoherence(TangentSpace<double>(e1, e1)) == doctest::Approx(double(n * n)));
  const auto low = gen_low_rank(100, 100, 2, 3);
  const double mu = incoherence(low.tangent);
  CHECK(mu == incoherence(low.tangent));
  CHECK(mu >= 1.0);
  CHECK(mu <= 100.0 / 2.0);
  CHECK_THROWS_AS(incoherence(TangentSpace<double>::empty(3, 3)), ArgumentError);
}

TEST_CASE("alpha_param and gamma_default") {
  CHECK(alpha_param(1, 1, 4, 100, 100) == doctest::Approx(0.6));
  CHECK(alpha_param(3, 2, 0, 50, 60) == 0.0);
  CHECK(alpha_param(2, 1, 8, 100, 90) == doctest::Approx(std::sqrt(2.0) * alpha_param(2, 1, 4, 100, 90)));
  CHECK(gamma_default(1, 0, 400) == doctest::Approx(0.0015625));
  CHECK(gamma_default(0.25, 0, 400) == doctest::Approx(1.0 / 320));
  CHECK(gamma_default(0.5, 0, 400) < gamma_default(0.25, 0, 400));
  CHECK(gamma_default(0.5, 2, 400) < gamma_default(0.5, 1, 400));
  CHECK(gamma_default(0.5, 0, 500) < gamma_default(0.5, 0, 400));
  CHECK_THROWS_AS(gamma_default(0.0, 0, 10), ArgumentError);
}

TEST_CASE("all-ones rank-1 construction gives alpha = 3 sqrt(d/n)") {
  const Index n = 64;
  const MatrixXd ones = VectorXd::Constant(n, 1.0 / std::sqrt(double(n)));
  const double mu = incoherence(TangentSpace<double>(ones, ones));
  for (double d : {1.0, 4.0, 9.0})
    CHECK(alpha_param(mu, 1, d, n, n) == doctest::Approx(3 * std::sqrt(d / n)).epsilon(1e-12));
}

TEST_CASE("gen_instance") {
  GenParams p;
  p.n1 = p.n2 = 40;
  p.r = 2;
  p.seed = 3;
  p.p0 = 1.0;
  p.tau = 0.0;
  auto inst = gen_instance(p);
  CHECK(inst.A_star == MatrixXd::Zero(40, 40));
  CHECK(inst.Omega.is_empty());
  CHECK(inst.observed == inst.B_star);

  p.p0 = 0.7;
  p.tau = 0.1;
  p.d_block = 3;
  inst = gen_instance(p);
  CHECK(support(inst.A_star) == inst.Omega);
  CHECK(project_entries(inst.observed, inst.Phi) == inst.observed);
  CHECK((inst.Omega_d - inst.Omega).is_empty());
  CHECK(inst.Omega_d.size() == 9);
  CHECK(inst.mu >= 1.0);
  CHECK(inst.mu <= 40.0 * 40.0 / 2.0);
  const auto again = gen_instance(p);
  CHECK(again.B_star == inst.B_star);
  CHECK(again.A_star == inst.A_star);
  CHECK(again.Phi == inst.Phi);
  CHECK(again.Omega == inst.Omega);

  // Changing tau leaves the low-rank part and the observation pattern alone.
  p.tau = 0.2;
  const auto other = gen_instance(p);
  CHECK(other.B_star == inst.B_star);
  CHECK(other.Phi == inst.Phi);

  p.p0 = 1.5;
  CHECK_THROWS_AS(gen_instance(p), ArgumentError);
}

TEST_CASE("experiment 1 instance matches the described setup") {
  GenParams p;
  p.n1 = p.n2 = 60;
  p.r = 2;
  p.tau = 0.1;
  p.p0 = 0.6;
  p.seed = 8;
  const auto inst = gen_instance(p);
  CHECK(svd(inst.B_star).singular_values(2) / svd(inst.B_star).singular_values(0) < 1e-10);
  CHECK(inst.Omega_d.is_empty());
  const double frac = static_cast<double>(inst.Omega.size()) / 3600.0;
  CHECK(frac > 0.07);
  CHECK(frac < 0.13);
}

TEST_CASE("deterministic erasures") {
  GenParams p;
  p.n1 = p.n2 = 10;
  p.r = 1;
  const auto erase = EntrySet::from_indices(10, 10, {{0, 0}, {3, 4}});
  const auto inst = gen_instance(p, erase);
  CHECK_FALSE(inst.Phi.contains(0, 0));
  CHECK_FALSE(inst.Phi.contains(3, 4));
  CHECK(inst.Phi.size() == 98);
  CHECK(inst.Phi_d_complement == erase);
}
