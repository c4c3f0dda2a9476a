#include "doctest.h"
#include "support.hpp"

#include <lrme/linops.hpp>

using namespace lrme;
using lrme::testing::gaussian;

namespace {

MatrixXd mat(std::initializer_list<std::initializer_list<double>> rows) {
  MatrixXd m(rows.size(), rows.begin()->size());
  Index i = 0;
  for (const auto& row : rows) {
    Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

TangentSpace<double> e1_tangent() {
  return TangentSpace<double>(mat({{1}, {0}}), mat({{1}, {0}}));
}

}  // namespace

TEST_CASE("project_entries") {
  const MatrixXd m = mat({{1, 2}, {3, 4}});
  CHECK(project_entries(m, EntrySet::full(2, 2)) == m);
  CHECK(project_entries(m, EntrySet(2, 2)) == MatrixXd::Zero(2, 2));
  CHECK(project_entries(m, EntrySet::from_indices(2, 2, {{0, 1}})) == mat({{0, 2}, {0, 0}}));
  CHECK_THROWS_AS(project_entries(m, EntrySet(3, 2)), DimensionError);
}

TEST_CASE("project_tangent on coordinate subspaces") {
  const auto t = e1_tangent();
  CHECK(project_tangent(t, mat({{0, 0}, {0, 1}})) == MatrixXd::Zero(2, 2));
  CHECK(project_tangent(t, mat({{1, 0}, {0, 0}})) == mat({{1, 0}, {0, 0}}));
  CHECK(project_tangent_complement(t, mat({{1, 0}, {0, 0}})) == MatrixXd::Zero(2, 2));
  CHECK(project_tangent_complement(t, mat({{0, 0}, {0, 1}})) == mat({{0, 0}, {0, 1}}));
  CHECK_THROWS_AS(project_tangent(t, MatrixXd::Zero(3, 2)), DimensionError);
}

TEST_CASE("project_tangent is idempotent on a random rank-2 space") {
  const auto t = lrme::testing::random_tangent(5, 5, 2, 11);
  const MatrixXd m = gaussian(5, 5, 12);
  const MatrixXd p = project_tangent(t, m);
  CHECK((project_tangent(t, p) - p).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK((p + project_tangent_complement(t, m) - m).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("full-rank tangent space is the identity") {
  const auto t = lrme::testing::random_tangent(6, 6, 6, 3);
  const MatrixXd m = gaussian(6, 6, 4);
  CHECK((project_tangent(t, m) - m).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("TangentSpace rejects non-orthonormal factors") {
  CHECK_THROWS_AS(TangentSpace<double>(mat({{2}, {0}}), mat({{1}, {0}})), ArgumentError);
}

TEST_CASE("svd examples") {
  auto s = svd(mat({{3, 0}, {0, 1}}));
  CHECK(s.singular_values(0) == doctest::Approx(3));
  CHECK(s.singular_values(1) == doctest::Approx(1));
  s = svd(MatrixXd::Zero(3, 3));
  CHECK(s.singular_values.cwiseAbs().maxCoeff() == 0.0);
  s = svd(mat({{0, 2}, {1, 0}}));
  CHECK(s.singular_values(0) == doctest::Approx(2));
  CHECK(s.singular_values(1) == doctest::Approx(1));
}

TEST_CASE("svd sign convention and determinism") {
  const MatrixXd m = gaussian(7, 5, 21);
  const auto a = svd(m);
  const auto b = svd(m);
  CHECK(a.U == b.U);
  CHECK(a.V == b.V);
  for (Index c = 0; c < a.size(); ++c) {
    Index arg = 0;
    a.U.col(c).cwiseAbs().maxCoeff(&arg);
    CHECK(a.U(arg, c) >= 0);
  }
  CHECK((a.reconstruct() - m).norm() / m.norm() <= 1e-12);
}

TEST_CASE("norms of diag(3,1) and of zero") {
  const MatrixXd d = mat({{3, 0}, {0, 1}});
  CHECK(nuclear_norm(d) == doctest::Approx(4));
  CHECK(op_norm(d) == doctest::Approx(3));
  CHECK(fro_norm(d) == doctest::Approx(std::sqrt(10.0)));
  CHECK(l1_norm(d) == 4);
  CHECK(inf_norm(d) == 3);
  const MatrixXd z = MatrixXd::Zero(4, 3);
  CHECK(nuclear_norm(z) == 0);
  CHECK(op_norm(z) == 0);
  CHECK(op_norm_power(z) == 0);
  CHECK(fro_norm(z) == 0);
  CHECK(l1_norm(z) == 0);
  CHECK(inf_norm(z) == 0);
}

TEST_CASE("power iteration agrees with the SVD") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const MatrixXd m = gaussian(6, 6, seed);
    const double ref = Eigen::JacobiSVD<MatrixXd>(m).singularValues()(0);
    CHECK(std::abs(op_norm_power(m) - ref) <= 1e-8 * ref);
  }
  const MatrixXd big = gaussian(80, 70, 9);
  const double ref = Eigen::JacobiSVD<MatrixXd>(big).singularValues()(0);
  CHECK(std::abs(op_norm(big) - ref) <= 1e-7 * ref);
}

TEST_CASE("nuclear and spectral norms are dual") {
  const MatrixXd m = gaussian(5, 4, 31);
  const double nuc = nuclear_norm(m);
  for (int k = 0; k < 100; ++k) {
    MatrixXd g = gaussian(5, 4, 1000 + k);
    g /= op_norm(g);
    CHECK((m.array() * g.array()).sum() <= nuc + 1e-12);
  }
  const auto s = svd(m);
  const MatrixXd uvt = s.U * s.V.transpose();
  CHECK(std::abs((m.array() * uvt.array()).sum() - nuc) <= 1e-8);
}

TEST_CASE("soft_threshold") {
  CHECK(soft_threshold(mat({{3}}), 1.0)(0, 0) == 2);
  CHECK(soft_threshold(mat({{-0.5}}), 1.0)(0, 0) == 0);
  const MatrixXd m = gaussian(4, 4, 2);
  CHECK(soft_threshold(m, 0.0) == m);
  CHECK_THROWS_AS(soft_threshold(m, -1.0), ArgumentError);
}

TEST_CASE("svt") {
  CHECK((svt(mat({{3, 0}, {0, 1}}), 2.0) - mat({{1, 0}, {0, 0}})).cwiseAbs().maxCoeff() <= 1e-12);
  const MatrixXd m = gaussian(5, 6, 3);
  CHECK((svt(m, 0.0) - m).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(svt(m, 1e6) == MatrixXd::Zero(5, 6));
  CHECK_THROWS_AS(svt(m, -0.1), ArgumentError);
}

TEST_CASE("prox operators meet their optimality oracles") {
  const auto rep = lrme::testing::prox_suite(4, 77);
  CHECK(rep.soft_subgradient <= 1e-6);
  CHECK(rep.soft_grid <= 1e-6);
  CHECK(rep.svt_subgradient <= 1e-6);
  CHECK(rep.svt_grid <= 1e-6);
  CHECK(rep.svt_perturbation <= 1e-6);
}

TEST_CASE("sgn") {
  CHECK(sgn(mat({{2, -3}, {0, 1}})) == mat({{1, -1}, {0, 1}}));
  CHECK(sgn(MatrixXd::Zero(2, 2)) == MatrixXd::Zero(2, 2));
  const MatrixXd m = gaussian(3, 3, 5);
  CHECK(sgn(sgn(m)) == sgn(m));
}

TEST_CASE("operator algebra invariants on random inputs") {
  const auto rep = lrme::testing::algebra_suite(25, 2024);
  CHECK(rep.matrices == 25);
  CHECK(lrme::testing::algebra_ok(rep));
}

TEST_CASE("non-finite input is rejected") {
  MatrixXd m = MatrixXd::Ones(2, 2);
  m(0, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(svd(m), ArgumentError);
  CHECK_THROWS_AS(soft_threshold(m, 1.0), ArgumentError);
}
