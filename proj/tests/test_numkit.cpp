#include <catch2/catch_amalgamated.hpp>

#include <qwgp/numkit.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

namespace numkit_test {

using qwgp::numkit::ComplexMatrix;
using qwgp::numkit::cplx;
using qwgp::numkit::eig_dense;
using qwgp::numkit::integrate_1d;
using qwgp::numkit::poly_roots;

namespace {

ComplexMatrix random_matrix(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = cplx(u(rng), u(rng));
  return m;
}

// det(xI - A) by Faddeev-LeVerrier; descending powers, monic.
std::vector<cplx> characteristic_poly(const ComplexMatrix& a) {
  const std::size_t n = a.rows;
  auto matmul = [n](const ComplexMatrix& x, const ComplexMatrix& y) {
    ComplexMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const cplx xik = x(i, k);
        for (std::size_t j = 0; j < n; ++j) r(i, j) += xik * y(k, j);
      }
    return r;
  };
  auto trace = [n](const ComplexMatrix& x) {
    cplx t = 0;
    for (std::size_t i = 0; i < n; ++i) t += x(i, i);
    return t;
  };
  std::vector<cplx> c(n + 1);
  c[0] = 1.0;
  ComplexMatrix m = a;
  c[1] = -trace(a);
  for (std::size_t k = 2; k <= n; ++k) {
    for (std::size_t i = 0; i < n; ++i) m(i, i) += c[k - 1];
    m = matmul(a, m);
    c[k] = -trace(m) / static_cast<double>(k);
  }
  return c;
}

std::vector<cplx> sorted_by_re_im(std::vector<cplx> v) {
  std::sort(v.begin(), v.end(), [](const cplx& x, const cplx& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return v;
}

}  // namespace

TEST_CASE("eig_dense_identity_has_unit_spectrum") {
  auto r = eig_dense(ComplexMatrix::identity(3));
  REQUIRE(r.values.size() == 3);
  for (const auto& v : r.values) CHECK(std::abs(v - 1.0) < 1e-12);
  for (bool ok : r.converged) CHECK(ok);
}

TEST_CASE("eig_dense_pauli_x_pair") {
  ComplexMatrix sx(2, 2);
  sx(0, 1) = 1.0;
  sx(1, 0) = 1.0;
  auto r = eig_dense(sx);
  REQUIRE(r.values.size() == 2);
  CHECK(std::abs(r.values[0] - cplx(-1.0)) < 1e-12);
  CHECK(std::abs(r.values[1] - cplx(+1.0)) < 1e-12);
  // eigenvectors (1, -1)/sqrt2 and (1, 1)/sqrt2 up to phase
  const double inv = 1.0 / std::sqrt(2.0);
  cplx ov_minus = std::conj(r.vectors(0, 0)) * inv - std::conj(r.vectors(1, 0)) * inv;
  cplx ov_plus = std::conj(r.vectors(0, 1)) * inv + std::conj(r.vectors(1, 1)) * inv;
  CHECK(std::abs(std::abs(ov_minus) - 1.0) < 1e-12);
  CHECK(std::abs(std::abs(ov_plus) - 1.0) < 1e-12);
}

TEST_CASE("eig_dense_matches_characteristic_polynomial_roots") {
  auto a = random_matrix(4, 20240411u);
  auto eigs = sorted_by_re_im(eig_dense(a).values);
  auto roots = poly_roots(characteristic_poly(a));
  auto rts = sorted_by_re_im(roots.flat());
  REQUIRE(rts.size() == 4);
  REQUIRE(roots.at_infinity == 0);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(eigs[i] - rts[i]) < 1e-8);
}

TEST_CASE("eig_dense_eigenvalue_sum_equals_trace") {
  auto a = random_matrix(8, 7u);
  auto r = eig_dense(a);
  cplx sum = 0, tr = 0;
  for (const auto& v : r.values) sum += v;
  for (std::size_t i = 0; i < 8; ++i) tr += a(i, i);
  CHECK(std::abs(sum - tr) < 1e-9 * a.frobenius());
}

TEST_CASE("eig_dense_residuals_within_bound") {
  auto a = random_matrix(64, 99u);
  auto r = eig_dense(a);
  const double bound = 1e-10 * a.frobenius();
  for (std::size_t j = 0; j < 64; ++j) {
    double res = 0, vec = 0;
    for (std::size_t i = 0; i < 64; ++i) {
      cplx av = 0;
      for (std::size_t k = 0; k < 64; ++k) av += a(i, k) * r.vectors(k, j);
      res += std::norm(av - r.values[j] * r.vectors(i, j));
      vec += std::norm(r.vectors(i, j));
    }
    CHECK(std::sqrt(res) < bound);
    CHECK(std::abs(std::sqrt(vec) - 1.0) < 1e-12);
  }
}

TEST_CASE("eig_dense_hermitian_spectrum_is_real") {
  auto a = random_matrix(16, 5u);
  ComplexMatrix h(16, 16);
  for (std::size_t i = 0; i < 16; ++i)
    for (std::size_t j = 0; j < 16; ++j) h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
  for (const auto& v : eig_dense(h).values) CHECK(std::abs(v.imag()) <= 1e-10);
}

TEST_CASE("eig_dense_rejects_non_square") {
  CHECK_THROWS(eig_dense(ComplexMatrix(2, 3)));
}

TEST_CASE("eig_dense_sorted_canonically") {
  auto a = random_matrix(12, 31u);
  auto vals = eig_dense(a).values;
  CHECK(vals == sorted_by_re_im(vals));
}

TEST_CASE("poly_roots_quadratic_unit_pair") {
  auto r = poly_roots({1.0, 0.0, -1.0});
  auto f = sorted_by_re_im(r.flat());
  REQUIRE(f.size() == 2);
  CHECK(std::abs(f[0] - cplx(-1.0)) < 1e-12);
  CHECK(std::abs(f[1] - cplx(+1.0)) < 1e-12);
}

TEST_CASE("poly_roots_degenerate_double_root") {
  // (a x - b)^2 / sqrt2 with a = b = 1/sqrt2
  const double a = 1.0 / std::sqrt(2.0), b = 1.0 / std::sqrt(2.0);
  auto r = poly_roots({a * a / std::sqrt(2.0), -std::sqrt(2.0) * a * b, b * b / std::sqrt(2.0)});
  REQUIRE(r.roots.size() == 1);
  CHECK(r.multiplicity[0] == 2);
  CHECK(std::abs(r.roots[0] - cplx(1.0)) < 1e-5);
  CHECK(r.at_infinity == 0);
}

TEST_CASE("poly_roots_double_root_at_zero") {
  auto r = poly_roots({1.0 / std::sqrt(2.0), 0.0, 0.0});
  REQUIRE(r.roots.size() == 1);
  CHECK(r.multiplicity[0] == 2);
  CHECK(std::abs(r.roots[0]) < 1e-12);
}

TEST_CASE("poly_roots_reports_roots_at_infinity") {
  auto r = poly_roots({0.0, 1.0, 1.0});
  CHECK(r.at_infinity == 1);
  REQUIRE(r.flat().size() == 1);
  CHECK(std::abs(r.flat()[0] - cplx(-1.0)) < 1e-12);
}

TEST_CASE("poly_roots_residual_bound_random_degree_12") {
  std::mt19937 rng(2718u);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<cplx> c(13);
  for (auto& x : c) x = cplx(u(rng), u(rng));
  auto r = poly_roots(c);
  double cmax = 0;
  for (const auto& x : c) cmax = std::max(cmax, std::abs(x));
  const int d = static_cast<int>(c.size()) - 1;
  for (const auto& x : r.flat()) {
    cplx p = 0;
    for (const auto& ck : c) p = p * x + ck;
    CHECK(std::abs(p) <= 1e-9 * cmax * std::pow(std::max(1.0, std::abs(x)), d));
  }
}

TEST_CASE("poly_roots_reexpansion_matches_monic_input") {
  std::mt19937 rng(11u);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<cplx> c(7);
  c[0] = 1.0;
  for (std::size_t i = 1; i < c.size(); ++i) c[i] = cplx(u(rng), u(rng));
  auto roots = poly_roots(c).flat();
  std::vector<cplx> e(c.size(), 0.0);
  e[0] = 1.0;
  for (const auto& x : roots)
    for (std::size_t i = e.size() - 1; i >= 1; --i) e[i] -= x * e[i - 1];
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(std::abs(e[i] - c[i]) < 1e-8);
}

TEST_CASE("poly_roots_rejects_all_zero") {
  CHECK_THROWS(poly_roots({0.0, 0.0, 0.0}));
}

TEST_CASE("integrate_sin_over_half_period") {
  double v = integrate_1d([](double x) { return std::sin(x); }, 0.0, M_PI, 1e-12);
  CHECK(std::abs(v - 2.0) < 1e-10);
}

TEST_CASE("integrate_complex_constant") {
  const cplx c(0.7, -0.3);
  cplx v = integrate_1d([c](double) { return c; }, 0.0, 2.0 * M_PI, 1e-12);
  CHECK(std::abs(v - 2.0 * M_PI * c) < 1e-10);
}

TEST_CASE("integrate_linearity") {
  const double tol = 1e-9;
  auto f = [](double x) { return std::exp(-x * x); };
  auto g = [](double x) { return std::cos(3.0 * x); };
  const double al = 2.5, be = -1.25;
  double lhs =
      integrate_1d([&](double x) { return al * f(x) + be * g(x); }, -1.0, 2.0, tol);
  double rhs = al * integrate_1d(f, -1.0, 2.0, tol) + be * integrate_1d(g, -1.0, 2.0, tol);
  CHECK(std::abs(lhs - rhs) <= 2.0 * tol);
}

TEST_CASE("integrate_vanishing_phase_integrand_at_theta_zero") {
  // open-system phase integrand collapses to zero when the polar angle is 0
  const double theta = 0.0;
  auto f = [theta](double) {
    const double c = std::cos(theta), s = std::sin(theta);
    return 1.0 - c / std::sqrt(s * s + c * c);
  };
  double v = integrate_1d(f, 0.0, 10.0, 1e-12);
  CHECK(std::abs(v) < 1e-14);
}

}  // namespace numkit_test
