#pragma once

// Shared numerical substrate: dense complex eigensolver, polynomial roots,
// adaptive quadrature. Everything here is pure and reentrant.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace qwgp::numkit {

using cplx = std::complex<double>;

struct ComplexMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<cplx> a;  // row-major

  ComplexMatrix() = default;
  ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, cplx(0.0)) {}

  cplx& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  const cplx& operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  double frobenius() const {
    double s = 0;
    for (const auto& x : a) s += std::norm(x);
    return std::sqrt(s);
  }

  bool finite() const {
    for (const auto& x : a)
      if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
    return true;
  }

  ComplexMatrix operator*(const ComplexMatrix& o) const {
    if (cols != o.rows) throw std::invalid_argument("matrix product shape mismatch");
    ComplexMatrix r(rows, o.cols);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t k = 0; k < cols; ++k) {
        const cplx v = (*this)(i, k);
        if (v == cplx(0.0)) continue;
        for (std::size_t j = 0; j < o.cols; ++j) r(i, j) += v * o(k, j);
      }
    return r;
  }

  ComplexMatrix adjoint() const {
    ComplexMatrix r(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) r(j, i) = std::conj((*this)(i, j));
    return r;
  }

  std::vector<cplx> apply(const std::vector<cplx>& v) const {
    if (v.size() != cols) throw std::invalid_argument("matrix-vector shape mismatch");
    std::vector<cplx> r(rows, cplx(0.0));
    for (std::size_t i = 0; i < rows; ++i) {
      cplx s = 0;
      for (std::size_t j = 0; j < cols; ++j) s += (*this)(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }
};

struct EigenResult {
  std::vector<cplx> values;       // sorted by (Re, Im) ascending
  ComplexMatrix vectors;          // unit-norm right eigenvectors as columns, same order
  std::vector<bool> converged;    // per-pair residual check
};

// Dense non-symmetric eigensolve, canonical (Re, Im) ordering.
inline EigenResult eig_dense(const ComplexMatrix& m) {
  if (m.rows != m.cols) throw std::invalid_argument("eig_dense: matrix not square");
  if (!m.finite()) throw std::invalid_argument("eig_dense: non-finite entries");
  const std::size_t n = m.rows;

  Eigen::MatrixXcd em(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) em(i, j) = m(i, j);

  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(em, true);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eig_dense: QR iteration did not converge");

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  const auto& ev = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (ev(x).real() != ev(y).real()) return ev(x).real() < ev(y).real();
    return ev(x).imag() < ev(y).imag();
  });

  EigenResult r;
  r.values.resize(n);
  r.vectors = ComplexMatrix(n, n);
  r.converged.assign(n, false);
  const double bound = 1e-10 * m.frobenius();
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t s = order[j];
    r.values[j] = ev(s);
    Eigen::VectorXcd v = solver.eigenvectors().col(s);
    v.normalize();
    for (std::size_t i = 0; i < n; ++i) r.vectors(i, j) = v(i);
    const double res = (em * v - ev(s) * v).norm();
    r.converged[j] = res <= std::max(bound, 1e-300);
  }
  return r;
}

struct RootSet {
  std::vector<cplx> roots;        // clustered representatives, sorted by (Re, Im)
  std::vector<int> multiplicity;  // aligned with roots
  std::size_t at_infinity = 0;    // degree deficit from vanishing leading coefficients

  // multiset expansion, multiplicity copies per root
  std::vector<cplx> flat() const {
    std::vector<cplx> f;
    for (std::size_t i = 0; i < roots.size(); ++i)
      for (int k = 0; k < multiplicity[i]; ++k) f.push_back(roots[i]);
    return f;
  }
};

namespace detail {

inline cplx horner(const std::vector<cplx>& c, cplx x, cplx* dp = nullptr) {
  cplx p = c[0], d = 0.0;
  for (std::size_t i = 1; i < c.size(); ++i) {
    d = d * x + p;
    p = p * x + c[i];
  }
  if (dp) *dp = d;
  return p;
}

// Aberth-Ehrlich simultaneous iteration on a monic polynomial.
inline std::vector<cplx> aberth(const std::vector<cplx>& monic, unsigned attempt) {
  const std::size_t m = monic.size() - 1;
  double cauchy = 0;
  for (std::size_t i = 1; i < monic.size(); ++i) cauchy = std::max(cauchy, std::abs(monic[i]));
  const double radius = 1.0 + cauchy;

  std::vector<cplx> x(m);
  const double twist = 0.61803398875 + 0.37 * attempt;
  for (std::size_t i = 0; i < m; ++i) {
    const double ang = 2.0 * M_PI * (static_cast<double>(i) / m + twist);
    const double rad = radius * (0.35 + 0.5 * (static_cast<double>(i % 7) / 7.0));
    x[i] = rad * cplx(std::cos(ang), std::sin(ang));
  }

  for (int it = 0; it < 600; ++it) {
    double moved = 0;
    for (std::size_t i = 0; i < m; ++i) {
      cplx d;
      const cplx p = horner(monic, x[i], &d);
      if (p == cplx(0.0)) continue;
      cplx newton = (d == cplx(0.0)) ? cplx(1e-12) : p / d;
      cplx s = 0;
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        cplx diff = x[i] - x[j];
        if (diff == cplx(0.0)) diff = cplx(1e-14, 1e-14);
        s += 1.0 / diff;
      }
      const cplx denom = 1.0 - newton * s;
      const cplx w = (denom == cplx(0.0)) ? newton : newton / denom;
      x[i] -= w;
      moved = std::max(moved, std::abs(w) / std::max(1.0, std::abs(x[i])));
    }
    if (moved < 1e-15) break;
  }
  return x;
}

}  // namespace detail

// All finite roots of Sum_i coeffs[i] x^(d-i), descending powers. Roots closer
// than cluster_tol (relative) merge into a single root with multiplicity.
inline RootSet poly_roots(const std::vector<cplx>& coeffs, double cluster_tol = 1e-6) {
  if (coeffs.empty()) throw std::invalid_argument("poly_roots: empty coefficients");
  double cmax = 0;
  for (const auto& c : coeffs) {
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw std::invalid_argument("poly_roots: non-finite coefficient");
    cmax = std::max(cmax, std::abs(c));
  }
  if (cmax == 0.0) throw std::invalid_argument("poly_roots: all coefficients vanish");

  const std::size_t d = coeffs.size() - 1;
  const double negligible = 1e-14 * cmax;

  std::size_t lead = 0;
  while (lead < coeffs.size() && std::abs(coeffs[lead]) <= negligible) ++lead;
  std::size_t tail = coeffs.size();
  while (tail > lead && std::abs(coeffs[tail - 1]) <= negligible) --tail;

  RootSet out;
  out.at_infinity = lead;
  const std::size_t zeros = coeffs.size() - tail;

  std::vector<cplx> work(coeffs.begin() + lead, coeffs.begin() + tail);
  std::vector<cplx> found;
  for (std::size_t k = 0; k < zeros; ++k) found.push_back(0.0);

  if (work.size() >= 2) {
    std::vector<cplx> monic(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) monic[i] = work[i] / work[0];
    auto residual_ok = [&](const std::vector<cplx>& xs) {
      for (const auto& x : xs) {
        const double bound = 1e-9 * cmax * std::pow(std::max(1.0, std::abs(x)), d);
        if (std::abs(detail::horner(coeffs, x)) > bound) return false;
      }
      return true;
    };
    std::vector<cplx> xs;
    bool ok = false;
    for (unsigned attempt = 0; attempt < 4 && !ok; ++attempt) {
      xs = detail::aberth(monic, attempt);
      ok = residual_ok(xs);
    }
    if (!ok) throw std::runtime_error("poly_roots: residual bound not met after restarts");
    found.insert(found.end(), xs.begin(), xs.end());
  }

  // greedy clustering after canonical sort
  std::sort(found.begin(), found.end(), [](const cplx& x, const cplx& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  std::vector<char> used(found.size(), 0);
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (used[i]) continue;
    cplx sum = found[i];
    int count = 1;
    used[i] = 1;
    for (std::size_t j = i + 1; j < found.size(); ++j) {
      if (used[j]) continue;
      const cplx mean = sum / static_cast<double>(count);
      const double scale = std::max(1.0, std::max(std::abs(mean), std::abs(found[j])));
      if (std::abs(found[j] - mean) <= cluster_tol * scale) {
        sum += found[j];
        ++count;
        used[j] = 1;
      }
    }
    out.roots.push_back(sum / static_cast<double>(count));
    out.multiplicity.push_back(count);
  }
  std::vector<std::size_t> order(out.roots.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    if (out.roots[x].real() != out.roots[y].real())
      return out.roots[x].real() < out.roots[y].real();
    return out.roots[x].imag() < out.roots[y].imag();
  });
  RootSet sorted;
  sorted.at_infinity = out.at_infinity;
  for (std::size_t i : order) {
    sorted.roots.push_back(out.roots[i]);
    sorted.multiplicity.push_back(out.multiplicity[i]);
  }
  return sorted;
}

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights on [-1, 1].
inline constexpr double gk_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double gk_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double gk_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

template <class F, class R>
void gk15(F& f, double a, double b, R& kron, double& err, double& resabs) {
  const double h = 0.5 * (b - a), c = 0.5 * (a + b);
  R g{};
  kron = R{};
  resabs = 0;
  for (int i = 0; i < 8; ++i) {
    const R fp = f(c + h * gk_x[i]);
    const R fm = (i == 7) ? fp : f(c - h * gk_x[i]);
    const R both = (i == 7) ? fp : R(fp + fm);
    kron += gk_wk[i] * both;
    resabs += gk_wk[i] * ((i == 7) ? std::abs(fp) : std::abs(fp) + std::abs(fm));
    if (i % 2 == 1) g += gk_wg[i / 2] * both;
  }
  kron *= h;
  g *= h;
  resabs *= std::abs(h);
  err = std::abs(kron - g);
}

template <class F, class R>
R adapt(F& f, double a, double b, double tol, int depth, R whole, double err,
        double resabs) {
  // the resabs floor stops subdivision once the panel is at machine precision
  if (err <= tol || err <= 5e-15 * resabs || depth >= 48) {
    if (depth >= 48 && err > tol && err > 1e-10 * resabs)
      throw std::runtime_error("integrate_1d: subdivision cap reached");
    return whole;
  }
  const double c = 0.5 * (a + b);
  R left{}, right{};
  double el = 0, er = 0, rl = 0, rr = 0;
  gk15(f, a, c, left, el, rl);
  gk15(f, c, b, right, er, rr);
  return adapt(f, a, c, 0.5 * tol, depth + 1, left, el, rl) +
         adapt(f, c, b, 0.5 * tol, depth + 1, right, er, rr);
}

}  // namespace detail

// Adaptive Gauss-Kronrod quadrature; works for real or complex integrands.
template <class F>
auto integrate_1d(F&& f, double a, double b, double tol)
    -> std::decay_t<decltype(f(a))> {
  using R = std::decay_t<decltype(f(a))>;
  if (!(tol > 0)) throw std::invalid_argument("integrate_1d: tol must be positive");
  if (a == b) return R{};
  R whole{};
  double err = 0, resabs = 0;
  detail::gk15(f, a, b, whole, err, resabs);
  return detail::adapt(f, a, b, tol, 0, whole, err, resabs);
}

}  // namespace qwgp::numkit
