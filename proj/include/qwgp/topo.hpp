#pragma once

// Topological invariants and diagnostics for two-band lattice models built on
// the walk engines: momentum-space winding numbers (with a Bloch-vector
// cross-check and an optional biorthogonal variant), a measurement-based
// real-space winding estimator, plaquette-link Chern numbers, dense edge
// spectra of domain-wall lattices in one and two dimensions, and the two-site
// alternating-hopping reference chain.
//
// Conventions. Quasi-energy follows the step-operator eigenvalue through
// lambda = e^{-iE}, so Re E = -arg(lambda) and Im E = ln|lambda|; the "lower"
// band is the one with negative real quasi-energy (positive eigenvalue
// argument). One-dimensional momentum grids sample [-pi, pi); the
// two-dimensional composition below lives on the reduced zone [-pi/2, pi/2)^2
// of its doubled effective lattice.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "qwgp/numkit.hpp"
#include "qwgp/walks.hpp"

namespace qwgp::topo {

using cplx = std::complex<double>;
using numkit::ComplexMatrix;

namespace detail {

inline double pi() { return std::acos(-1.0); }

// Planar rotation with full-angle entries (distinct from the half-angle coin).
inline ComplexMatrix plane_rot(double x) {
  ComplexMatrix m(2, 2);
  const double c = std::cos(x), s = std::sin(x);
  m(0, 0) = c;
  m(0, 1) = -s;
  m(1, 0) = s;
  m(1, 1) = c;
  return m;
}

inline ComplexMatrix diag2(cplx a, cplx b) {
  ComplexMatrix m(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline cplx dot2(const std::array<cplx, 2>& a, const std::array<cplx, 2>& b) {
  return std::conj(a[0]) * b[0] + std::conj(a[1]) * b[1];
}

inline void normalize2(std::array<cplx, 2>& v) {
  const double n = std::sqrt(std::norm(v[0]) + std::norm(v[1]));
  if (n > 0.0) {
    v[0] /= n;
    v[1] /= n;
  }
}

// Wrap an angle difference into (-pi, pi].
inline double wrap_angle(double d) {
  const double p = pi();
  while (d <= -p) d += 2.0 * p;
  while (d > p) d -= 2.0 * p;
  return d;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Momentum-space winding number of a chiral two-band model.
//
// W_b = (1/pi) sum_k Re[ i <Gamma psi_b(k)| (psi_b(k+dk) - psi_b(k-dk))/2 > ]
//
// evaluated on a closed loop of band eigenvectors. Bands are tracked around
// the zone by overlap continuity starting from the eigenvalue-sorted order at
// the first sample, and neighbors are locally rephased (parallel transport)
// before the centered difference, so the result is gauge independent. With
// real Bloch vectors on the whole grid the independent shortcut -- accumulated
// rotation angle of the Bloch vector in the plane perpendicular to the chiral
// axis -- is evaluated as a cross-check.
// ---------------------------------------------------------------------------

struct WindingOptions {
  // Use left eigenvectors of the adjoint block for the bra side (biorthogonal
  // pairing). The default pairs each right eigenvector with itself.
  bool biorthogonal = false;
  // Eigenvalue separation below which the grid is rejected as degenerate
  // (equals 2|sin E| for a unitary block, so this matches |sin E| < 1e-8).
  double degeneracy_tol = 2e-8;
};

struct WindingResult {
  std::array<double, 2> value{};  // per band, integer-valued in gapped chiral phases
  int kcount = 0;
  bool biorthogonal = false;
  bool hermitian = false;          // Bloch vector real on the whole grid
  bool has_vector_value = false;   // Bloch-vector shortcut available
  double vector_value = 0.0;       // accumulated-angle winding of the Bloch vector
};

inline WindingResult winding_momentum(const walks::BandGrid& grid, const ComplexMatrix& gamma_op,
                                      const WindingOptions& opt = {}) {
  if (grid.dim != 1) throw std::invalid_argument("winding_momentum: needs a 1D band grid");
  const std::size_t M = grid.samples();
  if (M < 8) throw std::invalid_argument("winding_momentum: needs at least 8 momentum samples");
  if (gamma_op.rows != 2 || gamma_op.cols != 2)
    throw std::invalid_argument("winding_momentum: chiral operator must be 2x2");

  for (std::size_t j = 0; j < M; ++j) {
    if (std::abs(grid.eigvals[j][0] - grid.eigvals[j][1]) < opt.degeneracy_tol)
      throw std::runtime_error("winding_momentum: band degeneracy on the grid (|sin E| < 1e-8 at k index " +
                               std::to_string(j) + ")");
  }

  // Right eigenvectors per sample; optional left partners from the adjoint.
  auto column = [](const ComplexMatrix& m, std::size_t c) {
    std::array<cplx, 2> v{m(0, c), m(1, c)};
    detail::normalize2(v);
    return v;
  };
  std::vector<std::array<std::array<cplx, 2>, 2>> right(M), left(M);
  for (std::size_t j = 0; j < M; ++j) {
    right[j] = {column(grid.eigvecs[j], 0), column(grid.eigvecs[j], 1)};
    left[j] = right[j];
  }
  if (opt.biorthogonal) {
    for (std::size_t j = 0; j < M; ++j) {
      // Rebuild the block from its eigen-decomposition is not available here;
      // the adjoint's eigenvectors are recovered from the stored pair by the
      // biorthogonality relation: left vectors are the rows of the inverse of
      // the right-eigenvector matrix, conjugated.
      const ComplexMatrix& V = grid.eigvecs[j];
      const cplx det = V(0, 0) * V(1, 1) - V(0, 1) * V(1, 0);
      if (std::abs(det) < 1e-14)
        throw std::runtime_error("winding_momentum: defective eigenvector pair in biorthogonal mode");
      // inverse rows: [ V11 -V01 ; -V10 V00 ] / det; left_b = conj(row b).
      left[j][0] = {std::conj(V(1, 1) / det), std::conj(-V(0, 1) / det)};
      left[j][1] = {std::conj(-V(1, 0) / det), std::conj(V(0, 0) / det)};
    }
  }

  // Track both bands around the loop by overlap continuity.
  std::vector<std::array<int, 2>> pick(M);
  pick[0] = {0, 1};
  for (std::size_t j = 1; j < M; ++j) {
    for (int b = 0; b < 2; ++b) {
      const auto& prev = right[j - 1][static_cast<std::size_t>(pick[j - 1][static_cast<std::size_t>(b)])];
      const double o0 = std::abs(detail::dot2(prev, right[j][0]));
      const double o1 = std::abs(detail::dot2(prev, right[j][1]));
      pick[j][static_cast<std::size_t>(b)] = (o0 >= o1) ? 0 : 1;
    }
  }

  WindingResult res;
  res.kcount = static_cast<int>(M);
  res.biorthogonal = opt.biorthogonal;

  const auto g = [&gamma_op](const std::array<cplx, 2>& v) {
    return std::array<cplx, 2>{gamma_op(0, 0) * v[0] + gamma_op(0, 1) * v[1],
                               gamma_op(1, 0) * v[0] + gamma_op(1, 1) * v[1]};
  };

  for (int b = 0; b < 2; ++b) {
    double tot = 0.0;
    for (std::size_t j = 0; j < M; ++j) {
      const auto& r = right[j][static_cast<std::size_t>(pick[j][static_cast<std::size_t>(b)])];
      const auto& l = left[j][static_cast<std::size_t>(pick[j][static_cast<std::size_t>(b)])];
      std::array<std::array<cplx, 2>, 2> nb;
      for (int d = 0; d < 2; ++d) {
        const std::size_t jn = (d == 0) ? (j + M - 1) % M : (j + 1) % M;
        auto q = right[jn][static_cast<std::size_t>(pick[jn][static_cast<std::size_t>(b)])];
        const cplx ov = detail::dot2(l, q);  // transport gauge (biorthogonal when enabled)
        if (std::abs(ov) > 1e-14) {
          const cplx ph = std::conj(ov) / std::abs(ov);
          q[0] *= ph;
          q[1] *= ph;
        }
        nb[static_cast<std::size_t>(d)] = q;
      }
      const std::array<cplx, 2> dr{(nb[1][0] - nb[0][0]) / 2.0, (nb[1][1] - nb[0][1]) / 2.0};
      const std::array<cplx, 2> gl = g(l);
      cplx term = detail::dot2(gl, dr);
      if (opt.biorthogonal) term /= detail::dot2(l, r);
      tot += std::real(cplx(0.0, 1.0) * term);
    }
    res.value[static_cast<std::size_t>(b)] = tot / detail::pi();
  }

  // Bloch-vector shortcut: real n on the whole grid -> accumulate the wrapped
  // rotation angle of n projected on the plane perpendicular to the chiral
  // axis (cyclic pairing: axis x -> plane (y,z), axis z -> plane (x,y)).
  double im_max = 0.0;
  for (std::size_t j = 0; j < M; ++j)
    im_max = std::max({im_max, std::abs(grid.nx[j].imag()), std::abs(grid.ny[j].imag()),
                       std::abs(grid.nz[j].imag())});
  res.hermitian = im_max < 1e-9;
  if (res.hermitian) {
    const std::array<double, 3> axis{std::real(gamma_op(0, 1) + gamma_op(1, 0)) / 2.0,
                                     std::real(cplx(0, 1) * (gamma_op(0, 1) - gamma_op(1, 0))) / 2.0,
                                     std::real(gamma_op(0, 0) - gamma_op(1, 1)) / 2.0};
    int a = -1;
    for (int i = 0; i < 3; ++i)
      if (std::abs(axis[static_cast<std::size_t>(i)] - 1.0) < 1e-12) a = i;
    if (a >= 0) {
      const int e1 = (a + 1) % 3, e2 = (a + 2) % 3;
      auto comp = [&grid](int axis_index, std::size_t j) {
        return axis_index == 0 ? grid.nx[j].real() : axis_index == 1 ? grid.ny[j].real() : grid.nz[j].real();
      };
      double acc = 0.0;
      double prev = std::atan2(comp(e2, 0), comp(e1, 0));
      for (std::size_t j = 1; j <= M; ++j) {
        const std::size_t jj = j % M;
        const double cur = std::atan2(comp(e2, jj), comp(e1, jj));
        acc += detail::wrap_angle(cur - prev);
        prev = cur;
      }
      res.vector_value = acc / (2.0 * detail::pi());
      res.has_vector_value = true;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Band grids with chiral structure.
// ---------------------------------------------------------------------------

// Split-step walk block conjugated into the coin-symmetrized frame
// R(theta1/2) U~(k) R(theta1/2)^{-1}, where the sublattice (chiral) operator
// is sigma_x for every gain/loss strength. Eigenvalues are unchanged; the
// eigenvector columns and the Bloch vector are rotated accordingly.
inline walks::BandGrid chiral_band_grid(const walks::WalkSpec& spec, int kcount,
                                        unsigned workers = 1) {
  if (spec.variant != walks::Variant::ssqw1d)
    throw std::invalid_argument("chiral_band_grid: defined for the split-step walk");
  walks::BandGrid grid = walks::band_grid(spec, kcount, workers);
  const ComplexMatrix F = walks::rot2(spec.theta1 / 2.0);
  const double c = std::cos(spec.theta1 / 2.0), s = std::sin(spec.theta1 / 2.0);
  for (std::size_t j = 0; j < grid.samples(); ++j) {
    grid.eigvecs[j] = F * grid.eigvecs[j];
    // The frame change rotates the Bloch vector about the y axis.
    const cplx nx = grid.nx[j], nz = grid.nz[j];
    grid.nx[j] = c * nx + s * nz;
    grid.nz[j] = -s * nx + c * nz;
  }
  return grid;
}

// Alternating-hopping two-site chain in momentum space: d(k) = (v + w cos k,
// w sin k, 0), E_+-(k) = +-sqrt(v^2 + w^2 + 2 v w cos k), chiral operator
// sigma_z. Eigenvector columns follow the (Re, Im)-sorted eigenvalue order.
inline walks::BandGrid ssh_band_grid(double v, double w, int kcount) {
  if (v < 0.0 || w < 0.0) throw std::invalid_argument("ssh_band_grid: hoppings must be >= 0");
  if (kcount < 2) throw std::invalid_argument("ssh_band_grid: need at least two samples");
  walks::BandGrid grid;
  grid.dim = 1;
  const std::size_t M = static_cast<std::size_t>(kcount);
  grid.k.resize(M);
  grid.E.resize(M);
  grid.nx.resize(M);
  grid.ny.resize(M);
  grid.nz.resize(M);
  grid.eigvals.resize(M);
  grid.eigvecs.assign(M, ComplexMatrix(2, 2));
  const double p = detail::pi();
  const double isq = 1.0 / std::sqrt(2.0);
  for (std::size_t j = 0; j < M; ++j) {
    const double k = -p + 2.0 * p * double(j) / double(kcount);
    grid.k[j] = k;
    const double dx = v + w * std::cos(k), dy = w * std::sin(k);
    const double E = std::sqrt(dx * dx + dy * dy);
    grid.E[j] = E;
    grid.nx[j] = E > 0.0 ? dx / E : 0.0;
    grid.ny[j] = E > 0.0 ? dy / E : 0.0;
    grid.nz[j] = 0.0;
    grid.eigvals[j] = {cplx(-E, 0.0), cplx(E, 0.0)};
    const cplx dhat = E > 0.0 ? cplx(dx, dy) / E : cplx(1.0, 0.0);
    // H = [[0, conj(d)], [d, 0]]: eigenvector (1, +-dhat)/sqrt(2).
    grid.eigvecs[j](0, 0) = isq;
    grid.eigvecs[j](1, 0) = -dhat * isq;
    grid.eigvecs[j](0, 1) = isq;
    grid.eigvecs[j](1, 1) = dhat * isq;
  }
  return grid;
}

inline ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m(0, 1) = 1.0;
  m(1, 0) = 1.0;
  return m;
}

inline ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m(0, 0) = 1.0;
  m(1, 1) = -1.0;
  return m;
}

// ---------------------------------------------------------------------------
// Chern number by U(1) link variables on a discretized zone (plaquette field
// strength from the principal-branch log of the four-link product).
// ---------------------------------------------------------------------------

// One band's normalized eigenvectors on a periodic grid; vec[ix*grid + iy].
struct BandField {
  int grid = 0;
  std::vector<std::array<cplx, 2>> vec;
};

struct ChernResult {
  std::vector<int> value;             // per band, rounded from flux/(2 pi)
  std::vector<double> flux;           // per band, sum of plaquette field strengths
  std::vector<std::vector<double>> F; // per band, field strength, ix*grid + iy
  int grid = 0;
};

inline ChernResult chern_fhs(const std::vector<BandField>& bands) {
  if (bands.empty()) throw std::invalid_argument("chern_fhs: no bands");
  ChernResult res;
  res.grid = bands.front().grid;
  if (res.grid < 4) throw std::invalid_argument("chern_fhs: grid too coarse");
  for (const BandField& band : bands) {
    if (band.grid != res.grid || band.vec.size() != static_cast<std::size_t>(res.grid) * static_cast<std::size_t>(res.grid))
      throw std::invalid_argument("chern_fhs: inconsistent band field dimensions");
    const int M = band.grid;
    auto at = [&band, M](int i, int j) -> const std::array<cplx, 2>& {
      return band.vec[static_cast<std::size_t>(((i % M + M) % M) * M + ((j % M + M) % M))];
    };
    auto link = [](const std::array<cplx, 2>& a, const std::array<cplx, 2>& b) {
      const cplx ov = detail::dot2(a, b);
      const double r = std::abs(ov);
      if (r < 1e-13)
        throw std::runtime_error(
            "chern_fhs: vanishing link between neighboring eigenvectors; refine the momentum grid");
      return ov / r;
    };
    std::vector<double> F(static_cast<std::size_t>(M) * static_cast<std::size_t>(M));
    double flux = 0.0;
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) {
        const cplx prod = link(at(i, j), at(i + 1, j)) * link(at(i + 1, j), at(i + 1, j + 1)) *
                          link(at(i + 1, j + 1), at(i, j + 1)) * link(at(i, j + 1), at(i, j));
        const double f = std::arg(prod);  // principal branch (-pi, pi]
        F[static_cast<std::size_t>(i * M + j)] = f;
        flux += f;
      }
    res.flux.push_back(flux);
    res.F.push_back(std::move(F));
    res.value.push_back(static_cast<int>(std::lround(flux / (2.0 * detail::pi()))));
  }
  return res;
}

// Build the (lower, upper) band fields of a two-band step operator sampled on
// a periodic momentum grid; the lower band has negative real quasi-energy,
// i.e. the larger eigenvalue argument.
inline std::vector<BandField> band_fields(const std::function<ComplexMatrix(double, double)>& block,
                                          int grid, double k_lo, double k_span) {
  if (grid < 4) throw std::invalid_argument("band_fields: grid too coarse");
  std::vector<BandField> out(2);
  out[0].grid = out[1].grid = grid;
  out[0].vec.resize(static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid));
  out[1].vec.resize(out[0].vec.size());
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double kx = k_lo + k_span * double(i) / double(grid);
      const double ky = k_lo + k_span * double(j) / double(grid);
      const numkit::EigenResult eig = numkit::eig_dense(block(kx, ky));
      const int lower = std::arg(eig.values[0]) > std::arg(eig.values[1]) ? 0 : 1;
      for (int b = 0; b < 2; ++b) {
        const std::size_t col = static_cast<std::size_t>(b == 0 ? lower : 1 - lower);
        std::array<cplx, 2> v{eig.vectors(0, col), eig.vectors(1, col)};
        detail::normalize2(v);
        out[static_cast<std::size_t>(b)].vec[static_cast<std::size_t>(i * grid + j)] = v;
      }
    }
  return out;
}

// One-step momentum block of the triangular-lattice walk: three conditional
// displacements (along x, y, and the x+y diagonal) interleaved with
// full-angle planar rotations M(theta2), M(theta1), M(theta2). The gain/loss
// extension is balanced per axis -- within each of the x and y legs one coin
// component is attenuated and the other amplified, and the diagonal leg
// carries the opposite signs -- so the net single-step amplification is
// bounded for every momentum.
inline ComplexMatrix triangular_block(double theta1, double theta2, double gamma_x, double gamma_y,
                                      double kx, double ky) {
  const cplx i1(0.0, 1.0);
  const ComplexMatrix D1 = detail::diag2(std::exp(i1 * kx - gamma_x), std::exp(-i1 * kx + gamma_x));
  const ComplexMatrix D2 = detail::diag2(std::exp(i1 * ky - gamma_y), std::exp(-i1 * ky + gamma_y));
  const ComplexMatrix D3 = detail::diag2(std::exp(i1 * (kx + ky) + gamma_x + gamma_y),
                                         std::exp(-i1 * (kx + ky) - gamma_x - gamma_y));
  return D3 * detail::plane_rot(theta2) * D2 * detail::plane_rot(theta1) * D1 * detail::plane_rot(theta2);
}

// Chern numbers (lower band first) of the triangular-lattice walk on its
// reduced zone [-pi/2, pi/2)^2.
inline ChernResult chern_triangular(double theta1, double theta2, double gamma_x, double gamma_y,
                                    int grid = 96) {
  const double p = detail::pi();
  return chern_fhs(band_fields(
      [&](double kx, double ky) { return triangular_block(theta1, theta2, gamma_x, gamma_y, kx, ky); },
      grid, -p / 2.0, p));
}

// Chern numbers of the two-dimensional split-step composition exposed by the
// walk module (used for the gain-driven invariant sweeps).
inline ChernResult chern_walk_2d(const walks::WalkSpec& spec, int grid = 96) {
  if (spec.variant != walks::Variant::dtqw2d)
    throw std::invalid_argument("chern_walk_2d: needs the two-component 2D walk");
  walks::require_homogeneous(spec, "chern_walk_2d");
  const double p = detail::pi();
  return chern_fhs(band_fields(
      [&spec](double kx, double ky) { return walks::kblock_2d(spec, kx, ky); }, grid, -p / 2.0, p));
}

// ---------------------------------------------------------------------------
// Real-space winding estimator: evolve |-> (x) |0> with the coin-symmetrized
// split-step walk; after each step the detection sublattice |+> is read out
// with efficiency pM and removed, and the detected probability is accumulated
// weighted by displacement. The displacement axis is oriented so that the
// accumulated mean matches the sigma_x-frame momentum winding number (the
// +1 phase plateaus at +1).
// ---------------------------------------------------------------------------

struct RealSpaceWinding {
  double mean_displacement = 0.0;  // converges to the winding number
  double detected_weight = 0.0;    // total detected probability (-> 1)
  std::vector<double> partial;     // running value after each step
};

inline RealSpaceWinding winding_realspace(const walks::WalkSpec& spec, double pM, int steps) {
  if (!(pM > 0.0) || pM > 1.0)
    throw std::invalid_argument("winding_realspace: detection efficiency must lie in (0, 1]");
  if (spec.variant != walks::Variant::ssqw1d)
    throw std::invalid_argument("winding_realspace: defined for the split-step walk");
  walks::require_homogeneous(spec, "winding_realspace");
  if (spec.gamma != 0.0 || spec.phi != 0.0)
    throw std::invalid_argument("winding_realspace: measurement protocol is defined for the plain unitary walk");
  if (steps < 1) throw std::invalid_argument("winding_realspace: need at least one step");
  spec.validate();

  const int L = spec.N;
  const int x0 = L / 2;
  const double isq = 1.0 / std::sqrt(2.0);
  std::vector<cplx> up(static_cast<std::size_t>(L), 0.0), dn(static_cast<std::size_t>(L), 0.0);
  up[static_cast<std::size_t>(x0)] = isq;
  dn[static_cast<std::size_t>(x0)] = -isq;

  auto coin = [L](double th, std::vector<cplx>& u, std::vector<cplx>& d) {
    const double c = std::cos(th / 2.0), s = std::sin(th / 2.0);
    for (int n = 0; n < L; ++n) {
      const cplx a = u[static_cast<std::size_t>(n)], b = d[static_cast<std::size_t>(n)];
      u[static_cast<std::size_t>(n)] = c * a - s * b;
      d[static_cast<std::size_t>(n)] = s * a + c * b;
    }
  };
  auto roll = [L](std::vector<cplx>& v, int shift) {
    std::vector<cplx> out(static_cast<std::size_t>(L));
    for (int n = 0; n < L; ++n) out[static_cast<std::size_t>((n + shift + L) % L)] = v[static_cast<std::size_t>(n)];
    v.swap(out);
  };

  RealSpaceWinding res;
  res.partial.reserve(static_cast<std::size_t>(steps));
  double acc = 0.0;
  const double keep = std::sqrt(1.0 - pM);
  for (int j = 0; j < steps; ++j) {
    coin(spec.theta1 / 2.0, up, dn);
    roll(up, +1);
    coin(spec.theta2, up, dn);
    roll(dn, -1);
    coin(spec.theta1 / 2.0, up, dn);
    for (int y = 0; y < L; ++y) {
      const cplx bamp = (up[static_cast<std::size_t>(y)] + dn[static_cast<std::size_t>(y)]) * isq;
      const cplx aamp = (up[static_cast<std::size_t>(y)] - dn[static_cast<std::size_t>(y)]) * isq;
      const double s = pM * std::norm(bamp);
      acc += double(y - x0) * s;
      res.detected_weight += s;
      const cplx kept = keep * bamp;
      up[static_cast<std::size_t>(y)] = isq * (aamp + kept);
      dn[static_cast<std::size_t>(y)] = isq * (-aamp + kept);
    }
    res.partial.push_back(-acc);
  }
  res.mean_displacement = -acc;
  return res;
}

// ---------------------------------------------------------------------------
// Edge spectra of domain-wall lattices.
// ---------------------------------------------------------------------------

struct EdgeOptions {
  double ipr_threshold = 0.1;        // localization: inverse participation ratio
  double wall_weight_threshold = 0.9;  // ... and >= 90% weight near a wall
  int wall_radius = 10;              // "near": within this many sites of a wall
  double window = 0.15;              // 2D: quasi-energy half-width of each gap window
  double flood_factor = 2.0;         // 2D: failure when mid-gap states per k_x > factor x wall count
  double arg_eps_unitary = 1e-6;     // 1D: mid-gap |arg lambda| tolerance at gamma = 0
  double arg_eps_nonunitary = 1e-3;  // 1D: relaxed tolerance for gamma > 0
  double pair_tol = 1e-8;            // eigenvalue distance treated as a degenerate pair
};

struct EdgeState {
  int k_index = -1;  // 2D: index into EdgeSpectrum::kx; -1 for the 1D spectrum
  int band = 0;      // position within the per-sample eigenvalue sort
  cplx lambda;       // step-operator eigenvalue; Re E = -arg, Im E = ln|.|
  double ipr = 0.0;
  double wall_weight = 0.0;
};

struct EdgeSpectrum {
  std::vector<double> kx;                     // sampled momenta (2D only)
  std::vector<int> wall_sites;                // inner-domain sites adjacent to each boundary
  std::vector<EdgeState> states;              // every eigenstate, sample-major
  std::vector<std::size_t> midgap;            // indices into states
  std::vector<std::size_t> localized_midgap;  // mid-gap passing the localization criterion
  // 2D gap-window bookkeeping.
  std::size_t principal_midgap = 0, principal_localized = 0;
  std::size_t pi_midgap = 0, pi_localized = 0;
  double principal_per_kx = 0.0;
  bool isolation_ok = true;  // false when the principal window floods
};

namespace detail {

// Site-marginal probabilities of a coin-2 eigenvector column.
inline std::vector<double> site_marginal(const ComplexMatrix& vecs, std::size_t col, int sites) {
  std::vector<double> p(static_cast<std::size_t>(sites));
  double tot = 0.0;
  for (int y = 0; y < sites; ++y) {
    const double v = std::norm(vecs(static_cast<std::size_t>(2 * y), col)) +
                     std::norm(vecs(static_cast<std::size_t>(2 * y + 1), col));
    p[static_cast<std::size_t>(y)] = v;
    tot += v;
  }
  if (tot > 0.0)
    for (double& v : p) v /= tot;
  return p;
}

inline double ipr_of(const std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) s += v * v;
  return s;
}

inline std::vector<bool> wall_mask(int sites, const std::vector<int>& wall_sites, int radius) {
  std::vector<bool> mask(static_cast<std::size_t>(sites), false);
  for (int w : wall_sites)
    for (int y = 0; y < sites; ++y) {
      const int d = std::abs(((y - w + sites / 2) % sites + sites) % sites - sites / 2);
      if (d <= radius) mask[static_cast<std::size_t>(y)] = true;
    }
  return mask;
}

inline double masked_weight(const std::vector<double>& p, const std::vector<bool>& mask) {
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if (mask[i]) s += p[i];
  return s;
}

// Rotate a (near-)degenerate pair of eigenvector columns so that the weight
// inside `region` is extremal for each member: orthonormalize the pair, then
// diagonalize the 2x2 Gram matrix of the region projector.
inline void rotate_pair_to_region(ComplexMatrix& vecs, std::size_t c1, std::size_t c2,
                                  const std::vector<bool>& region) {
  const std::size_t dim = vecs.rows;
  std::vector<cplx> a(dim), b(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    a[r] = vecs(r, c1);
    b[r] = vecs(r, c2);
  }
  auto nrm = [&](std::vector<cplx>& v) {
    double s = 0.0;
    for (const cplx& x : v) s += std::norm(x);
    s = std::sqrt(s);
    if (s > 0.0)
      for (cplx& x : v) x /= s;
  };
  nrm(a);
  cplx ov = 0.0;
  for (std::size_t r = 0; r < dim; ++r) ov += std::conj(a[r]) * b[r];
  for (std::size_t r = 0; r < dim; ++r) b[r] -= ov * a[r];
  nrm(b);

  // Gram matrix of the region projector in the (a, b) basis (coin index is
  // row parity; region is per site).
  cplx gaa = 0.0, gab = 0.0, gbb = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    if (!region[r / 2]) continue;
    gaa += std::conj(a[r]) * a[r];
    gab += std::conj(a[r]) * b[r];
    gbb += std::conj(b[r]) * b[r];
  }
  // Eigenvectors of [[gaa, gab], [conj(gab), gbb]] (Hermitian 2x2).
  const double haa = gaa.real(), hbb = gbb.real();
  const cplx hab = gab;
  const double tr = haa + hbb;
  const double dif = haa - hbb;
  const double disc = std::sqrt(dif * dif + 4.0 * std::norm(hab));
  const double lam_hi = (tr + disc) / 2.0;
  cplx u0, u1;
  if (std::abs(hab) < 1e-15) {
    if (haa >= hbb) {
      u0 = 1.0;
      u1 = 0.0;
    } else {
      u0 = 0.0;
      u1 = 1.0;
    }
  } else {
    u0 = hab;
    u1 = lam_hi - haa;
    const double n = std::sqrt(std::norm(u0) + std::norm(u1));
    u0 /= n;
    u1 /= n;
  }
  for (std::size_t r = 0; r < dim; ++r) {
    const cplx hi = u0 * a[r] + u1 * b[r];
    const cplx lo = -std::conj(u1) * a[r] + std::conj(u0) * b[r];
    vecs(r, c1) = hi;
    vecs(r, c2) = lo;
  }
}

}  // namespace detail

// Dense spectrum of a 1D split-step walk closed chain whose coin angles take
// two values across symmetric domain walls. Mid-gap states are eigenvalues
// with |arg lambda| (or |arg lambda| - pi) below the tolerance; localized
// mid-gap states additionally pass the participation/wall-weight criterion.
// Degenerate mid-gap pairs are rotated onto single walls before the
// localization test.
inline EdgeSpectrum edge_spectrum_1d(const walks::WalkSpec& spec, const EdgeOptions& opt = {}) {
  if (spec.is_2d()) throw std::invalid_argument("edge_spectrum_1d: needs a 1D walk");
  spec.validate();
  if (spec.homogeneous())
    throw std::invalid_argument("edge_spectrum_1d: needs two coin-angle domains");
  const int N = spec.N;

  EdgeSpectrum res;
  // Boundaries: neighbor pairs whose (theta1, theta2) differ; report the side
  // that shares the central site's angles (the inner domain edge).
  auto t1_at = [&spec](int i) {
    return spec.theta1_map.empty() ? spec.theta1 : spec.theta1_map[static_cast<std::size_t>(i)];
  };
  auto t2_at = [&spec](int i) {
    return spec.theta2_map.empty() ? spec.theta2 : spec.theta2_map[static_cast<std::size_t>(i)];
  };
  const double c1 = t1_at(N / 2), c2 = t2_at(N / 2);
  for (int i = 0; i < N; ++i) {
    const int j = (i + 1) % N;
    if (t1_at(i) != t1_at(j) || t2_at(i) != t2_at(j)) {
      const bool i_inner = (t1_at(i) == c1 && t2_at(i) == c2);
      res.wall_sites.push_back(i_inner ? i : j);
    }
  }
  std::sort(res.wall_sites.begin(), res.wall_sites.end());

  ComplexMatrix U = walks::StepOperator(spec).dense();
  numkit::EigenResult eig = numkit::eig_dense(U);

  const double eps = (spec.gamma == 0.0) ? opt.arg_eps_unitary : opt.arg_eps_nonunitary;
  const double p = detail::pi();

  // Identify mid-gap candidates first so degenerate pairs can be rotated.
  std::vector<std::size_t> mid;
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    const double a = std::arg(eig.values[i]);
    if (std::abs(a) < eps || std::abs(std::abs(a) - p) < eps) mid.push_back(i);
  }
  const std::vector<bool> mask = detail::wall_mask(N, res.wall_sites, opt.wall_radius);
  std::vector<bool> region0 = detail::wall_mask(N, {res.wall_sites.empty() ? 0 : res.wall_sites.front()},
                                                opt.wall_radius);
  std::vector<bool> used(mid.size(), false);
  for (std::size_t x = 0; x < mid.size(); ++x) {
    if (used[x]) continue;
    for (std::size_t y = x + 1; y < mid.size(); ++y) {
      if (used[y]) continue;
      if (std::abs(eig.values[mid[x]] - eig.values[mid[y]]) <
          opt.pair_tol * std::max(1.0, std::abs(eig.values[mid[x]]))) {
        detail::rotate_pair_to_region(eig.vectors, mid[x], mid[y], region0);
        used[x] = used[y] = true;
        break;
      }
    }
  }

  res.states.resize(eig.values.size());
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    EdgeState st;
    st.band = static_cast<int>(i);
    st.lambda = eig.values[i];
    const std::vector<double> pm = detail::site_marginal(eig.vectors, i, N);
    st.ipr = detail::ipr_of(pm);
    st.wall_weight = detail::masked_weight(pm, mask);
    res.states[i] = st;
  }
  for (std::size_t i : mid) {
    res.midgap.push_back(i);
    if (res.states[i].ipr > opt.ipr_threshold && res.states[i].wall_weight > opt.wall_weight_threshold)
      res.localized_midgap.push_back(i);
  }
  return res;
}

// Two-domain strip of the triangular-lattice walk: periodic in x (sampled
// momenta) and real-space along y with symmetric walls at centered indices
// +-wall. Coin angles take (theta1_inner, theta2_inner) on |y - Ny/2| <= wall
// and the outer pair elsewhere.
struct TriangularEdgeSpec {
  int Ny = 101;
  int wall = 25;
  double theta1_inner = 0.0, theta2_inner = 0.0;
  double theta1_outer = 0.0, theta2_outer = 0.0;
  double gamma_x = 0.0, gamma_y = 0.0;
  int kx_count = 41;

  void validate() const {
    if (Ny < 8) throw std::invalid_argument("triangular edge spec: strip height must be >= 8");
    if (wall < 1 || wall >= Ny / 2) throw std::invalid_argument("triangular edge spec: wall out of range");
    if (kx_count < 2) throw std::invalid_argument("triangular edge spec: need at least two momenta");
  }
};

namespace detail {

// Dense per-k_x block of the triangular walk on a y ring (2 Ny x 2 Ny).
inline ComplexMatrix triangular_edge_block(const TriangularEdgeSpec& es, double kx) {
  const int Ny = es.Ny;
  const int dim = 2 * Ny;
  std::vector<double> th1(static_cast<std::size_t>(Ny)), th2(static_cast<std::size_t>(Ny));
  for (int y = 0; y < Ny; ++y) {
    const bool inner = std::abs(y - Ny / 2) <= es.wall;
    th1[static_cast<std::size_t>(y)] = inner ? es.theta1_inner : es.theta1_outer;
    th2[static_cast<std::size_t>(y)] = inner ? es.theta2_inner : es.theta2_outer;
  }
  const cplx i1(0.0, 1.0);
  const cplx f1u = std::exp(i1 * kx - es.gamma_x), f1d = std::exp(-i1 * kx + es.gamma_x);
  const cplx f3u = std::exp(i1 * kx + es.gamma_x + es.gamma_y);
  const cplx f3d = std::exp(-i1 * kx - es.gamma_x - es.gamma_y);
  const double g2u = std::exp(-es.gamma_y), g2d = std::exp(es.gamma_y);

  ComplexMatrix U(static_cast<std::size_t>(dim), static_cast<std::size_t>(dim));
  std::vector<cplx> u(static_cast<std::size_t>(Ny)), d(static_cast<std::size_t>(Ny));
  auto coin = [&](const std::vector<double>& th) {
    for (int y = 0; y < Ny; ++y) {
      const double c = std::cos(th[static_cast<std::size_t>(y)]), s = std::sin(th[static_cast<std::size_t>(y)]);
      const cplx a = u[static_cast<std::size_t>(y)], b = d[static_cast<std::size_t>(y)];
      u[static_cast<std::size_t>(y)] = c * a - s * b;
      d[static_cast<std::size_t>(y)] = s * a + c * b;
    }
  };
  auto roll_pair = [&](cplx fu, cplx fd) {  // up: y+1, down: y-1, with factors
    std::vector<cplx> ru(static_cast<std::size_t>(Ny)), rd(static_cast<std::size_t>(Ny));
    for (int y = 0; y < Ny; ++y) {
      ru[static_cast<std::size_t>((y + 1) % Ny)] = u[static_cast<std::size_t>(y)] * fu;
      rd[static_cast<std::size_t>((y - 1 + Ny) % Ny)] = d[static_cast<std::size_t>(y)] * fd;
    }
    u.swap(ru);
    d.swap(rd);
  };
  for (int col = 0; col < dim; ++col) {
    std::fill(u.begin(), u.end(), cplx(0.0));
    std::fill(d.begin(), d.end(), cplx(0.0));
    if (col % 2 == 0)
      u[static_cast<std::size_t>(col / 2)] = 1.0;
    else
      d[static_cast<std::size_t>(col / 2)] = 1.0;
    coin(th2);
    for (int y = 0; y < Ny; ++y) {
      u[static_cast<std::size_t>(y)] *= f1u;
      d[static_cast<std::size_t>(y)] *= f1d;
    }
    coin(th1);
    roll_pair(g2u, g2d);
    coin(th2);
    roll_pair(f3u, f3d);
    for (int y = 0; y < Ny; ++y) {
      U(static_cast<std::size_t>(2 * y), static_cast<std::size_t>(col)) = u[static_cast<std::size_t>(y)];
      U(static_cast<std::size_t>(2 * y + 1), static_cast<std::size_t>(col)) = d[static_cast<std::size_t>(y)];
    }
  }
  return U;
}

}  // namespace detail

// Quasi-energy bands of the two-domain strip versus k_x, with per-state
// localization data. States inside the two gap windows (|Re E| < window and
// ||Re E| - pi| < window) are counted as mid-gap; the boundary is considered
// isolated while the principal window holds no more than flood_factor x
// (number of walls) mid-gap states per momentum sample on average.
inline EdgeSpectrum edge_bands_2d(const TriangularEdgeSpec& es, const EdgeOptions& opt = {}) {
  es.validate();
  const int Ny = es.Ny;
  EdgeSpectrum res;
  res.wall_sites = {Ny / 2 - es.wall, Ny / 2 + es.wall};
  const std::vector<bool> mask = detail::wall_mask(Ny, res.wall_sites, opt.wall_radius);
  const double p = detail::pi();

  res.kx.resize(static_cast<std::size_t>(es.kx_count));
  for (int j = 0; j < es.kx_count; ++j)
    res.kx[static_cast<std::size_t>(j)] = -p / 2.0 + p * double(j) / double(es.kx_count);

  res.states.reserve(static_cast<std::size_t>(es.kx_count) * static_cast<std::size_t>(2 * Ny));
  for (int j = 0; j < es.kx_count; ++j) {
    const ComplexMatrix U = detail::triangular_edge_block(es, res.kx[static_cast<std::size_t>(j)]);
    const numkit::EigenResult eig = numkit::eig_dense(U);
    for (std::size_t i = 0; i < eig.values.size(); ++i) {
      EdgeState st;
      st.k_index = j;
      st.band = static_cast<int>(i);
      st.lambda = eig.values[i];
      const std::vector<double> pm = detail::site_marginal(eig.vectors, i, Ny);
      st.ipr = detail::ipr_of(pm);
      st.wall_weight = detail::masked_weight(pm, mask);
      const double reE = -std::arg(st.lambda);
      const bool in0 = std::abs(reE) < opt.window;
      const bool inpi = std::abs(std::abs(reE) - p) < opt.window;
      const std::size_t idx = res.states.size();
      res.states.push_back(st);
      if (!(in0 || inpi)) continue;
      res.midgap.push_back(idx);
      const bool loc = st.ipr > opt.ipr_threshold && st.wall_weight > opt.wall_weight_threshold;
      if (loc) res.localized_midgap.push_back(idx);
      if (in0) {
        ++res.principal_midgap;
        if (loc) ++res.principal_localized;
      } else {
        ++res.pi_midgap;
        if (loc) ++res.pi_localized;
      }
    }
  }
  res.principal_per_kx = double(res.principal_midgap) / double(es.kx_count);
  res.isolation_ok = res.principal_per_kx <= opt.flood_factor * double(res.wall_sites.size());
  return res;
}

// ---------------------------------------------------------------------------
// Alternating-hopping reference chain (two-site unit cell, hoppings v within
// and w between cells). Dispersion, Bloch-vector track, dense open/periodic
// spectrum, zero-mode count, and end-state sublattice polarization.
// ---------------------------------------------------------------------------

struct SshReference {
  std::vector<double> k;              // momentum samples
  std::vector<double> E_plus, E_minus;
  std::vector<double> d_x, d_y;       // Bloch-vector track (d_z = 0)
  std::vector<double> spectrum;       // chain eigenvalues, ascending
  int zero_modes = 0;                 // |E| < 1e-6
  // Per zero mode (left-half-dominant first): sublattice and end weights.
  std::vector<double> zero_A_weight, zero_B_weight, zero_left_weight;
  std::vector<std::vector<double>> zero_site_prob;  // site-marginal profiles
};

inline SshReference ssh_reference(double v, double w, int ncells, bool open_chain,
                                  int kcount = 512) {
  if (v < 0.0 || w < 0.0) throw std::invalid_argument("ssh_reference: hoppings must be >= 0");
  if (ncells < 2) throw std::invalid_argument("ssh_reference: need at least two cells");
  if (kcount < 2) throw std::invalid_argument("ssh_reference: need at least two momentum samples");

  SshReference res;
  const double p = detail::pi();
  res.k.resize(static_cast<std::size_t>(kcount));
  res.E_plus.resize(res.k.size());
  res.E_minus.resize(res.k.size());
  res.d_x.resize(res.k.size());
  res.d_y.resize(res.k.size());
  for (int j = 0; j < kcount; ++j) {
    const double k = -p + 2.0 * p * double(j) / double(kcount);
    res.k[static_cast<std::size_t>(j)] = k;
    const double dx = v + w * std::cos(k), dy = w * std::sin(k);
    const double E = std::sqrt(dx * dx + dy * dy);
    res.E_plus[static_cast<std::size_t>(j)] = E;
    res.E_minus[static_cast<std::size_t>(j)] = -E;
    res.d_x[static_cast<std::size_t>(j)] = dx;
    res.d_y[static_cast<std::size_t>(j)] = dy;
  }

  const int n = 2 * ncells;
  ComplexMatrix H(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int i = 0; i < ncells; ++i) {
    H(static_cast<std::size_t>(2 * i), static_cast<std::size_t>(2 * i + 1)) = v;
    H(static_cast<std::size_t>(2 * i + 1), static_cast<std::size_t>(2 * i)) = v;
    const int nb = 2 * i + 2;
    if (nb < n) {
      H(static_cast<std::size_t>(2 * i + 1), static_cast<std::size_t>(nb)) = w;
      H(static_cast<std::size_t>(nb), static_cast<std::size_t>(2 * i + 1)) = w;
    } else if (!open_chain) {
      H(static_cast<std::size_t>(2 * i + 1), 0) = w;
      H(0, static_cast<std::size_t>(2 * i + 1)) = w;
    }
  }
  numkit::EigenResult eig = numkit::eig_dense(H);

  std::vector<std::size_t> zero;
  res.spectrum.resize(eig.values.size());
  for (std::size_t i = 0; i < eig.values.size(); ++i) {
    res.spectrum[i] = eig.values[i].real();
    if (std::abs(eig.values[i]) < 1e-6) zero.push_back(i);
  }
  std::sort(res.spectrum.begin(), res.spectrum.end());
  res.zero_modes = static_cast<int>(zero.size());

  if (zero.size() == 2) {
    std::vector<bool> left_half(static_cast<std::size_t>(n / 2), false);
    for (std::size_t y = 0; y < left_half.size() / 2; ++y) left_half[y] = true;  // left half in cells
    // `rotate_pair_to_region` works on site regions indexed by row/2; here a
    // "site" is one cell (two sublattice rows), so the region marks the left
    // half of the cells.
    detail::rotate_pair_to_region(eig.vectors, zero[0], zero[1], left_half);
  }
  for (std::size_t zi : zero) {
    double A = 0.0, B = 0.0, lw = 0.0;
    std::vector<double> prob(static_cast<std::size_t>(n));
    double tot = 0.0;
    for (int r = 0; r < n; ++r) {
      const double q = std::norm(eig.vectors(static_cast<std::size_t>(r), zi));
      prob[static_cast<std::size_t>(r)] = q;
      tot += q;
      if (r % 2 == 0)
        A += q;
      else
        B += q;
      if (r < n / 2) lw += q;
    }
    if (tot > 0.0) {
      for (double& q : prob) q /= tot;
      A /= tot;
      B /= tot;
      lw /= tot;
    }
    res.zero_A_weight.push_back(A);
    res.zero_B_weight.push_back(B);
    res.zero_left_weight.push_back(lw);
    res.zero_site_prob.push_back(std::move(prob));
  }
  // Left-dominant mode first.
  if (res.zero_left_weight.size() == 2 && res.zero_left_weight[0] < res.zero_left_weight[1]) {
    std::swap(res.zero_A_weight[0], res.zero_A_weight[1]);
    std::swap(res.zero_B_weight[0], res.zero_B_weight[1]);
    std::swap(res.zero_left_weight[0], res.zero_left_weight[1]);
    std::swap(res.zero_site_prob[0], res.zero_site_prob[1]);
  }
  return res;
}

// ---------------------------------------------------------------------------
// CSV export.
// ---------------------------------------------------------------------------

struct PhasePoint {
  double theta1 = 0.0, theta2 = 0.0, gamma = 0.0, invariant = 0.0;
};

inline void write_phase_csv(std::ostream& os, const std::vector<PhasePoint>& rows, int precision = 15) {
  os.precision(precision);
  os << "theta1,theta2,gamma,invariant\n";
  for (const PhasePoint& r : rows)
    os << r.theta1 << ',' << r.theta2 << ',' << r.gamma << ',' << r.invariant << '\n';
}

// 1D spectra: (index, Re lambda, Im lambda, IPR). 2D spectra: (k_x, band,
// Re E, Im E) with E = i log lambda on the principal branch.
inline void write_edge_csv(std::ostream& os, const EdgeSpectrum& spec, int precision = 15) {
  os.precision(precision);
  if (spec.kx.empty()) {
    os << "index,re_lambda,im_lambda,ipr\n";
    for (std::size_t i = 0; i < spec.states.size(); ++i) {
      const EdgeState& st = spec.states[i];
      os << i << ',' << st.lambda.real() << ',' << st.lambda.imag() << ',' << st.ipr << '\n';
    }
  } else {
    os << "kx,band,re_E,im_E\n";
    for (const EdgeState& st : spec.states) {
      const double reE = -std::arg(st.lambda);
      const double imE = std::log(std::abs(st.lambda));
      os << spec.kx[static_cast<std::size_t>(st.k_index)] << ',' << st.band << ',' << reE << ',' << imE
         << '\n';
    }
  }
}

}  // namespace qwgp::topo
