#pragma once

// Discrete-time quantum-walk engines: one- and two-dimensional coined walks,
// split-step and electrically tilted variants, four-component coins, and
// balanced gain/loss (non-unitary) extensions.
//
// Real-space evolution is stencil-based (per-site coin mix + conditional
// shifts with periodic wrap); dense matrices are materialised only on
// request. Momentum-space band structure comes from closed forms and is
// cross-checkable against the numerically composed 2x2 blocks that the same
// header exposes.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "qwgp/numkit.hpp"

namespace qwgp::walks {

using cplx = std::complex<double>;
using numkit::ComplexMatrix;

enum class Variant { dtqw1d, ssqw1d, electric1d, dtqw2d, coin4d2d };
enum class Coin4D { hadamard, grover, fourier };
enum class NormRegime { constant, linear, exponential, indeterminate };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::dtqw1d: return "dtqw1d";
    case Variant::ssqw1d: return "ssqw1d";
    case Variant::electric1d: return "electric1d";
    case Variant::dtqw2d: return "dtqw2d";
    case Variant::coin4d2d: return "coin4d2d";
  }
  return "?";
}

inline const char* to_string(Coin4D c) {
  switch (c) {
    case Coin4D::hadamard: return "hadamard";
    case Coin4D::grover: return "grover";
    case Coin4D::fourier: return "fourier";
  }
  return "?";
}

inline const char* to_string(NormRegime r) {
  switch (r) {
    case NormRegime::constant: return "constant";
    case NormRegime::linear: return "linear";
    case NormRegime::exponential: return "exponential";
    case NormRegime::indeterminate: return "indeterminate";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Specification of a walk instance.
// ---------------------------------------------------------------------------

struct WalkSpec {
  Variant variant = Variant::dtqw1d;

  // Coin angles. Either uniform (theta1/theta2) or position dependent via the
  // map vectors: one entry per site for 1D walks, one entry per row (y index)
  // for 2D walks. theta2 is ignored by the single-coin variants.
  double theta1 = 0.0;
  double theta2 = 0.0;
  std::vector<double> theta1_map;
  std::vector<double> theta2_map;

  // Gain/loss exponents (split-step: gamma; 2D: gamma_x, gamma_y) and the
  // per-site phase gradient of the electric walk / split-step phase operator.
  double gamma = 0.0;
  double gamma_x = 0.0;
  double gamma_y = 0.0;
  double phi = 0.0;

  Coin4D coin4d = Coin4D::hadamard;

  int N = 0;   // 1D lattice size
  int Nx = 0;  // 2D lattice size
  int Ny = 0;
  bool periodic = true;

  bool is_2d() const { return variant == Variant::dtqw2d || variant == Variant::coin4d2d; }
  int coin_dim() const { return variant == Variant::coin4d2d ? 4 : 2; }
  int sites() const { return is_2d() ? Nx * Ny : N; }
  int dim() const { return sites() * coin_dim(); }
  bool homogeneous() const { return theta1_map.empty() && theta2_map.empty(); }

  void validate() const {
    if (is_2d()) {
      if (Nx < 2 || Ny < 2) throw std::invalid_argument("walk spec: 2D lattice sizes must be >= 2");
    } else {
      if (N < 2) throw std::invalid_argument("walk spec: lattice size must be >= 2");
    }
    if (!periodic) throw std::invalid_argument("walk spec: only periodic boundaries are supported");
    const std::size_t rows = is_2d() ? static_cast<std::size_t>(Ny) : static_cast<std::size_t>(N);
    if (!theta1_map.empty() && theta1_map.size() != rows)
      throw std::invalid_argument("walk spec: theta1 map must cover every site");
    if (!theta2_map.empty() && theta2_map.size() != rows)
      throw std::invalid_argument("walk spec: theta2 map must cover every site");
    for (double v : theta1_map)
      if (!std::isfinite(v)) throw std::invalid_argument("walk spec: non-finite angle in theta1 map");
    for (double v : theta2_map)
      if (!std::isfinite(v)) throw std::invalid_argument("walk spec: non-finite angle in theta2 map");
  }
};

// Per-site angle map with a symmetric domain wall: sites whose centered label
// n = i - N/2 satisfies |n| <= wall get `inner`, the rest get `outer`.
inline std::vector<double> domain_wall_map(int N, int wall, double inner, double outer) {
  if (N < 2) throw std::invalid_argument("domain_wall_map: lattice size must be >= 2");
  if (wall < 0) throw std::invalid_argument("domain_wall_map: wall position must be >= 0");
  std::vector<double> m(static_cast<std::size_t>(N));
  const int c = N / 2;
  for (int i = 0; i < N; ++i) m[static_cast<std::size_t>(i)] = (std::abs(i - c) <= wall) ? inner : outer;
  return m;
}

// ---------------------------------------------------------------------------
// State storage. 1D: amp[site*coin + c]. 2D: amp[((y*Nx) + x)*coin + c].
// ---------------------------------------------------------------------------

struct StateVector {
  int N = 0, Nx = 0, Ny = 0;
  int coin = 2;
  std::vector<cplx> amp;

  bool is_2d() const { return Nx > 0; }
  int sites() const { return is_2d() ? Nx * Ny : N; }

  double norm2() const {
    double s = 0.0;
    for (const cplx& a : amp) s += std::norm(a);
    return s;
  }

  cplx& at1d(int n, int c) { return amp[static_cast<std::size_t>(n * coin + c)]; }
  const cplx& at1d(int n, int c) const { return amp[static_cast<std::size_t>(n * coin + c)]; }
  cplx& at2d(int x, int y, int c) { return amp[static_cast<std::size_t>(((y * Nx) + x) * coin + c)]; }
  const cplx& at2d(int x, int y, int c) const {
    return amp[static_cast<std::size_t>(((y * Nx) + x) * coin + c)];
  }
};

inline StateVector make_state(const WalkSpec& spec) {
  spec.validate();
  StateVector s;
  s.coin = spec.coin_dim();
  if (spec.is_2d()) {
    s.Nx = spec.Nx;
    s.Ny = spec.Ny;
  } else {
    s.N = spec.N;
  }
  s.amp.assign(static_cast<std::size_t>(spec.dim()), cplx(0.0));
  return s;
}

// A walker localized at the central site with the given coin amplitudes.
inline StateVector localized_state(const WalkSpec& spec, const std::vector<cplx>& coin_amp) {
  StateVector s = make_state(spec);
  if (static_cast<int>(coin_amp.size()) != s.coin)
    throw std::invalid_argument("localized_state: coin amplitude count does not match coin dimension");
  if (spec.is_2d()) {
    for (int c = 0; c < s.coin; ++c) s.at2d(spec.Nx / 2, spec.Ny / 2, c) = coin_amp[static_cast<std::size_t>(c)];
  } else {
    for (int c = 0; c < s.coin; ++c) s.at1d(spec.N / 2, c) = coin_amp[static_cast<std::size_t>(c)];
  }
  return s;
}

// Normalized probability of finding the walker at each site.
inline std::vector<double> site_probabilities(const StateVector& s) {
  std::vector<double> p(static_cast<std::size_t>(s.sites()), 0.0);
  for (int n = 0; n < s.sites(); ++n) {
    double v = 0.0;
    for (int c = 0; c < s.coin; ++c) v += std::norm(s.amp[static_cast<std::size_t>(n * s.coin + c)]);
    p[static_cast<std::size_t>(n)] = v;
  }
  double tot = 0.0;
  for (double v : p) tot += v;
  if (!(tot > 0.0)) throw std::invalid_argument("site_probabilities: zero-norm state");
  for (double& v : p) v /= tot;
  return p;
}

// ---------------------------------------------------------------------------
// Small coin matrices.
// ---------------------------------------------------------------------------

// R(theta) = exp(-i theta sigma_y / 2): rows/cols in the (up, down) basis.
inline ComplexMatrix rot2(double theta) {
  ComplexMatrix m(2, 2);
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  m(0, 0) = c;
  m(0, 1) = -s;
  m(1, 0) = s;
  m(1, 1) = c;
  return m;
}

inline ComplexMatrix coin4d_matrix(Coin4D which) {
  ComplexMatrix m(4, 4);
  switch (which) {
    case Coin4D::hadamard: {
      const double h = 0.5;
      const double sgn[4][4] = {{1, 1, 1, 1}, {1, -1, 1, -1}, {1, 1, -1, -1}, {1, -1, -1, 1}};
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = h * sgn[i][j];
      break;
    }
    case Coin4D::grover: {
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = (i == j) ? -0.5 : 0.5;
      break;
    }
    case Coin4D::fourier: {
      const cplx w4[4] = {cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};  // powers of i
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = 0.5 * w4[(i * j) % 4];
      break;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// One-step evolution operator, applied as an action on StateVector.
// ---------------------------------------------------------------------------

class StepOperator {
 public:
  explicit StepOperator(WalkSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    if (!spec_.is_2d()) {
      up_shift_.resize(static_cast<std::size_t>(spec_.N));
      dn_shift_.resize(static_cast<std::size_t>(spec_.N));
      for (int n = 0; n < spec_.N; ++n) {
        up_shift_[static_cast<std::size_t>(n)] = (n + 1) % spec_.N;
        dn_shift_[static_cast<std::size_t>(n)] = (n - 1 + spec_.N) % spec_.N;
      }
    }
  }

  const WalkSpec& spec() const { return spec_; }

  void apply(StateVector& s) const {
    check(s);
    switch (spec_.variant) {
      case Variant::dtqw1d: step_dtqw1d(s, theta1_at(0, 0), true); break;
      case Variant::electric1d: step_electric(s); break;
      case Variant::ssqw1d: step_ssqw(s); break;
      case Variant::dtqw2d: step_2d(s); break;
      case Variant::coin4d2d: step_coin4d(s); break;
    }
  }

  StateVector applied(StateVector s) const {
    apply(s);
    return s;
  }

  // Explicit matrix of the one-step operator (column j = action on basis j).
  ComplexMatrix dense() const {
    const int d = spec_.dim();
    ComplexMatrix m(static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    StateVector basis = make_state(spec_);
    for (int j = 0; j < d; ++j) {
      std::fill(basis.amp.begin(), basis.amp.end(), cplx(0.0));
      basis.amp[static_cast<std::size_t>(j)] = 1.0;
      apply(basis);
      for (int i = 0; i < d; ++i) m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = basis.amp[static_cast<std::size_t>(i)];
    }
    return m;
  }

 private:
  WalkSpec spec_;
  std::vector<int> up_shift_, dn_shift_;

  void check(const StateVector& s) const {
    if (s.coin != spec_.coin_dim() || s.sites() != spec_.sites() ||
        (spec_.is_2d() ? (s.Nx != spec_.Nx || s.Ny != spec_.Ny) : (s.N != spec_.N)))
      throw std::invalid_argument("step operator: state does not match the walk lattice");
  }

  double theta1_at(int row, int /*unused*/) const {
    return spec_.theta1_map.empty() ? spec_.theta1 : spec_.theta1_map[static_cast<std::size_t>(row)];
  }
  double theta2_at(int row) const {
    return spec_.theta2_map.empty() ? spec_.theta2 : spec_.theta2_map[static_cast<std::size_t>(row)];
  }

  // --- 1D primitives -------------------------------------------------------

  void coin_mix_1d(StateVector& s, bool use_theta2) const {
    const int N = spec_.N;
    for (int n = 0; n < N; ++n) {
      const double th = use_theta2 ? theta2_at(n) : theta1_at(n, 0);
      const double c = std::cos(th / 2.0), sn = std::sin(th / 2.0);
      const cplx a = s.at1d(n, 0), b = s.at1d(n, 1);
      s.at1d(n, 0) = c * a - sn * b;
      s.at1d(n, 1) = sn * a + c * b;
    }
  }

  void full_shift_1d(StateVector& s) const {
    const int N = spec_.N;
    std::vector<cplx> up(static_cast<std::size_t>(N)), dn(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) {
      up[static_cast<std::size_t>(up_shift_[static_cast<std::size_t>(n)])] = s.at1d(n, 0);
      dn[static_cast<std::size_t>(dn_shift_[static_cast<std::size_t>(n)])] = s.at1d(n, 1);
    }
    for (int n = 0; n < N; ++n) {
      s.at1d(n, 0) = up[static_cast<std::size_t>(n)];
      s.at1d(n, 1) = dn[static_cast<std::size_t>(n)];
    }
  }

  void half_shift_up_1d(StateVector& s) const {  // up moves +1, down stays
    const int N = spec_.N;
    std::vector<cplx> up(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) up[static_cast<std::size_t>(up_shift_[static_cast<std::size_t>(n)])] = s.at1d(n, 0);
    for (int n = 0; n < N; ++n) s.at1d(n, 0) = up[static_cast<std::size_t>(n)];
  }

  void half_shift_dn_1d(StateVector& s) const {  // down moves -1, up stays
    const int N = spec_.N;
    std::vector<cplx> dn(static_cast<std::size_t>(N));
    for (int n = 0; n < N; ++n) dn[static_cast<std::size_t>(dn_shift_[static_cast<std::size_t>(n)])] = s.at1d(n, 1);
    for (int n = 0; n < N; ++n) s.at1d(n, 1) = dn[static_cast<std::size_t>(n)];
  }

  void coin_scale_1d(StateVector& s, cplx up, cplx dn) const {
    const int N = spec_.N;
    for (int n = 0; n < N; ++n) {
      s.at1d(n, 0) *= up;
      s.at1d(n, 1) *= dn;
    }
  }

  void step_dtqw1d(StateVector& s, double theta, bool uniform) const {
    if (uniform && spec_.theta1_map.empty()) {
      const double c = std::cos(theta / 2.0), sn = std::sin(theta / 2.0);
      for (int n = 0; n < spec_.N; ++n) {
        const cplx a = s.at1d(n, 0), b = s.at1d(n, 1);
        s.at1d(n, 0) = c * a - sn * b;
        s.at1d(n, 1) = sn * a + c * b;
      }
    } else {
      coin_mix_1d(s, false);
    }
    full_shift_1d(s);
  }

  void step_electric(StateVector& s) const {
    step_dtqw1d(s, spec_.theta1, true);
    for (int n = 0; n < spec_.N; ++n) {
      const cplx ph = std::polar(1.0, spec_.phi * double(n));
      s.at1d(n, 0) *= ph;
      s.at1d(n, 1) *= ph;
    }
  }

  void step_ssqw(StateVector& s) const {
    const double g = spec_.gamma, ph = spec_.phi;
    const cplx eg = std::exp(cplx(g, 0.0)), egi = std::exp(cplx(-g, 0.0));
    const cplx pp = std::polar(1.0, ph), pm = std::polar(1.0, -ph);
    coin_mix_1d(s, false);                       // R(theta1)
    if (ph != 0.0) coin_scale_1d(s, pp, pm);     // phase operator
    if (g != 0.0) coin_scale_1d(s, egi, eg);     // inverse gain/loss
    half_shift_up_1d(s);                         // up-conditional shift
    coin_mix_1d(s, true);                        // R(theta2)
    if (ph != 0.0) coin_scale_1d(s, pp, pm);
    if (g != 0.0) coin_scale_1d(s, eg, egi);     // gain/loss
    half_shift_dn_1d(s);                         // down-conditional shift
  }

  // --- 2D primitives (coin dimension 2) ------------------------------------

  void coin_mix_2d(StateVector& s, bool use_theta2) const {
    for (int y = 0; y < spec_.Ny; ++y) {
      const double th = use_theta2 ? theta2_at(y) : theta1_at(y, 0);
      const double c = std::cos(th / 2.0), sn = std::sin(th / 2.0);
      for (int x = 0; x < spec_.Nx; ++x) {
        const cplx a = s.at2d(x, y, 0), b = s.at2d(x, y, 1);
        s.at2d(x, y, 0) = c * a - sn * b;
        s.at2d(x, y, 1) = sn * a + c * b;
      }
    }
  }

  void shift_x_2d(StateVector& s) const {  // up: x+1, down: x-1
    const int Nx = spec_.Nx;
    std::vector<cplx> up(static_cast<std::size_t>(Nx)), dn(static_cast<std::size_t>(Nx));
    for (int y = 0; y < spec_.Ny; ++y) {
      for (int x = 0; x < Nx; ++x) {
        up[static_cast<std::size_t>((x + 1) % Nx)] = s.at2d(x, y, 0);
        dn[static_cast<std::size_t>((x - 1 + Nx) % Nx)] = s.at2d(x, y, 1);
      }
      for (int x = 0; x < Nx; ++x) {
        s.at2d(x, y, 0) = up[static_cast<std::size_t>(x)];
        s.at2d(x, y, 1) = dn[static_cast<std::size_t>(x)];
      }
    }
  }

  void shift_y_2d(StateVector& s) const {  // up: y+1, down: y-1
    const int Ny = spec_.Ny;
    std::vector<cplx> up(static_cast<std::size_t>(Ny)), dn(static_cast<std::size_t>(Ny));
    for (int x = 0; x < spec_.Nx; ++x) {
      for (int y = 0; y < Ny; ++y) {
        up[static_cast<std::size_t>((y + 1) % Ny)] = s.at2d(x, y, 0);
        dn[static_cast<std::size_t>((y - 1 + Ny) % Ny)] = s.at2d(x, y, 1);
      }
      for (int y = 0; y < Ny; ++y) {
        s.at2d(x, y, 0) = up[static_cast<std::size_t>(y)];
        s.at2d(x, y, 1) = dn[static_cast<std::size_t>(y)];
      }
    }
  }

  void coin_scale_2d(StateVector& s, cplx up, cplx dn) const {
    for (std::size_t i = 0; i + 1 < s.amp.size(); i += 2) {
      s.amp[i] *= up;
      s.amp[i + 1] *= dn;
    }
  }

  void step_2d(StateVector& s) const {
    const cplx egx = std::exp(cplx(spec_.gamma_x, 0.0)), egxi = std::exp(cplx(-spec_.gamma_x, 0.0));
    const cplx egy = std::exp(cplx(spec_.gamma_y, 0.0)), egyi = std::exp(cplx(-spec_.gamma_y, 0.0));
    shift_x_2d(s);
    if (spec_.gamma_x != 0.0) coin_scale_2d(s, egxi, egx);
    coin_mix_2d(s, false);                       // R(theta1)
    shift_x_2d(s);
    if (spec_.gamma_x != 0.0) coin_scale_2d(s, egx, egxi);
    coin_mix_2d(s, true);                        // R(theta2)
    shift_y_2d(s);
    if (spec_.gamma_y != 0.0) coin_scale_2d(s, egyi, egy);
    coin_mix_2d(s, false);                       // R(theta1)
    shift_y_2d(s);
    if (spec_.gamma_y != 0.0) coin_scale_2d(s, egy, egyi);
  }

  // --- 2D walk with a four-component coin ----------------------------------

  void step_coin4d(StateVector& s) const {
    const ComplexMatrix C = coin4d_matrix(spec_.coin4d);
    const int Nx = spec_.Nx, Ny = spec_.Ny;
    for (int y = 0; y < Ny; ++y)
      for (int x = 0; x < Nx; ++x) {
        cplx v[4];
        for (int c = 0; c < 4; ++c) v[c] = s.at2d(x, y, c);
        for (int c = 0; c < 4; ++c) {
          cplx acc = 0.0;
          for (int c2 = 0; c2 < 4; ++c2) acc += C(static_cast<std::size_t>(c), static_cast<std::size_t>(c2)) * v[c2];
          s.at2d(x, y, c) = acc;
        }
      }
    // Coin basis |jk>: j=0 moves x+1, j=1 moves x-1; k=0 moves y+1, k=1 moves y-1.
    std::vector<cplx> out(s.amp.size());
    for (int y = 0; y < Ny; ++y)
      for (int x = 0; x < Nx; ++x)
        for (int c = 0; c < 4; ++c) {
          const int dx = (c & 2) ? -1 : 1;
          const int dy = (c & 1) ? -1 : 1;
          const int x2 = (x + dx + Nx) % Nx, y2 = (y + dy + Ny) % Ny;
          out[static_cast<std::size_t>(((y2 * Nx) + x2) * 4 + c)] = s.at2d(x, y, c);
        }
    s.amp.swap(out);
  }
};

inline StepOperator build_step(const WalkSpec& spec) { return StepOperator(spec); }

// ---------------------------------------------------------------------------
// Real-space evolution.
// ---------------------------------------------------------------------------

struct EvolveOptions {
  bool record_distributions = false;  // keep the per-step site distribution
};

struct EvolveResult {
  StateVector state;                       // raw (unrenormalized) final amplitudes
  std::vector<double> P;                   // P(t) = total squared norm, t = 0..steps
  std::vector<double> site_prob;           // normalized final distribution
  std::vector<std::vector<double>> site_prob_steps;  // filled when requested
};

inline EvolveResult evolve(const WalkSpec& spec, StateVector state, int steps,
                           const EvolveOptions& opt = {}) {
  if (steps < 0) throw std::invalid_argument("evolve: step count must be >= 0");
  StepOperator op(spec);
  EvolveResult res;
  res.P.reserve(static_cast<std::size_t>(steps) + 1);
  res.P.push_back(state.norm2());
  if (opt.record_distributions) res.site_prob_steps.push_back(site_probabilities(state));
  for (int t = 0; t < steps; ++t) {
    op.apply(state);
    res.P.push_back(state.norm2());
    if (opt.record_distributions) res.site_prob_steps.push_back(site_probabilities(state));
  }
  res.site_prob = site_probabilities(state);
  res.state = std::move(state);
  return res;
}

// Variance of a site distribution; coordinates default to the site index
// (translation invariant, so centering is irrelevant).
inline double variance(const std::vector<double>& prob, const std::vector<double>& coord) {
  if (prob.empty()) throw std::invalid_argument("variance: empty distribution");
  if (coord.size() != prob.size()) throw std::invalid_argument("variance: coordinate count mismatch");
  double m1 = 0.0, m2 = 0.0;
  for (std::size_t i = 0; i < prob.size(); ++i) {
    m1 += coord[i] * prob[i];
    m2 += coord[i] * coord[i] * prob[i];
  }
  return m2 - m1 * m1;
}

inline double variance(const std::vector<double>& prob) {
  std::vector<double> coord(prob.size());
  for (std::size_t i = 0; i < coord.size(); ++i) coord[i] = static_cast<double>(i);
  return variance(prob, coord);
}

// ---------------------------------------------------------------------------
// Momentum-space blocks. The walk is translation invariant when the coin
// angles are uniform; each momentum k then evolves by a small coin-space
// matrix. Conventions: psi~(k) = N^{-1/2} sum_n e^{+ikn} psi_n, so the
// up-conditional shift multiplies the up component by e^{+ik}.
// ---------------------------------------------------------------------------

namespace detail {

inline ComplexMatrix diag2(cplx a, cplx b) {
  ComplexMatrix m(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

inline ComplexMatrix inv2(const ComplexMatrix& m) {
  const cplx det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  if (std::abs(det) < 1e-300) throw std::runtime_error("singular 2x2 block");
  ComplexMatrix r(2, 2);
  r(0, 0) = m(1, 1) / det;
  r(0, 1) = -m(0, 1) / det;
  r(1, 0) = -m(1, 0) / det;
  r(1, 1) = m(0, 0) / det;
  return r;
}

}  // namespace detail

inline void require_homogeneous(const WalkSpec& spec, const char* what) {
  if (!spec.homogeneous())
    throw std::invalid_argument(std::string(what) + ": requires uniform coin angles");
}

// 2x2 momentum block for the 1D walks (and for electric1d only when phi = 0,
// since a nonzero tilt breaks translation invariance).
inline ComplexMatrix kblock_1d(const WalkSpec& spec, double k) {
  require_homogeneous(spec, "kblock_1d");
  const cplx eik = std::polar(1.0, k), emik = std::polar(1.0, -k);
  switch (spec.variant) {
    case Variant::electric1d:
      if (spec.phi != 0.0)
        throw std::invalid_argument("kblock_1d: electric walk with phi != 0 is not translation invariant");
      [[fallthrough]];
    case Variant::dtqw1d:
      return detail::diag2(eik, emik) * rot2(spec.theta1);
    case Variant::ssqw1d: {
      const cplx eg = std::exp(cplx(spec.gamma, 0.0)), egi = std::exp(cplx(-spec.gamma, 0.0));
      const cplx pp = std::polar(1.0, spec.phi), pm = std::polar(1.0, -spec.phi);
      ComplexMatrix m = detail::diag2(1.0, emik);           // down-conditional shift
      m = m * detail::diag2(eg * pp, egi * pm);             // gain/loss and phase
      m = m * rot2(spec.theta2);
      m = m * detail::diag2(eik, 1.0);                      // up-conditional shift
      m = m * detail::diag2(egi * pp, eg * pm);             // inverse gain/loss and phase
      m = m * rot2(spec.theta1);
      return m;
    }
    default:
      throw std::invalid_argument("kblock_1d: not a 1D walk");
  }
}

// 2x2 momentum block of the two-dimensional walk.
inline ComplexMatrix kblock_2d(const WalkSpec& spec, double kx, double ky) {
  require_homogeneous(spec, "kblock_2d");
  if (spec.variant != Variant::dtqw2d) throw std::invalid_argument("kblock_2d: not the 2D two-component walk");
  const ComplexMatrix Tx = detail::diag2(std::polar(1.0, kx), std::polar(1.0, -kx));
  const ComplexMatrix Ty = detail::diag2(std::polar(1.0, ky), std::polar(1.0, -ky));
  const ComplexMatrix Gx = detail::diag2(std::exp(cplx(spec.gamma_x, 0.0)), std::exp(cplx(-spec.gamma_x, 0.0)));
  const ComplexMatrix Gxi = detail::diag2(std::exp(cplx(-spec.gamma_x, 0.0)), std::exp(cplx(spec.gamma_x, 0.0)));
  const ComplexMatrix Gy = detail::diag2(std::exp(cplx(spec.gamma_y, 0.0)), std::exp(cplx(-spec.gamma_y, 0.0)));
  const ComplexMatrix Gyi = detail::diag2(std::exp(cplx(-spec.gamma_y, 0.0)), std::exp(cplx(spec.gamma_y, 0.0)));
  const ComplexMatrix R1 = rot2(spec.theta1), R2 = rot2(spec.theta2);
  return Gy * Ty * R1 * Gyi * Ty * R2 * Gx * Tx * R1 * Gxi * Tx;
}

// 4x4 momentum block of the four-component-coin walk.
inline ComplexMatrix kblock_coin4d(const WalkSpec& spec, double kx, double ky) {
  require_homogeneous(spec, "kblock_coin4d");
  if (spec.variant != Variant::coin4d2d) throw std::invalid_argument("kblock_coin4d: wrong variant");
  ComplexMatrix S(4, 4);
  for (int c = 0; c < 4; ++c) {
    const double dx = (c & 2) ? -1.0 : 1.0;
    const double dy = (c & 1) ? -1.0 : 1.0;
    S(static_cast<std::size_t>(c), static_cast<std::size_t>(c)) = std::polar(1.0, dx * kx + dy * ky);
  }
  return S * coin4d_matrix(spec.coin4d);
}

// ---------------------------------------------------------------------------
// Band structure from closed forms, cross-checked against the numeric blocks.
// ---------------------------------------------------------------------------

struct BandGrid {
  int dim = 1;
  std::vector<double> k;            // 1D samples
  std::vector<double> kx, ky;       // 2D axes; flattened index = ix*ky.size() + iy
  std::vector<cplx> E;
  std::vector<cplx> nx, ny, nz;
  std::vector<std::array<cplx, 2>> eigvals;   // per sample, sorted by (Re, Im)
  std::vector<ComplexMatrix> eigvecs;         // per sample, columns match eigvals

  std::size_t samples() const { return E.size(); }
};

namespace detail {

struct ClosedForm {
  cplx cosE, nxs, nys, nzs;  // n components premultiplied by sin E
};

inline ClosedForm closed_form_1d(double theta, double k) {
  const double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
  ClosedForm f;
  f.cosE = c * std::cos(k);
  f.nxs = s * std::sin(k);
  f.nys = s * std::cos(k);
  f.nzs = -c * std::sin(k);
  return f;
}

inline ClosedForm closed_form_ssqw(double t1, double t2, double g, double k) {
  const double c1 = std::cos(t1 / 2.0), s1 = std::sin(t1 / 2.0);
  const double c2 = std::cos(t2 / 2.0), s2 = std::sin(t2 / 2.0);
  const double ch = std::cosh(2.0 * g), sh = std::sinh(2.0 * g);
  const cplx i(0.0, 1.0);
  ClosedForm f;
  f.cosE = c1 * c2 * std::cos(k) - s1 * s2 * ch;
  f.nxs = s1 * c2 * std::sin(k) - i * c1 * s2 * sh;
  f.nys = s1 * c2 * std::cos(k) + c1 * s2 * ch;
  f.nzs = -c1 * c2 * std::sin(k) - i * s1 * s2 * sh;
  return f;
}

inline ClosedForm closed_form_2d(double t1, double t2, double gx, double gy, double kx, double ky) {
  const cplx i(0.0, 1.0);
  const cplx a = kx + ky - i * gx + i * gy;
  const cplx b = kx + ky + i * gx - i * gy;
  const cplx d = kx - ky - i * gx - i * gy;
  const cplx e = kx - ky + i * gx + i * gy;
  const double ct1 = std::cos(t1), st1 = std::sin(t1);
  const double c2 = std::cos(t2 / 2.0), s2 = std::sin(t2 / 2.0);
  ClosedForm f;
  f.cosE = ct1 * c2 * std::cos(a) * std::cos(b) - c2 * std::sin(a) * std::sin(b) -
           st1 * s2 * std::cos(d) * std::cos(b);
  f.nxs = -st1 * c2 * std::cos(a) * std::sin(e) - ct1 * s2 * std::cos(d) * std::sin(e) -
          s2 * std::sin(d) * std::cos(e);
  f.nys = st1 * c2 * std::cos(a) * std::cos(e) + ct1 * s2 * std::cos(d) * std::cos(e) -
          s2 * std::sin(d) * std::sin(e);
  f.nzs = -ct1 * c2 * std::cos(a) * std::sin(b) - c2 * std::sin(a) * std::cos(b) +
          st1 * s2 * std::cos(d) * std::sin(b);
  return f;
}

inline void fill_sample(BandGrid& grid, std::size_t slot, const ClosedForm& f, const ComplexMatrix& block) {
  // Principal arccos: real branch in [0, pi] for real arguments in [-1, 1],
  // complex continuation otherwise.
  const cplx E = std::acos(f.cosE);
  grid.E[slot] = E;
  const cplx sE = std::sin(E);
  grid.nx[slot] = f.nxs / sE;
  grid.ny[slot] = f.nys / sE;
  grid.nz[slot] = f.nzs / sE;
  const numkit::EigenResult eig = numkit::eig_dense(block);
  grid.eigvals[slot] = {eig.values[0], eig.values[1]};
  grid.eigvecs[slot] = eig.vectors;
}

template <typename Fn>
inline void run_indexed(std::size_t count, unsigned workers, Fn&& body) {
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  const unsigned nthreads = std::min<unsigned>(workers, static_cast<unsigned>(count));
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (unsigned t = 0; t < nthreads; ++t)
    pool.emplace_back([&, t]() {
      for (std::size_t i = t; i < count; i += nthreads) body(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace detail

// Momentum grid of quasi-energies, Bloch vectors, and numeric eigenpairs.
// 1D walks sample k in [-pi, pi); the 2D walk samples [-pi/2, pi/2)^2, the
// Brillouin zone of its doubled effective lattice. Assembly order is fixed by
// the sample index, so the result is identical for any worker count.
inline BandGrid band_grid(const WalkSpec& spec, int kcount, unsigned workers = 1) {
  require_homogeneous(spec, "band_grid");
  if (kcount < 2) throw std::invalid_argument("band_grid: need at least two samples");
  BandGrid grid;
  const double pi = std::acos(-1.0);
  if (spec.variant == Variant::dtqw1d || spec.variant == Variant::ssqw1d ||
      spec.variant == Variant::electric1d) {
    grid.dim = 1;
    grid.k.resize(static_cast<std::size_t>(kcount));
    grid.E.resize(grid.k.size());
    grid.nx.resize(grid.k.size());
    grid.ny.resize(grid.k.size());
    grid.nz.resize(grid.k.size());
    grid.eigvals.resize(grid.k.size());
    grid.eigvecs.resize(grid.k.size());
    for (int j = 0; j < kcount; ++j) grid.k[static_cast<std::size_t>(j)] = -pi + 2.0 * pi * double(j) / double(kcount);
    detail::run_indexed(grid.k.size(), workers, [&](std::size_t j) {
      const double k = grid.k[j];
      const detail::ClosedForm f = (spec.variant == Variant::ssqw1d)
                                       ? detail::closed_form_ssqw(spec.theta1, spec.theta2, spec.gamma, k)
                                       : detail::closed_form_1d(spec.theta1, k);
      detail::fill_sample(grid, j, f, kblock_1d(spec, k));
    });
    return grid;
  }
  if (spec.variant == Variant::dtqw2d) {
    grid.dim = 2;
    grid.kx.resize(static_cast<std::size_t>(kcount));
    grid.ky.resize(static_cast<std::size_t>(kcount));
    for (int j = 0; j < kcount; ++j) {
      const double v = -pi / 2.0 + pi * double(j) / double(kcount);
      grid.kx[static_cast<std::size_t>(j)] = v;
      grid.ky[static_cast<std::size_t>(j)] = v;
    }
    const std::size_t M = grid.kx.size();
    grid.E.resize(M * M);
    grid.nx.resize(M * M);
    grid.ny.resize(M * M);
    grid.nz.resize(M * M);
    grid.eigvals.resize(M * M);
    grid.eigvecs.resize(M * M);
    detail::run_indexed(M * M, workers, [&](std::size_t idx) {
      const double kx = grid.kx[idx / M], ky = grid.ky[idx % M];
      const detail::ClosedForm f =
          detail::closed_form_2d(spec.theta1, spec.theta2, spec.gamma_x, spec.gamma_y, kx, ky);
      detail::fill_sample(grid, idx, f, kblock_2d(spec, kx, ky));
    });
    return grid;
  }
  throw std::invalid_argument("band_grid: no two-band closed form for this variant");
}

// ---------------------------------------------------------------------------
// Critical gain/loss strength of the split-step walk: the band touching at
// (k, E) = (0, 0) gives gamma_c = acosh[(c1 c2 - 1)/(s1 s2)] / 2. A ratio
// below one has no real solution and is flagged complex.
// ---------------------------------------------------------------------------

struct GammaCritical {
  cplx value;
  bool is_complex = false;
};

inline GammaCritical gamma_critical(double theta1, double theta2) {
  const double s1 = std::sin(theta1 / 2.0), s2 = std::sin(theta2 / 2.0);
  const double denom = s1 * s2;
  if (std::abs(denom) < 1e-14)
    throw std::invalid_argument("gamma_critical: sin(theta1/2) sin(theta2/2) vanishes");
  const double arg = (std::cos(theta1 / 2.0) * std::cos(theta2 / 2.0) - 1.0) / denom;
  GammaCritical out;
  if (arg >= 1.0) {
    out.value = 0.5 * std::acosh(arg);
    out.is_complex = false;
  } else {
    out.value = 0.5 * std::acosh(cplx(arg, 0.0));
    out.is_complex = true;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Antiunitary symmetry test: sigma_z U~*(k) sigma_z == U~(k)^{-1} at every
// sampled momentum. The 1D blocks are conjugated into the coin-symmetrized
// (time-symmetric) frame R(theta1/2) U~ R(theta1/2)^{-1}, where the relation
// holds exactly for every gain/loss strength; the 2D walk is tested in the
// raw frame and fails it, as expected, for any nonzero scaling.
// ---------------------------------------------------------------------------

struct PtResult {
  bool symmetric = false;
  double max_violation = 0.0;
};

inline PtResult pt_check(const WalkSpec& spec, int kcount) {
  require_homogeneous(spec, "pt_check");
  if (kcount < 2) throw std::invalid_argument("pt_check: need at least two samples");
  const double pi = std::acos(-1.0);
  PtResult res;
  auto violation = [](const ComplexMatrix& u) {
    const ComplexMatrix inv = detail::inv2(u);
    ComplexMatrix lhs(2, 2);
    // sigma_z U* sigma_z flips the sign of the off-diagonal entries.
    lhs(0, 0) = std::conj(u(0, 0));
    lhs(0, 1) = -std::conj(u(0, 1));
    lhs(1, 0) = -std::conj(u(1, 0));
    lhs(1, 1) = std::conj(u(1, 1));
    double m = 0.0;
    for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(lhs.a[i] - inv.a[i]));
    return m;
  };
  if (spec.variant == Variant::dtqw2d) {
    for (int ix = 0; ix < kcount; ++ix)
      for (int iy = 0; iy < kcount; ++iy) {
        const double kx = -pi / 2.0 + pi * double(ix) / double(kcount);
        const double ky = -pi / 2.0 + pi * double(iy) / double(kcount);
        res.max_violation = std::max(res.max_violation, violation(kblock_2d(spec, kx, ky)));
      }
  } else if (spec.variant == Variant::dtqw1d || spec.variant == Variant::ssqw1d ||
             spec.variant == Variant::electric1d) {
    const ComplexMatrix F = rot2(spec.theta1 / 2.0);
    const ComplexMatrix Fi = rot2(-spec.theta1 / 2.0);
    for (int j = 0; j < kcount; ++j) {
      const double k = -pi + 2.0 * pi * double(j) / double(kcount);
      const ComplexMatrix u = F * kblock_1d(spec, k) * Fi;
      res.max_violation = std::max(res.max_violation, violation(u));
    }
  } else {
    throw std::invalid_argument("pt_check: unsupported variant");
  }
  res.symmetric = res.max_violation < 1e-10;
  return res;
}

// ---------------------------------------------------------------------------
// Momentum-vs-real-space consistency: Fourier transform the state, advance
// each mode with the momentum block, transform back, and compare against the
// stencil evolution amplitude by amplitude.
// ---------------------------------------------------------------------------

inline double momentum_real_consistency(const WalkSpec& spec, const StateVector& state0, int steps) {
  require_homogeneous(spec, "momentum_real_consistency");
  if (steps < 0) throw std::invalid_argument("momentum_real_consistency: step count must be >= 0");
  if (spec.variant == Variant::electric1d && spec.phi != 0.0)
    throw std::invalid_argument("momentum_real_consistency: electric walk is not translation invariant");

  StateVector real_sp = state0;
  StepOperator op(spec);
  for (int t = 0; t < steps; ++t) op.apply(real_sp);

  const double pi = std::acos(-1.0);
  StateVector mom = state0;  // reused as output buffer
  if (!spec.is_2d()) {
    const int N = spec.N;
    std::vector<std::array<cplx, 2>> modes(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
      const double k = 2.0 * pi * double(j) / double(N);
      std::array<cplx, 2> acc{cplx(0.0), cplx(0.0)};
      for (int n = 0; n < N; ++n) {
        const cplx ph = std::polar(1.0, k * double(n));
        acc[0] += ph * state0.at1d(n, 0);
        acc[1] += ph * state0.at1d(n, 1);
      }
      const ComplexMatrix u = kblock_1d(spec, k);
      for (int t = 0; t < steps; ++t) {
        const cplx a = u(0, 0) * acc[0] + u(0, 1) * acc[1];
        const cplx b = u(1, 0) * acc[0] + u(1, 1) * acc[1];
        acc = {a, b};
      }
      modes[static_cast<std::size_t>(j)] = acc;
    }
    for (int n = 0; n < N; ++n) {
      std::array<cplx, 2> acc{cplx(0.0), cplx(0.0)};
      for (int j = 0; j < N; ++j) {
        const double k = 2.0 * pi * double(j) / double(N);
        const cplx ph = std::polar(1.0, -k * double(n));
        acc[0] += ph * modes[static_cast<std::size_t>(j)][0];
        acc[1] += ph * modes[static_cast<std::size_t>(j)][1];
      }
      mom.at1d(n, 0) = acc[0] / double(N);
      mom.at1d(n, 1) = acc[1] / double(N);
    }
  } else {
    const int Nx = spec.Nx, Ny = spec.Ny, cd = spec.coin_dim();
    std::vector<cplx> modes(static_cast<std::size_t>(Nx * Ny * cd));
    for (int jx = 0; jx < Nx; ++jx)
      for (int jy = 0; jy < Ny; ++jy) {
        const double kx = 2.0 * pi * double(jx) / double(Nx);
        const double ky = 2.0 * pi * double(jy) / double(Ny);
        std::vector<cplx> acc(static_cast<std::size_t>(cd), cplx(0.0));
        for (int x = 0; x < Nx; ++x)
          for (int y = 0; y < Ny; ++y) {
            const cplx ph = std::polar(1.0, kx * double(x) + ky * double(y));
            for (int c = 0; c < cd; ++c) acc[static_cast<std::size_t>(c)] += ph * state0.at2d(x, y, c);
          }
        const ComplexMatrix u = (cd == 2) ? kblock_2d(spec, kx, ky) : kblock_coin4d(spec, kx, ky);
        for (int t = 0; t < steps; ++t) acc = u.apply(acc);
        for (int c = 0; c < cd; ++c)
          modes[static_cast<std::size_t>(((jy * Nx) + jx) * cd + c)] = acc[static_cast<std::size_t>(c)];
      }
    const double inv = 1.0 / double(Nx * Ny);
    for (int x = 0; x < Nx; ++x)
      for (int y = 0; y < Ny; ++y) {
        std::vector<cplx> acc(static_cast<std::size_t>(cd), cplx(0.0));
        for (int jx = 0; jx < Nx; ++jx)
          for (int jy = 0; jy < Ny; ++jy) {
            const double kx = 2.0 * pi * double(jx) / double(Nx);
            const double ky = 2.0 * pi * double(jy) / double(Ny);
            const cplx ph = std::polar(1.0, -(kx * double(x) + ky * double(y)));
            for (int c = 0; c < cd; ++c)
              acc[static_cast<std::size_t>(c)] += ph * modes[static_cast<std::size_t>(((jy * Nx) + jx) * cd + c)];
          }
        for (int c = 0; c < cd; ++c) mom.at2d(x, y, c) = acc[static_cast<std::size_t>(c)] * inv;
      }
  }

  double dev = 0.0;
  for (std::size_t i = 0; i < mom.amp.size(); ++i) dev = std::max(dev, std::abs(mom.amp[i] - real_sp.amp[i]));
  return dev;
}

// ---------------------------------------------------------------------------
// Norm-trajectory classifier. Fits the last half of P(t) to constant, linear,
// and exponential models; a more complex model wins only when its RMS
// residual beats the simpler one by at least 5%. Degenerate fits (non-finite
// residuals, too few samples, non-positive P for the log fit with everything
// else inconclusive) yield "indeterminate".
// ---------------------------------------------------------------------------

inline NormRegime classify_norm_regime(const std::vector<double>& P) {
  if (P.size() < 8) return NormRegime::indeterminate;
  const std::size_t start = P.size() / 2;
  const std::size_t m = P.size() - start;
  double mean = 0.0;
  for (std::size_t i = start; i < P.size(); ++i) mean += P[i];
  mean /= double(m);

  double r_const = 0.0;
  for (std::size_t i = start; i < P.size(); ++i) r_const += (P[i] - mean) * (P[i] - mean);
  r_const = std::sqrt(r_const / double(m));

  auto fit_line = [&](bool log_space, double& rms) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = start; i < P.size(); ++i) {
      const double x = double(i);
      const double y = log_space ? std::log(P[i]) : P[i];
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = double(m);
    const double det = n * sxx - sx * sx;
    const double b = (n * sxy - sx * sy) / det;
    const double a = (sy - b * sx) / n;
    double acc = 0.0;
    for (std::size_t i = start; i < P.size(); ++i) {
      const double fit = log_space ? std::exp(a + b * double(i)) : a + b * double(i);
      acc += (P[i] - fit) * (P[i] - fit);
    }
    rms = std::sqrt(acc / n);
  };

  double r_lin = std::numeric_limits<double>::infinity();
  fit_line(false, r_lin);

  double r_exp = std::numeric_limits<double>::infinity();
  bool positive = true;
  for (std::size_t i = start; i < P.size(); ++i)
    if (!(P[i] > 0.0)) positive = false;
  if (positive) fit_line(true, r_exp);

  if (!std::isfinite(r_const) || !std::isfinite(r_lin)) return NormRegime::indeterminate;
  if (std::isfinite(r_exp) && r_exp < 0.95 * std::min(r_lin, r_const)) return NormRegime::exponential;
  if (r_lin < 0.95 * r_const) return NormRegime::linear;
  return NormRegime::constant;
}

// ---------------------------------------------------------------------------
// CSV export.
// ---------------------------------------------------------------------------

inline void write_band_csv(std::ostream& os, const BandGrid& grid, int precision = 15) {
  os.precision(precision);
  if (grid.dim == 1) {
    os << "k,re_E,im_E,re_nx,im_nx,re_ny,im_ny,re_nz,im_nz\n";
    for (std::size_t j = 0; j < grid.samples(); ++j) {
      os << grid.k[j] << ',' << grid.E[j].real() << ',' << grid.E[j].imag() << ',' << grid.nx[j].real()
         << ',' << grid.nx[j].imag() << ',' << grid.ny[j].real() << ',' << grid.ny[j].imag() << ','
         << grid.nz[j].real() << ',' << grid.nz[j].imag() << '\n';
    }
  } else {
    os << "kx,ky,re_E,im_E,re_nx,im_nx,re_ny,im_ny,re_nz,im_nz\n";
    const std::size_t M = grid.ky.size();
    for (std::size_t idx = 0; idx < grid.samples(); ++idx) {
      os << grid.kx[idx / M] << ',' << grid.ky[idx % M] << ',' << grid.E[idx].real() << ','
         << grid.E[idx].imag() << ',' << grid.nx[idx].real() << ',' << grid.nx[idx].imag() << ','
         << grid.ny[idx].real() << ',' << grid.ny[idx].imag() << ',' << grid.nz[idx].real() << ','
         << grid.nz[idx].imag() << '\n';
    }
  }
}

inline void write_evolution_csv(std::ostream& os, const EvolveResult& res, int precision = 15) {
  os.precision(precision);
  const bool with_dist = !res.site_prob_steps.empty();
  os << "t,P";
  if (with_dist)
    for (std::size_t n = 0; n < res.site_prob_steps.front().size(); ++n) os << ",site" << n;
  os << '\n';
  for (std::size_t t = 0; t < res.P.size(); ++t) {
    os << t << ',' << res.P[t];
    if (with_dist)
      for (double v : res.site_prob_steps[t]) os << ',' << v;
    os << '\n';
  }
}

}  // namespace qwgp::walks
