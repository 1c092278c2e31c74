#pragma once

// Dissipative dynamics and geometric phase of a two-level emitter carried on
// a circular orbit inside a single-mode resonator. The resonator enters
// through a Lorentzian density of field states; the orbit enters through
// first-order corrections (in the squared tangential-velocity ratio) to the
// emission and absorption rates. The module exposes the rate coefficients of
// the master equation, the exact geometric-phase integral for the resulting
// spiral of the Bloch vector, closed forms valid over many quasi-cycles, and
// the split of the phase into unitary, inertial, and orbit-induced parts.

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qwgp {
namespace cavity {

// SI constants; all interface quantities are SI (rad/s, m, m^3).
inline constexpr double speed_of_light = 299792458.0;           // m/s
inline constexpr double reduced_planck = 1.054571817e-34;       // J s
inline constexpr double vacuum_permittivity = 8.8541878128e-12; // F/m

namespace detail {

inline double pi() { return 3.141592653589793238462643383279502884; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Parameters.
// ---------------------------------------------------------------------------

struct CavityParams {
  double Omega0 = 0.0;   // emitter level gap (rad/s)
  double omega = 0.0;    // orbital angular frequency (rad/s)
  double R = 0.0;        // orbit radius (m)
  double V = 0.0;        // quantization volume (m^3)
  double omega_c = 0.0;  // resonator normal frequency (rad/s)
  double Q = 0.0;        // resonator quality factor
  double eta = 0.0;      // coupling |d|^2 / (3 pi hbar eps0 V)  (rad^2/s)
  double theta = 0.0;    // polar angle of the initial Bloch vector (rad)
  double n = 0.0;        // quasi-cycle count for phase accumulation

  // Squared ratio of the tangential velocity at frequency `freq` to c.
  double zeta(double freq) const {
    const double x = freq * R / speed_of_light;
    return x * x;
  }
  double zeta_rot() const { return zeta(omega); }

  // Level gap corrected for time dilation on the orbit.
  double gap_dressed() const { return Omega0 * std::sqrt(1.0 - zeta_rot()); }
  double omega_plus() const { return omega + gap_dressed(); }
  double omega_minus() const { return omega - gap_dressed(); }

  void validate() const {
    if (!(Omega0 > 0.0)) throw std::invalid_argument("CavityParams: Omega0 must be positive");
    if (!(omega >= 0.0)) throw std::invalid_argument("CavityParams: omega must be non-negative");
    if (!(R >= 0.0)) throw std::invalid_argument("CavityParams: R must be non-negative");
    if (!(V > 0.0)) throw std::invalid_argument("CavityParams: V must be positive");
    if (!(omega_c > 0.0)) throw std::invalid_argument("CavityParams: omega_c must be positive");
    if (!(Q > 1.0)) throw std::invalid_argument("CavityParams: Q must exceed 1");
    if (!(eta >= 0.0)) throw std::invalid_argument("CavityParams: eta must be non-negative");
    if (!(n >= 0.0)) throw std::invalid_argument("CavityParams: n must be non-negative");
    if (!std::isfinite(theta)) throw std::invalid_argument("CavityParams: theta must be finite");
    if (!(zeta_rot() < 0.1))
      throw std::invalid_argument(
          "CavityParams: omega^2 R^2 / c^2 must stay below 0.1 for the first-order treatment");
  }
};

// Coupling strength from a dipole matrix element (C m) and volume (m^3).
inline double eta_from_dipole(double dipole, double volume) {
  if (!(volume > 0.0)) throw std::invalid_argument("eta_from_dipole: volume must be positive");
  if (!(dipole >= 0.0)) throw std::invalid_argument("eta_from_dipole: dipole must be non-negative");
  return dipole * dipole / (3.0 * detail::pi() * reduced_planck * vacuum_permittivity * volume);
}

// ---------------------------------------------------------------------------
// Resonator density of states.
// ---------------------------------------------------------------------------

// Lorentzian mode density, normalized so the on-resonance value is Q/omega_c
// (half width omega_c/Q at half that value).
inline double lorentzian_dos(double omega_k, double omega_c, double Q) {
  if (!(Q > 0.0)) throw std::invalid_argument("lorentzian_dos: Q must be positive");
  if (!(omega_c > 0.0)) throw std::invalid_argument("lorentzian_dos: omega_c must be positive");
  if (!(omega_k >= 0.0)) throw std::invalid_argument("lorentzian_dos: omega_k must be non-negative");
  const double g = omega_c / Q;
  const double d = omega_k - omega_c;
  return g / (g * g + d * d);
}

// Frequency derivative of lorentzian_dos at omega_k.
inline double lorentzian_dos_derivative(double omega_k, double omega_c, double Q) {
  if (!(Q > 0.0)) throw std::invalid_argument("lorentzian_dos_derivative: Q must be positive");
  if (!(omega_c > 0.0)) throw std::invalid_argument("lorentzian_dos_derivative: omega_c must be positive");
  if (!(omega_k >= 0.0))
    throw std::invalid_argument("lorentzian_dos_derivative: omega_k must be non-negative");
  const double g = omega_c / Q;
  const double d = omega_k - omega_c;
  const double den = g * g + d * d;
  return -2.0 * g * d / (den * den);
}

// ---------------------------------------------------------------------------
// Master-equation coefficients.
// ---------------------------------------------------------------------------

// Rate coefficients with the orbit-independent ("inertial") and the
// orbit-induced parts kept separately. Everything proportional to the squared
// velocity ratio counts as orbit-induced.
struct LindbladAB {
  double A = 0.0;           // (Gamma_down + Gamma_up) / 4   (rad/s)
  double B = 0.0;           // (Gamma_down - Gamma_up) / 4   (rad/s)
  double Gamma_down = 0.0;  // emission rate (rad/s)
  double Gamma_up = 0.0;    // absorption rate (rad/s)

  double A_inertial = 0.0;
  double A_noninertial = 0.0;
  double B_inertial = 0.0;
  double B_noninertial = 0.0;
  double Gamma_down_inertial = 0.0;
  double Gamma_down_noninertial = 0.0;
  double Gamma_up_inertial = 0.0;
  double Gamma_up_noninertial = 0.0;
};

// Fast-orbit regime: orbital frequency at least ten times the dressed gap.
// The emission/absorption sidebands sit at omega +- dressed gap.
inline LindbladAB rates_high(const CavityParams& p) {
  p.validate();
  const double gap = p.gap_dressed();
  if (!(p.omega / gap > 10.0))
    throw std::invalid_argument("rates_high: requires omega > 10x the dressed gap");

  const double zr = p.zeta_rot();
  const double wp = p.omega_plus();
  const double wm = p.omega_minus();
  const double rho0 = lorentzian_dos(p.Omega0, p.omega_c, p.Q);
  const double drho0 = lorentzian_dos_derivative(p.Omega0, p.omega_c, p.Q);
  const double base_inertial = rho0 * p.Omega0;
  const double base_derivative = -0.5 * zr * p.Omega0 * p.Omega0 * drho0;
  const double side_plus = wp * lorentzian_dos(wp, p.omega_c, p.Q);
  const double side_minus = wm * lorentzian_dos(wm, p.omega_c, p.Q);
  const double curly = 0.45 * zr;  // 9/20 of the squared velocity ratio

  LindbladAB r;
  r.A_inertial = 0.25 * p.eta * base_inertial;
  r.B_inertial = r.A_inertial;
  r.A_noninertial = 0.25 * p.eta * (base_derivative + curly * (side_plus + side_minus));
  r.B_noninertial = 0.25 * p.eta * (base_derivative + curly * (side_plus - side_minus));
  r.A = r.A_inertial + r.A_noninertial;
  r.B = r.B_inertial + r.B_noninertial;

  r.Gamma_down_inertial = 2.0 * (r.A_inertial + r.B_inertial);
  r.Gamma_down_noninertial = 2.0 * (r.A_noninertial + r.B_noninertial);
  r.Gamma_down = r.Gamma_down_inertial + r.Gamma_down_noninertial;
  // Stable form of 2(A - B): the absorption rate is purely orbit-induced.
  r.Gamma_up_inertial = 0.0;
  r.Gamma_up_noninertial = p.eta * curly * side_minus;
  r.Gamma_up = r.Gamma_up_noninertial;

  if (r.Gamma_down < 0.0 || r.Gamma_up < 0.0)
    throw std::runtime_error("rates_high: first-order rates went negative; parameters leave the valid domain");
  return r;
}

// Slow-orbit regime: orbital frequency at most a tenth of the dressed gap.
// Sidebands sit at dressed gap +- omega; absorption vanishes at first order.
inline LindbladAB rates_low(const CavityParams& p) {
  p.validate();
  const double gap = p.gap_dressed();
  if (!(p.omega / gap < 0.1))
    throw std::invalid_argument("rates_low: requires omega < 0.1x the dressed gap");

  const double zr = p.zeta_rot();
  const double gp = gap + p.omega;
  const double gm = gap - p.omega;
  const double rho0 = lorentzian_dos(p.Omega0, p.omega_c, p.Q);
  const double drho0 = lorentzian_dos_derivative(p.Omega0, p.omega_c, p.Q);
  const double sp = gp * lorentzian_dos(gp, p.omega_c, p.Q);
  const double sm = gm * lorentzian_dos(gm, p.omega_c, p.Q);

  LindbladAB r;
  r.Gamma_down_inertial = p.eta * rho0 * p.Omega0;
  r.Gamma_down_noninertial =
      p.eta * (-0.5 * zr * p.Omega0 * p.Omega0 * drho0 + 0.25 * zr * (sp + sm) -
               0.4 * (p.zeta(p.Omega0) * rho0 * p.Omega0 - 0.5 * (p.zeta(gp) * sp + p.zeta(gm) * sm)));
  r.Gamma_down = r.Gamma_down_inertial + r.Gamma_down_noninertial;
  r.Gamma_up_inertial = 0.0;
  r.Gamma_up_noninertial = 0.0;
  r.Gamma_up = 0.0;

  r.A_inertial = 0.25 * r.Gamma_down_inertial;
  r.B_inertial = r.A_inertial;
  r.A_noninertial = 0.25 * r.Gamma_down_noninertial;
  r.B_noninertial = r.A_noninertial;
  r.A = 0.25 * r.Gamma_down;
  r.B = r.A;

  if (r.Gamma_down < 0.0)
    throw std::runtime_error("rates_low: first-order rate went negative; parameters leave the valid domain");
  return r;
}

// Dispatch on the frequency ratio; refuses between the two regimes.
inline LindbladAB rates_auto(const CavityParams& p) {
  p.validate();
  const double ratio = p.omega / p.gap_dressed();
  if (ratio > 10.0) return rates_high(p);
  if (ratio < 0.1) return rates_low(p);
  throw std::invalid_argument(
      "rates_auto: omega/dressed-gap ratio " + std::to_string(ratio) +
      " sits between the fast-orbit (>10) and slow-orbit (<0.1) regimes");
}

// ---------------------------------------------------------------------------
// Geometric phase.
// ---------------------------------------------------------------------------

namespace detail {

// Deviation of the phase integrand from its dissipation-free limit:
//   f(tau) = cos(theta) - N / sqrt(X sin^2(theta) + N^2),
// with X = e^{4 A tau} and N = ratio (1 - X) + cos(theta). Written with
// expm1 so the small-dissipation limit keeps full relative accuracy.
struct GpIntegrand {
  double fourA;
  double ratio;
  double cos_theta;
  double sin2_theta;

  double operator()(double tau) const {
    const double em = std::expm1(fourA * tau);
    const double num = cos_theta - ratio * em;
    const double den = std::sqrt((1.0 + em) * sin2_theta + num * num);
    return cos_theta - num / den;
  }
};

// Composite Simpson rule with panel doubling and Richardson extrapolation.
// Throws when the integrand goes non-finite or the refinement stalls.
inline double integrate_gp(const GpIntegrand& f, double T) {
  const double fa = f(0.0);
  const double fb = f(T);
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw std::runtime_error("gp_exact: quadrature failed (non-finite integrand)");

  long panels = 64;
  double ends = fa + fb;
  double sum_odd = 0.0;   // nodes introduced at the current level
  double sum_even = 0.0;  // interior nodes kept from coarser levels
  for (long j = 1; j < panels; ++j) {
    const double v = f(T * double(j) / double(panels));
    if (!std::isfinite(v)) throw std::runtime_error("gp_exact: quadrature failed (non-finite integrand)");
    if (j % 2 == 1)
      sum_odd += v;
    else
      sum_even += v;
  }
  double h = T / double(panels);
  double prev = h / 3.0 * (ends + 4.0 * sum_odd + 2.0 * sum_even);

  for (int level = 0; level < 16; ++level) {
    panels *= 2;
    sum_even += sum_odd;
    sum_odd = 0.0;
    for (long j = 1; j < panels; j += 2) {
      const double v = f(T * double(j) / double(panels));
      if (!std::isfinite(v)) throw std::runtime_error("gp_exact: quadrature failed (non-finite integrand)");
      sum_odd += v;
    }
    h = T / double(panels);
    const double cur = h / 3.0 * (ends + 4.0 * sum_odd + 2.0 * sum_even);
    const double diff = std::abs(cur - prev);
    if (diff <= 5e-13 * std::abs(cur) + 1e-280) return cur + (cur - prev) / 15.0;
    prev = cur;
  }
  throw std::runtime_error("gp_exact: quadrature failed to converge");
}

inline void check_gp_inputs(double A, double B, double Omega, double theta, double T) {
  if (!(A >= 0.0)) throw std::invalid_argument("gp_exact: A must be non-negative");
  if (A == 0.0 && B != 0.0)
    throw std::invalid_argument("gp_exact: B must vanish when A does (no dissipation to carry it)");
  if (!std::isfinite(B) || !std::isfinite(Omega) || !std::isfinite(theta) || !std::isfinite(T))
    throw std::invalid_argument("gp_exact: inputs must be finite");
  if (!(T >= 0.0)) throw std::invalid_argument("gp_exact: T must be non-negative");
}

}  // namespace detail

// Departure of the phase from the dissipation-free solid-angle value,
// accumulated over [0, T]:  -(Omega/2) * int_0^T f(tau) dtau.
inline double gp_exact_nonunitary(double A, double B, double Omega, double theta, double T) {
  detail::check_gp_inputs(A, B, Omega, theta, T);
  if (A == 0.0 || T == 0.0) return 0.0;
  detail::GpIntegrand f;
  f.fourA = 4.0 * A;
  f.ratio = B / A;
  f.cos_theta = std::cos(theta);
  const double s = std::sin(theta);
  f.sin2_theta = s * s;
  if (f.sin2_theta == 0.0 && f.cos_theta > 0.0) return 0.0;  // integrand vanishes identically
  return -0.5 * Omega * detail::integrate_gp(f, T);
}

// Total phase over [0, T]: the solid-angle part -(Omega/2) T (1 - cos theta)
// plus the dissipative departure. Valid for any T.
inline double gp_exact(double A, double B, double Omega, double theta, double T) {
  detail::check_gp_inputs(A, B, Omega, theta, T);
  const double unitary = -0.5 * Omega * T * (1.0 - std::cos(theta));
  return unitary + gp_exact_nonunitary(A, B, Omega, theta, T);
}

namespace detail {

inline void check_cycle_validity(double A, double Omega0, double n) {
  const double T = 2.0 * pi() * n / Omega0;
  if (4.0 * A * T > 0.1)
    throw std::invalid_argument(
        "quasi-cycle phase: 4*A*T = " + std::to_string(4.0 * A * T) +
        " exceeds 0.1; the slow-dissipation closed form does not apply (use gp_exact)");
}

}  // namespace detail

// Closed form over n quasi-cycles of period 2 pi / Omega0, valid while the
// accumulated dissipation stays small (4 A T <= 0.1):
//   -pi n (1 - cos theta) - (2 pi^2 n^2 / Omega0)(2B + A cos theta) sin^2 theta.
inline double gp_quasicycle_approx(double A, double B, double Omega0, double theta, double n) {
  if (!(A >= 0.0)) throw std::invalid_argument("gp_quasicycle_approx: A must be non-negative");
  if (!(Omega0 > 0.0)) throw std::invalid_argument("gp_quasicycle_approx: Omega0 must be positive");
  if (!(n >= 0.0)) throw std::invalid_argument("gp_quasicycle_approx: n must be non-negative");
  detail::check_cycle_validity(A, Omega0, n);
  const double pi = detail::pi();
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  return -pi * n * (1.0 - ct) - (2.0 * pi * pi * n * n / Omega0) * (2.0 * B + A * ct) * st * st;
}

// Phase over n quasi-cycles split into the solid-angle part, the part driven
// by the orbit-independent rates, and the part driven by the orbit-induced
// rates.
struct GpSplit {
  double unitary = 0.0;
  double inertial = 0.0;
  double noninertial = 0.0;

  double nonunitary() const { return inertial + noninertial; }
  double total() const { return unitary + inertial + noninertial; }
};

inline GpSplit gp_regimes(const CavityParams& p) {
  const LindbladAB r = rates_auto(p);
  detail::check_cycle_validity(r.A, p.Omega0, p.n);
  const double pi = detail::pi();
  const double ct = std::cos(p.theta);
  const double st = std::sin(p.theta);
  const double scale = -(2.0 * pi * pi * p.n * p.n / p.Omega0) * st * st;
  GpSplit out;
  out.unitary = -pi * p.n * (1.0 - ct);
  out.inertial = scale * (2.0 * r.B_inertial + r.A_inertial * ct);
  out.noninertial = scale * (2.0 * r.B_noninertial + r.A_noninertial * ct);
  return out;
}

// ---------------------------------------------------------------------------
// Sweep export.
// ---------------------------------------------------------------------------

struct CavitySweepRow {
  double omega_c = 0.0;
  double Gamma_down = 0.0;
  double Gamma_up = 0.0;
  double A = 0.0;
  double B = 0.0;
  double phi_inertial = 0.0;
  double phi_noninertial = 0.0;
  double n = 0.0;
};

// Evaluate rates and phase split for each resonator frequency in turn.
inline std::vector<CavitySweepRow> cavity_sweep(const CavityParams& base,
                                                const std::vector<double>& omega_c_values) {
  std::vector<CavitySweepRow> rows;
  rows.reserve(omega_c_values.size());
  for (double wc : omega_c_values) {
    CavityParams p = base;
    p.omega_c = wc;
    const LindbladAB r = rates_auto(p);
    const GpSplit gp = gp_regimes(p);
    CavitySweepRow row;
    row.omega_c = wc;
    row.Gamma_down = r.Gamma_down;
    row.Gamma_up = r.Gamma_up;
    row.A = r.A;
    row.B = r.B;
    row.phi_inertial = gp.inertial;
    row.phi_noninertial = gp.noninertial;
    row.n = p.n;
    rows.push_back(row);
  }
  return rows;
}

inline void write_cavity_csv(std::ostream& os, const std::vector<CavitySweepRow>& rows) {
  os << "omega_c,Gamma_down,Gamma_up,A,B,phi_inertial,phi_noninertial,n\n";
  os << std::setprecision(15);
  for (const CavitySweepRow& r : rows) {
    os << r.omega_c << ',' << r.Gamma_down << ',' << r.Gamma_up << ',' << r.A << ',' << r.B << ','
       << r.phi_inertial << ',' << r.phi_noninertial << ',' << r.n << '\n';
  }
}

}  // namespace cavity
}  // namespace qwgp
