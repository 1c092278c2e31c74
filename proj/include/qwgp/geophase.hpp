#pragma once

// Geometric-phase functionals for pure curves, discrete state chains, mixed
// states under unitary or dissipative evolution, the two-level Uhlmann
// holonomy, and weak-measurement readout of phases.
//
// Conventions used throughout:
//  * inner products are antilinear in the first argument;
//  * every reported arg uses the principal branch (-pi, pi];
//  * discrete derivatives are centered differences (one-sided at ends) and
//    integrals are trapezoidal in the supplied parameter.

#include "qwgp/numkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace qwgp::geophase {

using numkit::cplx;
using numkit::ComplexMatrix;
using State = std::vector<cplx>;

namespace detail {

inline constexpr double pi = 3.141592653589793238462643383279502884;

inline cplx overlap(const State& a, const State& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("geophase: state dimension mismatch");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

inline double norm2(const State& a) {
    double n = 0.0;
    for (const auto& v : a) n += std::norm(v);
    return n;
}

inline void require_unit(const State& a, const char* what) {
    if (std::abs(norm2(a) - 1.0) > 1e-9)
        throw std::invalid_argument(std::string("geophase: ") + what +
                                    " must be normalized");
}

// Wrap into the principal interval (-pi, pi].
inline double wrap_principal(double x) {
    x = std::remainder(x, 2.0 * pi);  // (-pi, pi] up to the -pi edge
    if (x <= -pi) x += 2.0 * pi;
    return x;
}

// Centered-difference derivative of a sampled path; one-sided at the ends.
inline std::vector<State> path_derivative(const std::vector<State>& psi,
                                          const std::vector<double>& s) {
    const std::size_t n = psi.size();
    std::vector<State> d(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t lo = (i == 0) ? 0 : i - 1;
        std::size_t hi = (i + 1 == n) ? i : i + 1;
        double h = s[hi] - s[lo];
        State g(psi[i].size());
        for (std::size_t j = 0; j < g.size(); ++j)
            g[j] = (psi[hi][j] - psi[lo][j]) / h;
        d[i] = g;
    }
    return d;
}

// Trapezoidal integral of the tangent overlap <psi|dpsi> along the path.
inline cplx connection_integral(const std::vector<State>& psi,
                                const std::vector<double>& s) {
    auto d = path_derivative(psi, s);
    cplx total = 0.0;
    for (std::size_t i = 0; i + 1 < psi.size(); ++i) {
        cplx f0 = overlap(psi[i], d[i]);
        cplx f1 = overlap(psi[i + 1], d[i + 1]);
        total += 0.5 * (f0 + f1) * (s[i + 1] - s[i]);
    }
    return total;
}

struct QubitEigenSystem {
    std::array<double, 2> p;   // descending eigenvalues
    std::array<State, 2> phi;  // matching unit eigenvectors
};

// Analytic eigensystem of a 2x2 density matrix via its Bloch vector.
inline QubitEigenSystem qubit_eigensystem(const ComplexMatrix& rho) {
    if (rho.rows != 2 || rho.cols != 2)
        throw std::invalid_argument("geophase: density matrix must be 2x2");
    double herm = std::abs(rho(0, 1) - std::conj(rho(1, 0))) +
                  std::abs(rho(0, 0).imag()) + std::abs(rho(1, 1).imag());
    if (herm > 1e-9)
        throw std::invalid_argument("geophase: density matrix must be Hermitian");
    if (std::abs(rho(0, 0).real() + rho(1, 1).real() - 1.0) > 1e-9)
        throw std::invalid_argument("geophase: density matrix must have unit trace");
    double rx = 2.0 * rho(0, 1).real();
    double ry = -2.0 * rho(0, 1).imag();
    double rz = rho(0, 0).real() - rho(1, 1).real();
    double r = std::sqrt(rx * rx + ry * ry + rz * rz);
    if (r > 1.0 + 1e-9)
        throw std::invalid_argument("geophase: density matrix is not positive");
    QubitEigenSystem es;
    es.p = {0.5 * (1.0 + r), 0.5 * (1.0 - r)};
    if (r < 1e-14) {
        es.phi = {State{cplx(1.0, 0.0), cplx(0.0, 0.0)},
                  State{cplx(0.0, 0.0), cplx(1.0, 0.0)}};
        return es;
    }
    double theta = std::acos(std::clamp(rz / r, -1.0, 1.0));
    double phi = std::atan2(ry, rx);
    cplx eip = std::exp(cplx(0.0, phi));
    double c = std::cos(theta / 2.0), s = std::sin(theta / 2.0);
    es.phi = {State{cplx(c, 0.0), eip * s},
              State{-std::conj(eip) * s, cplx(c, 0.0)}};
    return es;
}

}  // namespace detail

// A parametrized curve of normalized states.
struct PureCurve {
    std::vector<double> s;
    std::vector<State> states;

    void validate() const {
        if (s.size() != states.size() || s.size() < 2)
            throw std::invalid_argument("PureCurve: need matching s/state arrays "
                                        "with at least two samples");
        for (std::size_t i = 0; i + 1 < s.size(); ++i)
            if (!(s[i] < s[i + 1]))
                throw std::invalid_argument("PureCurve: parameter must be strictly "
                                            "increasing");
        for (const auto& st : states) detail::require_unit(st, "curve state");
        for (std::size_t i = 0; i + 1 < states.size(); ++i)
            if (std::abs(detail::overlap(states[i], states[i + 1])) < 1e-12)
                throw std::invalid_argument("PureCurve: consecutive states are "
                                            "orthogonal");
    }
};

struct SolidAngle {
    double value = 0.0;
    // Solid angle subtended by a cone of half-opening angle theta.
    static SolidAngle cone(double theta) {
        return SolidAngle{2.0 * detail::pi * (1.0 - std::cos(theta))};
    }
};

// Cyclic product of consecutive overlaps <s_1|s_2><s_2|s_3>...<s_n|s_1>.
inline cplx bargmann(const std::vector<State>& states) {
    if (states.size() < 2)
        throw std::invalid_argument("bargmann: need at least two states");
    for (const auto& st : states) detail::require_unit(st, "chain state");
    cplx prod = 1.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        cplx ov = detail::overlap(states[i], states[(i + 1) % states.size()]);
        if (std::abs(ov) < 1e-12)
            throw std::invalid_argument("bargmann: consecutive states are "
                                        "orthogonal, argument undefined");
        prod *= ov;
    }
    return prod;
}

// Discrete geometric phase of a state chain: minus the cyclic-product arg.
inline double gp_discrete(const std::vector<State>& states) {
    return detail::wrap_principal(-std::arg(bargmann(states)));
}

// Geometric phase of a sampled curve: total phase minus dynamical phase,
// arg<psi(s_1)|psi(s_N)> - Im Integral <psi|dpsi>.
inline double gp_curve(const PureCurve& curve) {
    curve.validate();
    cplx ends = detail::overlap(curve.states.front(), curve.states.back());
    if (std::abs(ends) < 1e-14)
        throw std::runtime_error("gp_curve: endpoint states are orthogonal, "
                                 "phase undefined");
    cplx integral = detail::connection_integral(curve.states, curve.s);
    return std::arg(ends) - integral.imag();
}

// Eigen-decomposed density trajectory with branch-continuous eigenvectors:
// branches are matched between samples by maximal overlap, and representative
// phases are adjusted only when needed so that every consecutive same-branch
// overlap has positive real part.
struct DensityTrajectory {
    std::vector<double> times;
    std::vector<ComplexMatrix> rho;
    std::vector<std::array<double, 2>> p;
    std::vector<std::array<State, 2>> phi;

    static DensityTrajectory build(const std::vector<double>& times,
                                   const std::vector<ComplexMatrix>& rhos) {
        if (times.size() != rhos.size() || times.size() < 2)
            throw std::invalid_argument("DensityTrajectory: need matching "
                                        "time/state arrays with >= 2 samples");
        for (std::size_t i = 0; i + 1 < times.size(); ++i)
            if (!(times[i] < times[i + 1]))
                throw std::invalid_argument("DensityTrajectory: time must be "
                                            "strictly increasing");
        DensityTrajectory tr;
        tr.times = times;
        tr.rho = rhos;
        tr.p.resize(times.size());
        tr.phi.resize(times.size());
        for (std::size_t i = 0; i < rhos.size(); ++i) {
            auto es = detail::qubit_eigensystem(rhos[i]);
            if (i > 0) {
                // Keep branch labels continuous: swap if the crossed pairing
                // overlaps the previous eigenvectors better.
                double keep = std::norm(detail::overlap(tr.phi[i - 1][0], es.phi[0])) +
                              std::norm(detail::overlap(tr.phi[i - 1][1], es.phi[1]));
                double cross = std::norm(detail::overlap(tr.phi[i - 1][0], es.phi[1])) +
                               std::norm(detail::overlap(tr.phi[i - 1][1], es.phi[0]));
                if (cross > keep) {
                    std::swap(es.phi[0], es.phi[1]);
                    std::swap(es.p[0], es.p[1]);
                }
                for (int k = 0; k < 2; ++k) {
                    cplx ov = detail::overlap(tr.phi[i - 1][k], es.phi[k]);
                    if (std::abs(ov) > 1e-14 && ov.real() <= 0.0) {
                        cplx fix = std::exp(cplx(0.0, -std::arg(ov)));
                        for (auto& v : es.phi[k]) v *= fix;
                    }
                }
            }
            tr.p[i] = es.p;
            tr.phi[i] = es.phi;
        }
        return tr;
    }
};

// Mixed-state geometric phase along a general (possibly dissipative)
// trajectory: arg of the weighted sum over spectral branches of
// sqrt(p_k(0) p_k(T)) <phi_k(0)|phi_k(T)> exp(-Integral <phi_k|dphi_k> dt).
// Branches with vanishing initial weight are dropped.
inline double gp_mixed_nonunitary(const DensityTrajectory& traj) {
    if (traj.times.size() < 2)
        throw std::invalid_argument("gp_mixed_nonunitary: need >= 2 samples");
    cplx sum = 0.0;
    for (int k = 0; k < 2; ++k) {
        double p0 = traj.p.front()[k];
        if (p0 <= 1e-12) continue;
        std::vector<State> branch;
        branch.reserve(traj.times.size());
        for (std::size_t i = 0; i < traj.times.size(); ++i)
            branch.push_back(traj.phi[i][k]);
        cplx integral = detail::connection_integral(branch, traj.times);
        double pT = std::max(traj.p.back()[k], 0.0);
        sum += std::sqrt(p0 * pT) *
               detail::overlap(branch.front(), branch.back()) *
               std::exp(-integral);
    }
    if (std::abs(sum) < 1e-14)
        throw std::runtime_error("gp_mixed_nonunitary: interference visibility "
                                 "vanishes, phase undefined");
    return std::arg(sum);
}

struct MixedUnitaryResult {
    double phase = 0.0;
    // Set when the state is too close to maximally mixed for the phase to be
    // defined; the phase is then reported as zero.
    bool rank_deficient = false;
};

// Mixed-state geometric phase of an initial density matrix carried through a
// sampled unitary path U(t), U(0) = 1:
// arg Sum_k w_k <k|U(T)|k> exp(-Integral <k|U^dag dU|k> dt).
inline MixedUnitaryResult gp_mixed_unitary(const ComplexMatrix& rho0,
                                           const std::vector<double>& times,
                                           const std::vector<ComplexMatrix>& upath) {
    if (times.size() != upath.size() || times.size() < 2)
        throw std::invalid_argument("gp_mixed_unitary: need matching time/"
                                    "unitary arrays with >= 2 samples");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i] < times[i + 1]))
            throw std::invalid_argument("gp_mixed_unitary: time must be "
                                        "strictly increasing");
    for (const auto& u : upath) {
        if (u.rows != 2 || u.cols != 2)
            throw std::invalid_argument("gp_mixed_unitary: unitaries must be 2x2");
        ComplexMatrix g = u.adjoint() * u;
        g(0, 0) -= 1.0;
        g(1, 1) -= 1.0;
        if (g.frobenius() > 1e-8)
            throw std::invalid_argument("gp_mixed_unitary: path operator is "
                                        "not unitary");
    }
    {
        ComplexMatrix d = upath.front();
        d(0, 0) -= 1.0;
        d(1, 1) -= 1.0;
        if (d.frobenius() > 1e-10)
            throw std::invalid_argument("gp_mixed_unitary: path must start at "
                                        "the identity");
    }
    auto es = detail::qubit_eigensystem(rho0);
    if (es.p[0] - es.p[1] < 1e-6) return {0.0, true};

    cplx sum = 0.0;
    for (int k = 0; k < 2; ++k) {
        if (es.p[k] <= 1e-12) continue;
        std::vector<State> path;
        path.reserve(times.size());
        for (const auto& u : upath) path.push_back(u.apply(es.phi[k]));
        cplx integral = detail::connection_integral(path, times);
        sum += es.p[k] * detail::overlap(es.phi[k], path.back()) *
               std::exp(-integral);
    }
    if (std::abs(sum) < 1e-14)
        throw std::runtime_error("gp_mixed_unitary: interference visibility "
                                 "vanishes, phase undefined");
    return {std::arg(sum), false};
}

struct UhlmannResult {
    double phase = 0.0;
    // Set when the closed form sits on a tangent pole and the reported value
    // is the finite continuation through it.
    bool pole_continued = false;
};

// Uhlmann holonomy phase of a two-level state of Bloch length r rotating
// about the unit axis (nx, 0, nz) by angle tau.  Evaluated from the
// tangent closed form with both numerator and denominator multiplied by
// cos(tau/2) cos(taut/2), which keeps the expression finite at the poles.
inline UhlmannResult uhlmann_phase_qubit(double r, double nx, double nz,
                                         double tau) {
    if (r < -1e-12 || r > 1.0 + 1e-12)
        throw std::invalid_argument("uhlmann_phase_qubit: r must lie in [0, 1]");
    if (std::abs(nx * nx + nz * nz - 1.0) > 1e-9)
        throw std::invalid_argument("uhlmann_phase_qubit: (nx, nz) must be a "
                                    "unit vector");
    if (r * std::abs(nx) >= 1.0 - 1e-12)
        throw std::invalid_argument("uhlmann_phase_qubit: r|nx| = 1 makes the "
                                    "holonomy parametrization degenerate");
    if (r < 1e-14) return {0.0, false};

    double q = std::sqrt(1.0 - r * r * nx * nx);
    double taut = tau * q;
    double nzt = nz / q;
    double nxt = std::sqrt(std::max(1.0 - r * r, 0.0)) * nx / q;
    double ch = std::cos(tau / 2.0), sh = std::sin(tau / 2.0);
    double cht = std::cos(taut / 2.0), sht = std::sin(taut / 2.0);
    double num = r * (nzt * sht * ch - nz * sh * cht);
    double den = ch * cht +
                 (nz * nzt + std::sqrt(std::max(1.0 - r * r, 0.0)) * nx * nxt) *
                     sh * sht;
    bool pole = std::abs(ch) < 1e-9 || std::abs(cht) < 1e-9;
    double phase;
    if (den == 0.0)
        phase = (num > 0.0) ? detail::pi / 2.0
                            : (num < 0.0 ? -detail::pi / 2.0 : 0.0);
    else
        phase = std::atan(num / den);
    return {phase, pole};
}

// Weak value <post|A|pre>/<post|pre>.
inline cplx weak_value(const State& pre, const State& post,
                       const ComplexMatrix& obs) {
    detail::require_unit(pre, "preselected state");
    detail::require_unit(post, "postselected state");
    if (obs.rows != obs.cols || obs.rows != pre.size() ||
        pre.size() != post.size())
        throw std::invalid_argument("weak_value: dimension mismatch");
    cplx ip = detail::overlap(post, pre);
    if (std::abs(ip) < 1e-14)
        throw std::invalid_argument("weak_value: pre- and postselected states "
                                    "are orthogonal, weak value undefined");
    return detail::overlap(post, obs.apply(pre)) / ip;
}

// Oriented solid angle of the spherical triangle spanned by three vectors,
// quadrant-correct: Omega = 2 atan2(r1.(r2 x r3), denom).  The argument of a
// projector weak value with preselection r1, postselection r2 and projector
// axis r3 equals +Omega/2 in this ordering.
inline double strackee_solid_angle(const std::array<double, 3>& r1,
                                   const std::array<double, 3>& r2,
                                   const std::array<double, 3>& r3) {
    auto dot3 = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    };
    double l1 = std::sqrt(dot3(r1, r1));
    double l2 = std::sqrt(dot3(r2, r2));
    double l3 = std::sqrt(dot3(r3, r3));
    double triple = r1[0] * (r2[1] * r3[2] - r2[2] * r3[1]) +
                    r1[1] * (r2[2] * r3[0] - r2[0] * r3[2]) +
                    r1[2] * (r2[0] * r3[1] - r2[1] * r3[0]);
    double den = l1 * l2 * l3 + dot3(r1, r2) * l3 + dot3(r1, r3) * l2 +
                 dot3(r2, r3) * l1;
    return 2.0 * std::atan2(triple, den);
}

// Phase recovered from Gaussian-pointer shifts dq (position) and dp
// (momentum) produced by a weak measurement with coupling that imprints
// dq = kappa sigma^2 Im(z) and dp = -hbar kappa Re(z): the quadrant-correct
// form of -arctan(hbar dq / (sigma^2 dp)), equal to arg z.
inline double gp_from_pointer(double dq, double dp, double sigma, double hbar) {
    if (!(sigma > 0.0) || !(hbar > 0.0))
        throw std::invalid_argument("gp_from_pointer: sigma and hbar must be "
                                    "positive");
    if (dq == 0.0 && dp == 0.0)
        throw std::invalid_argument("gp_from_pointer: both shifts vanish, "
                                    "phase undefined");
    return std::atan2(hbar * dq, -sigma * sigma * dp);
}

// Readout of a qubit pointer coupled along axis n, prepared along m, measured
// along q, to first order in the coupling kappa, for a system weak value z:
// <q.sigma> = q.m + 2 kappa [(q x n).m] Re z + 2 kappa [q.n - (n.m)(q.m)] Im z.
inline double pointer_qubit_expectation(const std::array<double, 3>& q,
                                        const std::array<double, 3>& m,
                                        const std::array<double, 3>& n,
                                        double kappa, cplx z) {
    auto dot3 = [](const std::array<double, 3>& a, const std::array<double, 3>& b) {
        return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    };
    std::array<double, 3> qxn{q[1] * n[2] - q[2] * n[1],
                              q[2] * n[0] - q[0] * n[2],
                              q[0] * n[1] - q[1] * n[0]};
    return dot3(q, m) + 2.0 * kappa * dot3(qxn, m) * z.real() +
           2.0 * kappa * (dot3(q, n) - dot3(n, m) * dot3(q, m)) * z.imag();
}

}  // namespace qwgp::geophase
