#pragma once

// Star-constellation geometry for finite-dimensional pure states.
//
// A d-level pure state is represented by d-1 points ("stars") on the unit
// sphere: the amplitudes, weighted by square-root factorial factors, form a
// degree d-1 polynomial whose roots are the stereographic images of the
// stars.  This module converts between the two pictures, builds shortest-arc
// interpolations, decomposes the interpolation between rotationally
// degenerate constellations into circular star trajectories, synthesizes
// zero-phase curves from mirror-symmetric star pairs, and tests curves for
// the positivity of all pairwise-triple overlaps.
//
// Conventions:
//  - A star is a two-level amplitude pair (a, b); its sphere position is the
//    expectation of the Pauli vector.  Stars at the south pole produced by a
//    vanishing leading amplitude are flagged `at_infinity` and stored as the
//    exact pair (0, 1).
//  - Root extraction is delegated to numkit::poly_roots; multiplicities are
//    expanded so a d-level state always carries exactly d-1 stars.
//  - All curves are sampled on strictly increasing parameter grids and reuse
//    geophase::PureCurve so phase functionals apply directly.

#include "qwgp/geophase.hpp"
#include "qwgp/numkit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qwgp {
namespace stargeo {

using numkit::cplx;
using numkit::ComplexMatrix;
using geophase::State;

struct StarSet {
    std::vector<State> stars;       // two-level amplitude pairs, unit norm
    std::vector<bool> at_infinity;  // true where the pair is exactly (0, 1)
};

struct BlochCurve {
    std::vector<double> s;                     // parameter grid
    std::vector<std::array<double, 3>> points; // unit sphere positions
};

struct GeodesicDecomposition {
    std::vector<BlochCurve> curves;                  // one trajectory per star branch
    std::vector<std::pair<int, int>> pairing;        // mirror partners (i <= j)
    std::vector<double> radii;                       // ring radius per branch
    std::vector<std::array<double, 3>> centers;      // ring center per branch
};

struct NpcCheckResult {
    bool is_npc = false;   // all sampled triple overlaps on the positive real axis
    double min_re = 0.0;   // smallest real part over sampled triples
    double max_abs_im = 0.0;
};

namespace detail {

inline double factorial(std::size_t k) {
    double f = 1.0;
    for (std::size_t i = 2; i <= k; ++i) f *= double(i);
    return f;
}

inline std::array<double, 3> bloch_point(const State& q) {
    cplx ab = std::conj(q[0]) * q[1];
    double n0 = std::norm(q[0]), n1 = std::norm(q[1]);
    double nn = n0 + n1;
    return {2.0 * ab.real() / nn, 2.0 * ab.imag() / nn, (n0 - n1) / nn};
}

inline std::array<double, 3> bloch_of_root(const cplx& x) {
    double n2 = std::norm(x);
    return {2.0 * x.real() / (1.0 + n2), 2.0 * x.imag() / (1.0 + n2),
            (1.0 - n2) / (1.0 + n2)};
}

inline double dist3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
    double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline State normalized(State v) {
    double n = 0.0;
    for (const auto& c : v) n += std::norm(c);
    n = std::sqrt(n);
    if (n < 1e-300) throw std::invalid_argument("normalized: zero vector");
    for (auto& c : v) c /= n;
    return v;
}

// Coefficients of the root polynomial, highest degree first.
inline std::vector<cplx> root_polynomial(const State& psi) {
    std::size_t m = psi.size() - 1;
    std::vector<cplx> f(m + 1);
    double sign = 1.0;
    for (std::size_t r = 0; r <= m; ++r) {
        f[r] = sign * psi[r] / std::sqrt(factorial(r) * factorial(m - r));
        sign = -sign;
    }
    return f;
}

// Best assignment of candidate points to reference points, minimizing the
// total pairing distance.  Exhaustive over permutations; branch counts here
// are at most a single digit.
inline std::vector<std::size_t> assign_points(
    const std::vector<std::array<double, 3>>& ref,
    const std::vector<std::array<double, 3>>& cand) {
    std::size_t m = ref.size();
    if (m > 9)
        throw std::invalid_argument("assign_points: too many branches for exhaustive matching");
    std::vector<std::size_t> perm(m), best(m);
    std::iota(perm.begin(), perm.end(), 0);
    best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < m && cost < best_cost; ++i)
            cost += dist3(ref[i], cand[perm[i]]);
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace detail

// Extract the star constellation of a state.  The amplitudes are mapped to
// the root polynomial; each finite root x becomes the pair (1, x) normalized,
// and each missing degree (vanishing leading amplitudes) becomes an exact
// (0, 1) pair flagged at_infinity.  Repeated roots are expanded per
// multiplicity, so the result always holds dim-1 stars.
inline StarSet state_to_stars(const State& psi) {
    if (psi.size() < 2)
        throw std::invalid_argument("state_to_stars: need at least two amplitudes");
    double n = 0.0;
    for (const auto& c : psi) n += std::norm(c);
    if (std::sqrt(n) < 1e-14)
        throw std::invalid_argument("state_to_stars: zero vector");
    State unit = detail::normalized(psi);
    numkit::RootSet rs = numkit::poly_roots(detail::root_polynomial(unit));
    StarSet out;
    for (std::size_t k = 0; k < rs.at_infinity; ++k) {
        out.stars.push_back(State{cplx(0.0, 0.0), cplx(1.0, 0.0)});
        out.at_infinity.push_back(true);
    }
    for (const cplx& x : rs.flat()) {
        double scale = std::sqrt(1.0 + std::norm(x));
        out.stars.push_back(State{cplx(1.0, 0.0) / scale, x / scale});
        out.at_infinity.push_back(false);
    }
    return out;
}

// Rebuild the state from a constellation (left inverse of state_to_stars up
// to global phase).  The product of first-order factors is expanded into
// sector coefficients and weighted back by the square-root factorial factors.
inline State stars_to_state(const StarSet& ss) {
    if (ss.stars.empty())
        throw std::invalid_argument("stars_to_state: empty constellation");
    std::vector<cplx> g{cplx(1.0, 0.0)};
    for (const auto& star : ss.stars) {
        if (star.size() != 2)
            throw std::invalid_argument("stars_to_state: star must be a two-level state");
        double n = std::sqrt(std::norm(star[0]) + std::norm(star[1]));
        if (n < 1e-14)
            throw std::invalid_argument("stars_to_state: zero star");
        cplx a = star[0] / n, b = star[1] / n;
        std::vector<cplx> h(g.size() + 1, cplx(0.0, 0.0));
        for (std::size_t r = 0; r < g.size(); ++r) {
            h[r] += a * g[r];
            h[r + 1] += b * g[r];
        }
        g = std::move(h);
    }
    std::size_t m = ss.stars.size();
    State c(m + 1);
    for (std::size_t r = 0; r <= m; ++r)
        c[r] = g[r] * std::sqrt(detail::factorial(r) * detail::factorial(m - r));
    return detail::normalized(c);
}

// Shortest-arc interpolation between two unit states.  The second endpoint's
// global phase is arranged internally so the mutual overlap is real positive;
// the parameter is the arc angle, so the grid spans [0, acos|<a|b>|].
// Identical endpoints (zero arc) yield a constant curve over [0, 1].
inline geophase::PureCurve geodesic(const State& a, const State& b,
                                    std::size_t samples) {
    if (samples < 2) throw std::invalid_argument("geodesic: need at least 2 samples");
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("geodesic: dimension mismatch");
    geophase::detail::require_unit(a, "geodesic endpoint");
    geophase::detail::require_unit(b, "geodesic endpoint");
    cplx ov = geophase::detail::overlap(a, b);
    double mag = std::abs(ov);
    if (mag < 1e-12)
        throw std::invalid_argument("geodesic: endpoints are orthogonal");
    State b2 = b;
    cplx ph = ov / mag;
    for (auto& v : b2) v /= ph;
    double xi = std::min(mag, 1.0);
    double theta = std::acos(xi);

    geophase::PureCurve curve;
    curve.s.resize(samples);
    curve.states.resize(samples);
    if (theta < 1e-12) {
        for (std::size_t i = 0; i < samples; ++i) {
            curve.s[i] = double(i) / double(samples - 1);
            curve.states[i] = a;
        }
        return curve;
    }
    double sth = std::sqrt(1.0 - xi * xi);
    State perp(a.size());
    for (std::size_t j = 0; j < a.size(); ++j) perp[j] = (b2[j] - xi * a[j]) / sth;
    for (std::size_t i = 0; i < samples; ++i) {
        double s = theta * double(i) / double(samples - 1);
        curve.s[i] = s;
        State st(a.size());
        double cs = std::cos(s), sn = std::sin(s);
        for (std::size_t j = 0; j < a.size(); ++j) st[j] = cs * a[j] + sn * perp[j];
        curve.states[i] = detail::normalized(st);
    }
    return curve;
}

// Unitary taking a nonorthogonal pair (overlap real positive) to canonical
// position: the first state to the top basis vector and the second to the
// rotationally degenerate profile (alpha^2, sqrt(2) alpha beta, beta^2) with
// alpha = sqrt(overlap).  Built as a basis change onto {a, unit complement of
// b, orthogonal completion} followed by a real rotation in the lower block.
inline ComplexMatrix degenerate_mapping_unitary(const State& a, const State& b) {
    if (a.size() != 3 || b.size() != 3)
        throw std::invalid_argument("degenerate_mapping_unitary: three-level states required");
    geophase::detail::require_unit(a, "mapping input");
    geophase::detail::require_unit(b, "mapping input");
    cplx ov = geophase::detail::overlap(a, b);
    if (std::abs(ov.imag()) > 1e-9 || ov.real() <= 1e-12)
        throw std::invalid_argument(
            "degenerate_mapping_unitary: overlap must be real positive");
    double cth = std::min(ov.real(), 1.0);
    double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
    double alpha = std::sqrt(cth);
    double beta = std::sqrt(1.0 - cth);

    State row0 = a;
    State row1(3), row2(3);
    if (sth < 1e-12) {
        // Identical endpoints: any orthonormal completion works.
        row1 = State{cplx(0, 0), cplx(1, 0), cplx(0, 0)};
        cplx p = geophase::detail::overlap(row0, row1);
        for (std::size_t j = 0; j < 3; ++j) row1[j] -= p * row0[j];
        row1 = detail::normalized(row1);
    } else {
        for (std::size_t j = 0; j < 3; ++j) row1[j] = (b[j] - cth * a[j]) / sth;
    }
    // Orthogonal completion: start from the basis vector with the largest
    // residual after projecting off the first two rows.
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t j = 0; j < 3; ++j) {
        double res = 1.0 - std::norm(row0[j]) - std::norm(row1[j]);
        if (res > best) { best = res; arg = j; }
    }
    for (std::size_t j = 0; j < 3; ++j) row2[j] = (j == arg) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
    cplx p0 = geophase::detail::overlap(row0, row2);
    cplx p1 = geophase::detail::overlap(row1, row2);
    for (std::size_t j = 0; j < 3; ++j) row2[j] -= p0 * row0[j] + p1 * row1[j];
    row2 = detail::normalized(row2);

    ComplexMatrix u1(3, 3);
    for (std::size_t j = 0; j < 3; ++j) {
        u1(0, j) = std::conj(row0[j]);
        u1(1, j) = std::conj(row1[j]);
        u1(2, j) = std::conj(row2[j]);
    }
    double aa = std::sqrt(2.0) * alpha / std::sqrt(1.0 + alpha * alpha);
    double bb = beta / std::sqrt(1.0 + alpha * alpha);
    ComplexMatrix u2 = ComplexMatrix::identity(3);
    u2(1, 1) = aa;
    u2(1, 2) = -bb;
    u2(2, 1) = bb;
    u2(2, 2) = aa;
    return u2 * u1;
}

// Decompose the shortest arc between canonical rotationally degenerate
// constellations into one sphere trajectory per star branch.  Requires the
// first endpoint to be the top basis vector and the second the profile
// sqrt(binom(m,r)) alpha^(m-r) beta^r with real alpha determined by the
// overlap.  The roots of every interior sample are extracted numerically and
// labeled against the closed-form branch prediction; a mismatch beyond
// tolerance is reported as a tracking discontinuity.  Every branch runs on a
// circle; the mirror pairing through the y=0 plane and the per-branch ring
// radius and center are measured from the extracted points.
inline GeodesicDecomposition geodesic_decompose(const State& a, const State& b,
                                                std::size_t samples) {
    if (samples < 5)
        throw std::invalid_argument("geodesic_decompose: need at least 5 samples");
    if (a.size() != b.size() || a.size() < 2)
        throw std::invalid_argument("geodesic_decompose: dimension mismatch");
    geophase::detail::require_unit(a, "decompose endpoint");
    geophase::detail::require_unit(b, "decompose endpoint");
    std::size_t dim = a.size(), m = dim - 1;

    for (std::size_t j = 1; j < dim; ++j)
        if (std::abs(a[j]) > 1e-9)
            throw std::invalid_argument(
                "geodesic_decompose: first endpoint must be the top basis vector");
    if (std::abs(a[0] - cplx(1.0, 0.0)) > 1e-9)
        throw std::invalid_argument(
            "geodesic_decompose: first endpoint must be the top basis vector");

    cplx ov = geophase::detail::overlap(a, b);
    if (std::abs(ov.imag()) > 1e-9 || ov.real() <= 1e-12 || ov.real() > 1.0 + 1e-12)
        throw std::invalid_argument("geodesic_decompose: overlap must be real in (0, 1]");
    double xi = std::min(ov.real(), 1.0);
    double alpha = std::pow(xi, 1.0 / double(m));
    double beta = std::sqrt(std::max(0.0, 1.0 - alpha * alpha));
    // Validate the degenerate profile of the far endpoint.
    {
        double binom = 1.0;
        for (std::size_t r = 0; r <= m; ++r) {
            double want = std::sqrt(binom) * std::pow(alpha, double(m - r)) *
                          std::pow(beta, double(r));
            if (std::abs(b[r] - cplx(want, 0.0)) > 1e-8)
                throw std::invalid_argument(
                    "geodesic_decompose: far endpoint is not a degenerate profile");
            binom = binom * double(m - r) / double(r + 1);
        }
    }
    double theta = std::acos(std::clamp(xi, -1.0, 1.0));

    GeodesicDecomposition dec;
    dec.curves.assign(m, BlochCurve{});
    std::vector<double> grid(samples);
    for (std::size_t i = 0; i < samples; ++i)
        grid[i] = theta * double(i) / double(samples - 1);
    for (std::size_t k = 0; k < m; ++k) {
        dec.curves[k].s = grid;
        dec.curves[k].points.resize(samples);
    }

    std::array<double, 3> north{0.0, 0.0, 1.0};
    std::array<double, 3> far_star{2.0 * alpha * beta, 0.0,
                                   alpha * alpha - beta * beta};
    if (theta < 1e-12) {
        for (std::size_t k = 0; k < m; ++k)
            for (std::size_t i = 0; i < samples; ++i) dec.curves[k].points[i] = north;
    } else {
        cplx delta = (m % 2 == 0) ? std::exp(cplx(0.0, M_PI / double(m)))
                                  : cplx(1.0, 0.0);
        std::vector<cplx> branch(m);
        for (std::size_t k = 0; k < m; ++k)
            branch[k] = delta * std::exp(cplx(0.0, 2.0 * M_PI * double(k) / double(m)));

        double sth = std::sqrt(1.0 - xi * xi);
        for (std::size_t i = 0; i < samples; ++i) {
            double s = grid[i];
            if (i == 0) {
                for (std::size_t k = 0; k < m; ++k) dec.curves[k].points[i] = north;
                continue;
            }
            if (i + 1 == samples) {
                for (std::size_t k = 0; k < m; ++k) dec.curves[k].points[i] = far_star;
                continue;
            }
            State st(dim);
            double cs = std::cos(s), sn = std::sin(s);
            for (std::size_t j = 0; j < dim; ++j)
                st[j] = cs * a[j] + sn * (b[j] - xi * a[j]) / sth;
            st = detail::normalized(st);
            numkit::RootSet rs = numkit::poly_roots(detail::root_polynomial(st), 1e-9);
            std::vector<cplx> roots = rs.flat();
            if (rs.at_infinity != 0 || roots.size() != m)
                throw std::runtime_error(
                    "geodesic_decompose: root tracking lost a branch at s=" +
                    std::to_string(s));
            // Closed-form prediction of each branch position at this s.
            double t = std::pow(std::sin(s) / std::sin(theta - s), 1.0 / double(m));
            std::vector<std::array<double, 3>> pred(m), got(m);
            for (std::size_t k = 0; k < m; ++k) {
                cplx x = branch[k] * t * beta / (1.0 + branch[k] * t * alpha);
                pred[k] = detail::bloch_of_root(x);
            }
            for (std::size_t k = 0; k < m; ++k) got[k] = detail::bloch_of_root(roots[k]);
            std::vector<std::size_t> asg = detail::assign_points(pred, got);
            for (std::size_t k = 0; k < m; ++k) {
                if (detail::dist3(pred[k], got[asg[k]]) > 1e-6)
                    throw std::runtime_error(
                        "geodesic_decompose: root tracking discontinuity at s=" +
                        std::to_string(s));
                dec.curves[k].points[i] = got[asg[k]];
            }
        }
    }

    // Ring geometry per branch: a circle cut on the unit sphere is centered
    // at the orthogonal projection of the origin onto its plane.
    dec.radii.assign(m, 0.0);
    dec.centers.assign(m, north);
    for (std::size_t k = 0; k < m; ++k) {
        const auto& pts = dec.curves[k].points;
        double spread = 0.0;
        for (const auto& p : pts) spread = std::max(spread, detail::dist3(p, pts[0]));
        if (spread < 1e-10) {
            dec.centers[k] = pts[0];
            dec.radii[k] = 0.0;
            continue;
        }
        std::array<double, 3> mean{0.0, 0.0, 0.0};
        for (const auto& p : pts)
            for (int c = 0; c < 3; ++c) mean[c] += p[c] / double(pts.size());
        std::array<double, 3> nrm{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
            std::array<double, 3> u{pts[i][0] - mean[0], pts[i][1] - mean[1],
                                    pts[i][2] - mean[2]};
            std::array<double, 3> v{pts[i + 1][0] - mean[0], pts[i + 1][1] - mean[1],
                                    pts[i + 1][2] - mean[2]};
            nrm[0] += u[1] * v[2] - u[2] * v[1];
            nrm[1] += u[2] * v[0] - u[0] * v[2];
            nrm[2] += u[0] * v[1] - u[1] * v[0];
        }
        double nn = std::sqrt(nrm[0] * nrm[0] + nrm[1] * nrm[1] + nrm[2] * nrm[2]);
        if (nn < 1e-300)
            throw std::runtime_error("geodesic_decompose: degenerate ring normal");
        for (int c = 0; c < 3; ++c) nrm[c] /= nn;
        double d = 0.0;
        for (const auto& p : pts)
            d += (p[0] * nrm[0] + p[1] * nrm[1] + p[2] * nrm[2]) / double(pts.size());
        std::array<double, 3> center{d * nrm[0], d * nrm[1], d * nrm[2]};
        double r = 0.0;
        for (const auto& p : pts) r += detail::dist3(p, center) / double(pts.size());
        dec.centers[k] = center;
        dec.radii[k] = r;
    }

    // Mirror pairing through the y=0 plane.
    std::vector<int> partner(m, -1);
    for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t j = k; j < m; ++j) {
            double worst = 0.0;
            for (std::size_t i = 0; i < samples; ++i) {
                const auto& p = dec.curves[k].points[i];
                const auto& q = dec.curves[j].points[i];
                std::array<double, 3> refl{q[0], -q[1], q[2]};
                worst = std::max(worst, detail::dist3(p, refl));
                if (worst >= 1e-7) break;
            }
            if (worst < 1e-7) {
                if (partner[k] != -1 && partner[k] != int(j)) continue;
                partner[k] = int(j);
                partner[j] = int(k);
                break;
            }
        }
    }
    for (std::size_t k = 0; k < m; ++k) {
        if (partner[k] < 0)
            throw std::runtime_error("geodesic_decompose: unpaired star branch");
        if (int(k) <= partner[k])
            dec.pairing.emplace_back(int(k), partner[k]);
    }
    return dec;
}

// Synthesize a three-level curve from a mirror-symmetric star pair with
// opening-angle profile eta(s) and relative-phase profile gamma(s): the two
// stars are (cos(eta/2), e^{+-i gamma} sin(eta/2)).  The profiles must open
// from zero (eta starts at 0) and carry no relative phase at either end.
inline geophase::PureCurve npc_from_dual_curves(const std::vector<double>& s,
                                                const std::vector<double>& eta,
                                                const std::vector<double>& gamma) {
    if (s.size() < 2 || s.size() != eta.size() || s.size() != gamma.size())
        throw std::invalid_argument("npc_from_dual_curves: grid size mismatch");
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!(s[i] > s[i - 1]))
            throw std::invalid_argument("npc_from_dual_curves: grid must increase");
    if (std::abs(eta.front()) > 1e-9)
        throw std::invalid_argument("npc_from_dual_curves: eta must start at zero");
    if (std::abs(gamma.front()) > 1e-9 || std::abs(gamma.back()) > 1e-9)
        throw std::invalid_argument(
            "npc_from_dual_curves: gamma must vanish at both ends");

    geophase::PureCurve curve;
    curve.s = s;
    curve.states.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        double c = std::cos(eta[i] / 2.0), q = std::sin(eta[i] / 2.0);
        cplx ph = std::exp(cplx(0.0, gamma[i]));
        StarSet pair;
        pair.stars = {State{cplx(c, 0.0), ph * q}, State{cplx(c, 0.0), std::conj(ph) * q}};
        pair.at_infinity = {false, false};
        curve.states[i] = stars_to_state(pair);
    }
    curve.validate();
    return curve;
}

// Check whether every triple of curve samples (on an evenly spaced grid of
// `points` indices) has its three-fold overlap product on the positive real
// axis.  min_re / max_abs_im report the worst triple encountered.
inline NpcCheckResult npc_check(const geophase::PureCurve& curve,
                                std::size_t points = 20) {
    curve.validate();
    std::size_t n = curve.states.size();
    points = std::clamp<std::size_t>(points, 3, n);
    std::vector<std::size_t> idx(points);
    for (std::size_t j = 0; j < points; ++j) idx[j] = (j * (n - 1)) / (points - 1);

    NpcCheckResult res;
    res.min_re = std::numeric_limits<double>::infinity();
    res.max_abs_im = 0.0;
    for (std::size_t i = 0; i < points; ++i)
        for (std::size_t j = i + 1; j < points; ++j)
            for (std::size_t k = j + 1; k < points; ++k) {
                const State& x = curve.states[idx[i]];
                const State& y = curve.states[idx[j]];
                const State& z = curve.states[idx[k]];
                cplx d3 = geophase::detail::overlap(x, y) *
                          geophase::detail::overlap(y, z) *
                          geophase::detail::overlap(z, x);
                res.min_re = std::min(res.min_re, d3.real());
                res.max_abs_im = std::max(res.max_abs_im, std::abs(d3.imag()));
            }
    res.is_npc = (res.min_re > 1e-10) && (res.max_abs_im < 1e-9);
    return res;
}

// CSV export: parameter, real/imaginary amplitude pairs, then sphere
// coordinates of each extracted star (canonical root order per sample).
inline void write_curve_csv(std::ostream& os, const geophase::PureCurve& curve,
                            int precision = 15) {
    curve.validate();
    std::size_t dim = curve.states.front().size();
    os.precision(precision);
    os << "s";
    for (std::size_t j = 0; j < dim; ++j) os << ",re_" << j << ",im_" << j;
    for (std::size_t k = 0; k + 1 < dim; ++k)
        os << ",star" << k << "_x,star" << k << "_y,star" << k << "_z";
    os << "\n";
    for (std::size_t i = 0; i < curve.states.size(); ++i) {
        os << curve.s[i];
        for (std::size_t j = 0; j < dim; ++j)
            os << "," << curve.states[i][j].real() << "," << curve.states[i][j].imag();
        StarSet ss = state_to_stars(curve.states[i]);
        for (const auto& star : ss.stars) {
            auto p = detail::bloch_point(star);
            os << "," << p[0] << "," << p[1] << "," << p[2];
        }
        os << "\n";
    }
}

}  // namespace stargeo
}  // namespace qwgp
