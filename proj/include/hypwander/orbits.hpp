#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <thread>
#include <vector>

#include "hypwander/error.hpp"
#include "hypwander/hypgeo.hpp"
#include "hypwander/maps.hpp"

namespace hypwander {

inline constexpr double kDefaultEscapeRadius = 1e50;

enum class Termination { MaxIter, EscapedToInfinity, LeftDomain };

/// Orbit w_0, w_1, ... with optional per-step hyperbolic derivatives.
///
/// etas[n] = ||Df(w_n)||_U is recorded only while w_n and w_{n+1} both lie in U.
/// The cumulative derivative delta_n = prod_{k<n} eta_k is kept in log space:
/// log_deltas[0] = 0 and log_deltas[n+1] = log_deltas[n] + log eta_n.
struct OrbitTrace {
    std::vector<Complex> points;
    std::vector<double> etas;
    std::vector<double> log_deltas;
    Termination termination = Termination::MaxIter;
    std::size_t exit_step = 0;

    double delta(std::size_t n) const { return std::exp(log_deltas.at(n)); }
};

inline OrbitTrace iterate_orbit(const EntireMap& map, Complex w, int n_max,
                                double escape_radius = kDefaultEscapeRadius) {
    if (n_max < 1) throw InvalidArgument("n_max must be at least 1");
    if (!(escape_radius > 0.0)) throw InvalidArgument("escape radius must be positive");
    OrbitTrace trace;
    trace.points.push_back(w);
    for (int n = 0; n < n_max; ++n) {
        if (std::abs(trace.points.back()) > escape_radius) {
            trace.termination = Termination::EscapedToInfinity;
            trace.exit_step = static_cast<std::size_t>(n);
            return trace;
        }
        try {
            trace.points.push_back(eval(map, trace.points.back()));
        } catch (const EscapedToInfinity&) {
            trace.termination = Termination::EscapedToInfinity;
            trace.exit_step = static_cast<std::size_t>(n) + 1;
            return trace;
        }
    }
    trace.exit_step = static_cast<std::size_t>(n_max);
    trace.termination = std::abs(trace.points.back()) > escape_radius ? Termination::EscapedToInfinity
                                                                        : Termination::MaxIter;
    return trace;
}

/// Orbit of w with eta_n = ||Df(w_n)||_U and delta_n tracked until the orbit
/// leaves U, overflows, or n_max steps are taken.
///
/// delta_n is nondecreasing whenever f restricts to a covering f^{-1}(U) -> U with
/// f^{-1}(U) inside U; exp on the slit plane C \ [0, inf) is such a configuration.
/// The covering property itself is not checked here.
inline OrbitTrace delta_sequence(const EntireMap& map, const ModelDomain& domain, Complex w, int n_max) {
    if (n_max < 0) throw InvalidArgument("n_max must be nonnegative");
    (void)density(domain, w);
    OrbitTrace trace;
    trace.points.push_back(w);
    trace.log_deltas.push_back(0.0);
    for (int n = 0; n < n_max; ++n) {
        const Complex current = trace.points.back();
        Complex next;
        double log_eta = 0.0;
        try {
            next = eval(map, current);
            trace.points.push_back(next);
            if (!contains(domain, next)) {
                trace.termination = Termination::LeftDomain;
                trace.exit_step = static_cast<std::size_t>(n) + 1;
                return trace;
            }
            log_eta = log_hyp_derivative(current, next, deriv(map, current), domain, domain);
        } catch (const EscapedToInfinity&) {
            trace.termination = Termination::EscapedToInfinity;
            trace.exit_step = static_cast<std::size_t>(n) + 1;
            return trace;
        }
        trace.etas.push_back(std::exp(log_eta));
        trace.log_deltas.push_back(trace.log_deltas.back() + log_eta);
    }
    trace.termination = Termination::MaxIter;
    trace.exit_step = static_cast<std::size_t>(n_max);
    return trace;
}

struct ExpansionCheck {
    double value = 0.0;
    double bound = 0.0;
    bool ok = false;
};

/// ||D exp(z)|| on the slit plane C \ [0, inf) against the lower bound |Re z|/4,
/// valid for Re z < 0.
inline ExpansionCheck exp_expansion_check(Complex z) {
    if (!(z.real() < 0.0)) throw DomainViolation("expansion bound needs Re z < 0");
    const ModelDomain slit = SlitPlane{0.0, +1};
    ExpansionCheck out;
    out.value = hyp_derivative(EntireMap::exp(), slit, slit, z);
    out.bound = std::abs(z.real()) / 4.0;
    out.ok = out.value >= out.bound - 1e-12;
    return out;
}

struct SingularOrbit {
    Complex value;
    std::optional<int> escape_step;  // first n with |f^n(s)| > target
    Complex last_point;              // last finite iterate computed
    double max_modulus = 0.0;
};

enum class EscapeVerdict { Uniform, NotEscaping };

struct SingularEscapeReport {
    std::vector<SingularOrbit> orbits;
    EscapeVerdict verdict = EscapeVerdict::Uniform;
    std::optional<Complex> witness;  // a singular value whose orbit stayed below target
    int slowest_step = 0;
};

/// For every singular value s, the first n with |f^n(s)| > target (overflow counts as
/// exceeding it). Uniform when every orbit gets there within n_max steps.
inline SingularEscapeReport singular_escape_report(const EntireMap& map, int n_max, double target,
                                                   const SingularSearch& search = {}) {
    if (n_max < 1) throw InvalidArgument("n_max must be at least 1");
    if (!(target > 0.0)) throw InvalidArgument("target radius must be positive");
    SingularEscapeReport report;
    for (Complex s : singular_values(map, search).values) {
        SingularOrbit orbit{s, std::nullopt, s, std::abs(s)};
        Complex z = s;
        for (int n = 0; n <= n_max; ++n) {
            if (std::abs(z) > target) {
                orbit.escape_step = n;
                break;
            }
            if (n == n_max) break;
            try {
                z = eval(map, z);
            } catch (const EscapedToInfinity&) {
                orbit.escape_step = n + 1;
                orbit.max_modulus = std::numeric_limits<double>::infinity();
                break;
            }
            orbit.last_point = z;
            orbit.max_modulus = std::max(orbit.max_modulus, std::abs(z));
        }
        if (orbit.escape_step) {
            report.slowest_step = std::max(report.slowest_step, *orbit.escape_step);
        } else if (!report.witness) {
            report.verdict = EscapeVerdict::NotEscaping;
            report.witness = s;
        }
        report.orbits.push_back(orbit);
    }
    return report;
}

enum class PixelClass : std::uint8_t { Escaped, Bounded, LeftWindow };

struct Pixel {
    PixelClass cls = PixelClass::Bounded;
    int iterations = 0;
    bool operator==(const Pixel&) const = default;
};

struct Rect {
    double x_min = -1.0;
    double x_max = 1.0;
    double y_min = -1.0;
    double y_max = 1.0;

    bool contains(Complex z) const {
        return z.real() >= x_min && z.real() <= x_max && z.imag() >= y_min && z.imag() <= y_max;
    }
};

/// Escape-time classification on a pixel grid. Row 0 is the top row (y_max);
/// pixel (i, j) samples the center of its cell.
struct EscapeGrid {
    Rect rect;
    int nx = 1;
    int ny = 1;
    int n_max = 0;
    double escape_radius = kDefaultEscapeRadius;
    std::vector<Pixel> pixels;

    Complex center(int i, int j) const {
        const double x = rect.x_min + (i + 0.5) * (rect.x_max - rect.x_min) / nx;
        const double y = rect.y_max - (j + 0.5) * (rect.y_max - rect.y_min) / ny;
        return {x, y};
    }
    const Pixel& at(int i, int j) const { return pixels[static_cast<std::size_t>(j) * nx + i]; }

    double fraction(PixelClass cls) const {
        const auto n = std::count_if(pixels.begin(), pixels.end(), [&](const Pixel& p) { return p.cls == cls; });
        return static_cast<double>(n) / static_cast<double>(pixels.size());
    }
};

/// Escaped(n): |f^n(z)| > escape_radius or overflow at step n. Otherwise after n_max
/// steps: Bounded when the last iterate lies in `window`, LeftWindow when it does not.
/// Bounded only means "not escaped within the budget".
inline Pixel classify_point(const EntireMap& map, Complex z, int n_max, double escape_radius, const Rect& window) {
    for (int n = 0; n < n_max; ++n) {
        if (std::abs(z) > escape_radius) return {PixelClass::Escaped, n};
        try {
            z = eval(map, z);
        } catch (const EscapedToInfinity&) {
            return {PixelClass::Escaped, n + 1};
        }
    }
    if (std::abs(z) > escape_radius) return {PixelClass::Escaped, n_max};
    return {window.contains(z) ? PixelClass::Bounded : PixelClass::LeftWindow, n_max};
}

/// Rows are independent work units and are distributed over `threads` workers
/// (0 = hardware concurrency); the result does not depend on the thread count.
inline EscapeGrid escape_grid(const EntireMap& map, const Rect& rect, int nx, int ny, int n_max,
                              double escape_radius = kDefaultEscapeRadius, unsigned threads = 0) {
    if (nx < 1 || ny < 1) throw InvalidArgument("grid resolution must be at least 1");
    if (n_max < 1) throw InvalidArgument("n_max must be at least 1");
    if (!(rect.x_min < rect.x_max && rect.y_min < rect.y_max)) throw InvalidArgument("empty rectangle");
    if (!(escape_radius > 0.0)) throw InvalidArgument("escape radius must be positive");
    EscapeGrid grid{rect, nx, ny, n_max, escape_radius, {}};
    grid.pixels.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));

    std::atomic<int> next_row{0};
    const auto worker = [&] {
        for (int j = next_row++; j < ny; j = next_row++)
            for (int i = 0; i < nx; ++i)
                grid.pixels[static_cast<std::size_t>(j) * nx + i] =
                    classify_point(map, grid.center(i, j), n_max, escape_radius, rect);
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(ny));
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();  // join before the grid is handed out
    return grid;
}

}  // namespace hypwander
