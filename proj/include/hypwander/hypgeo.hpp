#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "hypwander/error.hpp"
#include "hypwander/interval.hpp"
#include "hypwander/maps.hpp"
#include "hypwander/quadrature.hpp"

namespace hypwander {

// Plane domains with closed-form hyperbolic densities (curvature -1 normalisation,
// so the unit disk has density 2/(1-|z|^2)).

struct UnitDisk {
    bool operator==(const UnitDisk&) const = default;
};
struct UpperHalfPlane {
    bool operator==(const UpperHalfPlane&) const = default;
};
/// D \ {0}
struct PuncturedDisk {
    bool operator==(const PuncturedDisk&) const = default;
};
/// C \ {base + direction * t : t >= 0}
struct SlitPlane {
    double base = 0.0;
    int direction = +1;
    bool operator==(const SlitPlane&) const = default;
};
/// {r_in < |z| < r_out}
struct Annulus {
    double r_in = 0.5;
    double r_out = 2.0;
    bool operator==(const Annulus&) const = default;
};
/// D \ {p}, p real in [0, 1)
struct DiskMinusPoint {
    double p = 0.5;
    bool operator==(const DiskMinusPoint&) const = default;
};
/// {|z| < r}
struct DiskOfRadius {
    double r = 1.0;
    bool operator==(const DiskOfRadius&) const = default;
};

using ModelDomain =
    std::variant<UnitDisk, UpperHalfPlane, PuncturedDisk, SlitPlane, Annulus, DiskMinusPoint, DiskOfRadius>;

inline void validate(const ModelDomain& domain) {
    std::visit(overloaded{
                   [](const SlitPlane& s) {
                       if (s.direction != 1 && s.direction != -1)
                           throw InvalidArgument("slit direction must be +1 or -1");
                       if (!std::isfinite(s.base)) throw InvalidArgument("slit base must be finite");
                   },
                   [](const Annulus& a) {
                       if (!(0.0 < a.r_in && a.r_in < a.r_out && std::isfinite(a.r_out)))
                           throw InvalidArgument("annulus requires 0 < r_in < r_out");
                   },
                   [](const DiskMinusPoint& d) {
                       if (!(0.0 <= d.p && d.p < 1.0)) throw InvalidArgument("puncture must lie in [0, 1)");
                   },
                   [](const DiskOfRadius& d) {
                       if (!(d.r > 0.0 && std::isfinite(d.r))) throw InvalidArgument("disk radius must be positive");
                   },
                   [](const auto&) {},
               },
               domain);
}

inline std::string describe(const ModelDomain& domain) {
    return std::visit(
        overloaded{
            [](const UnitDisk&) -> std::string { return "unit-disk"; },
            [](const UpperHalfPlane&) -> std::string { return "upper-half-plane"; },
            [](const PuncturedDisk&) -> std::string { return "punctured-disk"; },
            [](const SlitPlane& s) -> std::string {
                return "slit-plane(base=" + std::to_string(s.base) + ",dir=" + (s.direction > 0 ? "+" : "-") + ")";
            },
            [](const Annulus& a) -> std::string {
                return "annulus(" + std::to_string(a.r_in) + "," + std::to_string(a.r_out) + ")";
            },
            [](const DiskMinusPoint& d) -> std::string { return "disk-minus-point(" + std::to_string(d.p) + ")"; },
            [](const DiskOfRadius& d) -> std::string { return "disk-radius(" + std::to_string(d.r) + ")"; },
        },
        domain);
}

inline bool is_simply_connected(const ModelDomain& domain) {
    return !std::holds_alternative<PuncturedDisk>(domain) && !std::holds_alternative<Annulus>(domain) &&
           !std::holds_alternative<DiskMinusPoint>(domain);
}

/// Euclidean distance from z to the boundary for z inside the domain, 0 otherwise.
inline double boundary_distance(const ModelDomain& domain, Complex z) {
    validate(domain);
    const double r = std::abs(z);
    const double d = std::visit(
        overloaded{
            [&](const UnitDisk&) { return 1.0 - r; },
            [&](const UpperHalfPlane&) { return z.imag(); },
            [&](const PuncturedDisk&) { return std::min(r, 1.0 - r); },
            [&](const SlitPlane& s) {
                const Complex zeta = static_cast<double>(s.direction) * (z - s.base);
                return zeta.real() >= 0.0 ? std::abs(zeta.imag()) : std::abs(zeta);
            },
            [&](const Annulus& a) { return std::min(r - a.r_in, a.r_out - r); },
            [&](const DiskMinusPoint& d) { return std::min(std::abs(z - d.p), 1.0 - r); },
            [&](const DiskOfRadius& d) { return d.r - r; },
        },
        domain);
    return d > 0.0 ? d : 0.0;
}

inline bool contains(const ModelDomain& domain, Complex z) { return boundary_distance(domain, z) > 0.0; }

/// Exact hyperbolic density at an interior point; DomainViolation otherwise.
inline double density(const ModelDomain& domain, Complex z) {
    validate(domain);
    const auto outside = [&] {
        return DomainViolation("point (" + std::to_string(z.real()) + ", " + std::to_string(z.imag()) +
                               ") is not inside " + describe(domain));
    };
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw outside();
    const double r = std::abs(z);
    return std::visit(
        overloaded{
            [&](const UnitDisk&) {
                if (!(r < 1.0)) throw outside();
                return 2.0 / ((1.0 - r) * (1.0 + r));
            },
            [&](const UpperHalfPlane&) {
                if (!(z.imag() > 0.0)) throw outside();
                return 1.0 / z.imag();
            },
            [&](const PuncturedDisk&) {
                if (!(r > 0.0 && r < 1.0)) throw outside();
                return 1.0 / (r * -std::log(r));
            },
            [&](const SlitPlane& s) {
                // sqrt maps the model slit plane C \ [0, inf) onto the upper half plane.
                const Complex zeta = static_cast<double>(s.direction) * (z - s.base);
                const Complex root = std::sqrt(zeta);
                const double height = std::abs(root.imag());
                if (!(height > 0.0)) throw outside();
                return 1.0 / (2.0 * std::abs(root) * height);
            },
            [&](const Annulus& a) {
                if (!(a.r_in < r && r < a.r_out)) throw outside();
                // Covered by the strip log r_in < Re w < log r_out via w -> e^w.
                const double width = std::log(a.r_out / a.r_in);
                return std::numbers::pi / (r * width * std::sin(std::numbers::pi * std::log(r / a.r_in) / width));
            },
            [&](const DiskMinusPoint& d) {
                if (!(r < 1.0) || z == Complex(d.p)) throw outside();
                // Moebius phi(z) = (z - p)/(1 - p z) carries D \ {p} onto D*.
                const double q2 = std::norm(1.0 - d.p * z);
                const double gap = (1.0 - d.p * d.p) * (1.0 - r) * (1.0 + r) / q2;  // 1 - |phi|^2
                const double phi_abs = std::abs(z - d.p) / std::sqrt(q2);
                const double dphi = (1.0 - d.p * d.p) / q2;
                return dphi / (phi_abs * -0.5 * std::log1p(-gap));
            },
            [&](const DiskOfRadius& d) {
                if (!(r < d.r)) throw outside();
                return 2.0 * d.r / ((d.r - r) * (d.r + r));
            },
        },
        domain);
}

/// A domain known only through its boundary distance.
struct GeneralDomain {
    std::function<double(Complex)> boundary_distance;
    bool simply_connected = false;
    std::string name = "general";

    static GeneralDomain from(const ModelDomain& domain) {
        validate(domain);
        return {[domain](Complex z) { return hypwander::boundary_distance(domain, z); },
                is_simply_connected(domain), describe(domain)};
    }
};

/// Koebe-type two-sided bound [1/(2d), 2/d]; the lower end is reported unknown
/// unless the domain is simply connected.
inline Interval density_bounds(const GeneralDomain& domain, Complex z) {
    const double d = domain.boundary_distance(z);
    if (!(d > 0.0)) throw DomainViolation("point is not inside " + domain.name);
    if (domain.simply_connected) return Interval(1.0 / (2.0 * d), 2.0 / d);
    return Interval::upper_only(2.0 / d);
}

/// Hyperbolic distance in the unit disk from 0 to z.
inline double disk_distance_from_origin(Complex z) {
    const double r = std::abs(z);
    if (!(r < 1.0)) throw DomainViolation("point is not inside the unit disk");
    return 2.0 * std::atanh(r);  // log((1+r)/(1-r))
}

struct ComparisonBounds {
    Interval bounds;            // [lo, hi] enclosing rho_V^U(z)
    double r_tilde = 0.0;       // (e^R - 1)/(e^R + 1)
    double lower_excess = 0.0;  // lo - 1, computed without cancellation
    double upper_excess = 0.0;  // hi - 1
};

/// Sharp bounds on the density of V relative to U at a point whose U-distance to
/// U \ V is R.
inline ComparisonBounds comparison_bounds(double R) {
    if (!(R > 0.0) || !std::isfinite(R)) throw InvalidArgument("comparison bounds need finite R > 0");
    ComparisonBounds out;
    out.r_tilde = std::tanh(0.5 * R);
    out.upper_excess = 2.0 / std::expm1(R);
    double lo = 0.0;
    if (R < 1.0) {
        // 2e^R / ((e^{2R}-1) log((e^R+1)/(e^R-1))) = 1 / (sinh R * log1p(2/expm1 R))
        lo = 1.0 / (std::sinh(R) * std::log1p(2.0 / std::expm1(R)));
        out.lower_excess = lo - 1.0;
    } else {
        // With v = e^{-2R}: lo = 1/(1 - D), D = sum_{k>=1} 2 v^k / (4k^2 - 1).
        const double v = std::exp(-2.0 * R);
        double sum = 0.0;
        double vk = 1.0;
        for (int k = 1; k < 200; ++k) {
            vk *= v;
            const double term = 2.0 * vk / (4.0 * k * k - 1.0);
            sum += term;
            if (term <= 1e-18 * sum) break;
        }
        lo = 1.0 / (1.0 - sum);
        out.lower_excess = sum / (1.0 - sum);
    }
    out.bounds = Interval(lo, 1.0 + out.upper_excess);
    return out;
}

/// rho_V(z)/rho_U(z) for V = inner contained in U = outer. Supported inclusions:
/// identical domains, DiskOfRadius(r <= 1) and DiskMinusPoint / PuncturedDisk in
/// UnitDisk, and nested slit planes with the same direction.
inline double density_ratio(const ModelDomain& inner, const ModelDomain& outer, Complex z) {
    validate(inner);
    validate(outer);
    if (inner == outer) {
        (void)density(inner, z);
        return 1.0;
    }
    const double r = std::abs(z);
    const auto punctured_in_disk = [&](double p) {
        (void)density(DiskMinusPoint{p}, z);
        const double q2 = std::norm(1.0 - p * z);
        const double gap = (1.0 - p * p) * (1.0 - r) * (1.0 + r) / q2;
        if (gap < 1e-3) {
            // log ratio = t^2/24 + t^3/24 + 109 t^4/2880 + 49 t^5/1440 + O(t^6), t = gap;
            // the quotient below would round to 1 +- ulp here.
            const double t = gap;
            return std::exp(t * t * (1.0 / 24 + t * (1.0 / 24 + t * (109.0 / 2880 + t * 49.0 / 1440))));
        }
        const double phi_abs = std::abs(z - p) / std::sqrt(q2);
        return gap / (phi_abs * -std::log1p(-gap));
    };
    if (std::holds_alternative<UnitDisk>(outer)) {
        if (const auto* d = std::get_if<DiskOfRadius>(&inner); d && d->r <= 1.0) {
            (void)density(inner, z);
            return d->r * (1.0 - r) * (1.0 + r) / ((d->r - r) * (d->r + r));
        }
        if (const auto* d = std::get_if<DiskMinusPoint>(&inner)) return punctured_in_disk(d->p);
        if (std::holds_alternative<PuncturedDisk>(inner)) return punctured_in_disk(0.0);
    }
    if (const auto* si = std::get_if<SlitPlane>(&inner)) {
        if (const auto* so = std::get_if<SlitPlane>(&outer);
            so && si->direction == so->direction && si->direction * (so->base - si->base) >= 0.0)
            return density(inner, z) / density(outer, z);
    }
    throw InvalidArgument("unsupported inclusion " + describe(inner) + " in " + describe(outer));
}

/// A smooth parameterised path t in [t0, t1] -> point(t).
struct Curve {
    std::function<Complex(double)> point;
    std::function<Complex(double)> velocity;
    double t0 = 0.0;
    double t1 = 1.0;

    static Curve segment(Complex from, Complex to) {
        return {[=](double t) { return from + t * (to - from); }, [=](double) { return to - from; }, 0.0, 1.0};
    }

    /// center + radius * e^{i theta}, theta from theta0 to theta1.
    static Curve arc(Complex center, double radius, double theta0, double theta1) {
        return {[=](double t) { return center + std::polar(radius, t); },
                [=](double t) { return Complex(0.0, 1.0) * std::polar(radius, t); }, theta0, theta1};
    }
};

inline std::vector<Curve> polyline(std::span<const Complex> vertices) {
    std::vector<Curve> pieces;
    for (std::size_t i = 0; i + 1 < vertices.size(); ++i) pieces.push_back(Curve::segment(vertices[i], vertices[i + 1]));
    return pieces;
}

/// Hyperbolic length: integral of rho(gamma(t)) |gamma'(t)| dt, absolute error <= tol.
inline double curve_length(const ModelDomain& domain, const Curve& curve, double tol) {
    const auto integrand = [&](double t) { return density(domain, curve.point(t)) * std::abs(curve.velocity(t)); };
    // Length does not depend on the direction of traversal.
    return adaptive_simpson(integrand, std::min(curve.t0, curve.t1), std::max(curve.t0, curve.t1), tol);
}

inline double curve_length(const ModelDomain& domain, std::span<const Curve> pieces, double tol) {
    double total = 0.0;
    const double share = tol / static_cast<double>(std::max<std::size_t>(pieces.size(), 1));
    for (const auto& piece : pieces) total += curve_length(domain, piece, share);
    return total;
}

/// log of |f'(z)| rho_dst(f(z)) / rho_src(z) given the values f(z) and f'(z);
/// -inf at critical points.
inline double log_hyp_derivative(Complex z, Complex fz, Complex fpz, const ModelDomain& src,
                                 const ModelDomain& dst) {
    const double rho_src = density(src, z);
    const double rho_dst = density(dst, fz);
    const double fp = std::abs(fpz);
    if (fp == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(fp) + std::log(rho_dst) - std::log(rho_src);
}

inline double log_hyp_derivative(const EntireMap& map, const ModelDomain& src, const ModelDomain& dst, Complex z) {
    (void)density(src, z);
    return log_hyp_derivative(z, eval(map, z), deriv(map, z), src, dst);
}

/// Norm of Df(z) from the hyperbolic metric of src to that of dst. Returns 0 exactly
/// when f'(z) = 0.
inline double hyp_derivative(const EntireMap& map, const ModelDomain& src, const ModelDomain& dst, Complex z) {
    return std::exp(log_hyp_derivative(map, src, dst, z));
}

inline double hyp_derivative(Complex z, Complex fz, Complex fpz, const ModelDomain& src, const ModelDomain& dst) {
    return std::exp(log_hyp_derivative(z, fz, fpz, src, dst));
}

}  // namespace hypwander
