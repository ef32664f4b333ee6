#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <unsupported/Eigen/Polynomials>

#include "hypwander/error.hpp"

namespace hypwander {

using Complex = std::complex<double>;

/// Any intermediate modulus above this aborts evaluation with EscapedToInfinity.
inline constexpr double kOverflowModulus = 1e300;
inline const double kOverflowLog = std::log(kOverflowModulus);

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

namespace detail {

inline Complex checked(Complex v) {
    const double m = std::abs(v);
    if (!std::isfinite(m)) throw EscapedToInfinity(kOverflowLog);
    if (m > kOverflowModulus) throw EscapedToInfinity(std::log(m));
    return v;
}

// log(1 + u) without losing digits for small |u|.
inline Complex log1p(Complex u) {
    const double re = 0.5 * std::log1p(2.0 * u.real() + std::norm(u));
    const double im = std::atan2(u.imag(), 1.0 + u.real());
    return {re, im};
}

// Bisection on a sign change of g over [lo, hi], to relative width `rel_tol`.
template <class F>
std::optional<double> bisect(F&& g, double lo, double hi, double rel_tol = 1e-12) {
    double glo = g(lo);
    const double ghi = g(hi);
    if (glo == 0.0) return lo;
    if (ghi == 0.0) return hi;
    if (std::signbit(glo) == std::signbit(ghi)) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) break;
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if (std::signbit(gm) == std::signbit(glo)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Real polynomial, coefficients in ascending order of degree.
class Polynomial {
public:
    explicit Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
        if (c_.empty()) throw InvalidArgument("zero polynomial");
        for (double c : c_)
            if (!std::isfinite(c)) throw InvalidArgument("polynomial coefficient is not finite");
    }

    static Polynomial identity() { return Polynomial({0.0, 1.0}); }
    static Polynomial square() { return Polynomial({0.0, 0.0, 1.0}); }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<double>& coefficients() const { return c_; }

    Complex operator()(Complex z) const {
        Complex acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
        return acc;
    }

    Complex derivative(Complex z) const {
        Complex acc = 0.0;
        for (std::size_t k = c_.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * c_[k];
        return acc;
    }

    /// Roots of p', complex in general.
    std::vector<Complex> critical_points() const {
        std::vector<double> d;
        for (std::size_t k = 1; k < c_.size(); ++k) d.push_back(static_cast<double>(k) * c_[k]);
        if (d.size() <= 1) return {};
        if (d.size() == 2) return {Complex(-d[0] / d[1], 0.0)};
        Eigen::VectorXd coeffs(static_cast<Eigen::Index>(d.size()));
        for (std::size_t k = 0; k < d.size(); ++k) coeffs[static_cast<Eigen::Index>(k)] = d[k];
        Eigen::PolynomialSolver<double, Eigen::Dynamic> solver;
        solver.compute(coeffs);
        std::vector<Complex> roots;
        for (Eigen::Index i = 0; i < solver.roots().size(); ++i) roots.push_back(solver.roots()[i]);
        std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        return roots;
    }

    bool operator==(const Polynomial&) const = default;

private:
    std::vector<double> c_;
};

/// Zeros x_n = scale * n^exponent, n >= 1.
struct ZeroLaw {
    double scale = 1.0;
    double exponent = 2.0;

    double operator()(int n) const { return scale * std::pow(static_cast<double>(n), exponent); }

    std::vector<double> first(int count) const {
        std::vector<double> xs;
        xs.reserve(static_cast<std::size_t>(std::max(count, 0)));
        for (int n = 1; n <= count; ++n) xs.push_back((*this)(n));
        return xs;
    }

    /// Integral-comparison upper estimate of sum_{n>N} 1/x_n; infinite for exponent <= 1.
    double tail_reciprocal_sum(int truncation) const {
        if (exponent <= 1.0) return std::numeric_limits<double>::infinity();
        return std::pow(static_cast<double>(truncation), 1.0 - exponent) / (scale * (exponent - 1.0));
    }

    bool operator==(const ZeroLaw&) const = default;
};

/// A member of one of the supported entire-function families. Immutable.
class EntireMap {
public:
    struct Exp {
        bool operator==(const Exp&) const = default;
    };
    /// lambda * sinh(z)/z + a
    struct SinhOverZ {
        double lambda = 1.0;
        double a = 0.0;
        bool operator==(const SinhOverZ&) const = default;
    };
    /// prod_{n<=N} (1 + z/x_n), 0 < x_1 <= x_2 <= ...
    struct LPProduct {
        std::vector<double> zeros;
        std::optional<ZeroLaw> law;
    };
    /// base(p(z))
    struct PolyPrecomposed {
        std::shared_ptr<const EntireMap> base;
        Polynomial poly;
    };
    using Family = std::variant<Exp, SinhOverZ, LPProduct, PolyPrecomposed>;

    static EntireMap exp() { return EntireMap(Exp{}); }

    static EntireMap sinh_over_z(double lambda, double a) {
        if (!std::isfinite(lambda) || !std::isfinite(a) || lambda == 0.0)
            throw InvalidArgument("sinh-over-z needs finite lambda != 0 and finite a");
        return EntireMap(SinhOverZ{lambda, a});
    }

    static EntireMap lp_product(std::vector<double> zeros) {
        if (zeros.size() < 2) throw InvalidArgument("product needs at least two zeros");
        if (!(zeros.front() > 0.0)) throw InvalidArgument("product zeros must be positive");
        for (std::size_t i = 1; i < zeros.size(); ++i)
            if (!(zeros[i] >= zeros[i - 1]) || !std::isfinite(zeros[i]))
                throw InvalidArgument("product zeros must be finite and nondecreasing");
        return EntireMap(LPProduct{std::move(zeros), std::nullopt});
    }

    static EntireMap lp_product(ZeroLaw law, int truncation) {
        if (!(law.scale > 0.0) || !(law.exponent > 0.0))
            throw InvalidArgument("zero law needs positive scale and exponent");
        auto m = lp_product(law.first(truncation));
        std::get<LPProduct>(m.family_).law = law;
        return m;
    }

    const Family& family() const { return family_; }

    bool is_real() const {
        if (const auto* c = std::get_if<PolyPrecomposed>(&family_)) return c->base->is_real();
        return true;
    }

    std::string name() const {
        return std::visit(overloaded{
                              [](const Exp&) -> std::string { return "exp"; },
                              [](const SinhOverZ& s) -> std::string {
                                  return "sinh-over-z(lambda=" + std::to_string(s.lambda) +
                                         ",a=" + std::to_string(s.a) + ")";
                              },
                              [](const LPProduct& p) -> std::string {
                                  return "lp-product(N=" + std::to_string(p.zeros.size()) + ")";
                              },
                              [](const PolyPrecomposed& c) -> std::string {
                                  return c.base->name() + "∘poly(deg " +
                                         std::to_string(c.poly.degree()) + ")";
                              },
                          },
                          family_);
    }

private:
    explicit EntireMap(Family f) : family_(std::move(f)) {}
    friend EntireMap precompose_poly(const EntireMap&, Polynomial);

    Family family_;
};

inline EntireMap precompose_poly(const EntireMap& map, Polynomial poly) {
    if (poly.degree() < 1) throw InvalidArgument("precomposition needs a polynomial of degree >= 1");
    return EntireMap(EntireMap::PolyPrecomposed{std::make_shared<const EntireMap>(map), std::move(poly)});
}

namespace detail {

inline constexpr double kSinhSeriesRadius = 1e-4;
inline constexpr double kSinhScaledCutoff = 20.0;

// For Re z large in modulus, sinh(z)/z = e^w * B(w) with w = +-z, Re w > 0.
struct ScaledSinh {
    Complex w;
    double sign;
    Complex e2;  // e^{-2w}

    explicit ScaledSinh(Complex z)
        : w(z.real() >= 0 ? z : -z), sign(z.real() >= 0 ? 1.0 : -1.0), e2(std::exp(-2.0 * w)) {}

    // sinh(w)/w = e^w * value_factor
    Complex value_factor(double lambda, double a) const {
        return lambda * (1.0 - e2) / (2.0 * w) + a * std::exp(-w);
    }
    // d/dw [lambda sinh(w)/w] = e^w * deriv_factor
    Complex deriv_factor(double lambda) const {
        return lambda * (w * (1.0 + e2) - (1.0 - e2)) / (2.0 * w * w);
    }
};

inline Complex scaled_exp_product(Complex w, Complex factor) {
    const double log_mod = w.real() + std::log(std::abs(factor));
    if (log_mod > kOverflowLog) throw EscapedToInfinity(log_mod);
    return checked(std::exp(w) * factor);
}

}  // namespace detail

/// f(z). Throws EscapedToInfinity once any intermediate modulus exceeds 1e300.
inline Complex eval(const EntireMap& map, Complex z) {
    return std::visit(
        overloaded{
            [&](const EntireMap::Exp&) {
                if (z.real() > kOverflowLog) throw EscapedToInfinity(z.real());
                return std::exp(z);
            },
            [&](const EntireMap::SinhOverZ& s) {
                if (std::abs(z) < detail::kSinhSeriesRadius) {
                    const Complex z2 = z * z;
                    return s.lambda * (1.0 + z2 / 6.0 + z2 * z2 / 120.0) + s.a;
                }
                if (std::abs(z.real()) > detail::kSinhScaledCutoff) {
                    const detail::ScaledSinh sc(z);
                    return detail::scaled_exp_product(sc.w, sc.value_factor(s.lambda, s.a));
                }
                return detail::checked(s.lambda * std::sinh(z) / z + s.a);
            },
            [&](const EntireMap::LPProduct& p) {
                Complex prod = 1.0;
                for (double x : p.zeros) {
                    prod *= 1.0 + z / x;
                    if (std::abs(prod) > kOverflowModulus) {
                        double log_mod = 0.0;
                        for (double y : p.zeros) log_mod += std::log(std::abs(1.0 + z / y));
                        throw EscapedToInfinity(log_mod);
                    }
                }
                return prod;
            },
            [&](const EntireMap::PolyPrecomposed& c) {
                return eval(*c.base, detail::checked(c.poly(z)));
            },
        },
        map.family());
}

/// f'(z), closed form per family.
inline Complex deriv(const EntireMap& map, Complex z) {
    return std::visit(
        overloaded{
            [&](const EntireMap::Exp&) {
                if (z.real() > kOverflowLog) throw EscapedToInfinity(z.real());
                return std::exp(z);
            },
            [&](const EntireMap::SinhOverZ& s) {
                if (std::abs(z) < detail::kSinhSeriesRadius) {
                    const Complex z2 = z * z;
                    return s.lambda * (z / 3.0 + z * z2 / 30.0);
                }
                if (std::abs(z.real()) > detail::kSinhScaledCutoff) {
                    const detail::ScaledSinh sc(z);
                    return sc.sign * detail::scaled_exp_product(sc.w, sc.deriv_factor(s.lambda));
                }
                return detail::checked(s.lambda * (z * std::cosh(z) - std::sinh(z)) / (z * z));
            },
            [&](const EntireMap::LPProduct& p) {
                std::vector<std::size_t> vanishing;
                for (std::size_t k = 0; k < p.zeros.size(); ++k)
                    if (1.0 + z / p.zeros[k] == 0.0) vanishing.push_back(k);
                if (vanishing.size() >= 2) return Complex(0.0);
                if (vanishing.size() == 1) {
                    const std::size_t k = vanishing.front();
                    Complex prod = 1.0 / p.zeros[k];
                    for (std::size_t n = 0; n < p.zeros.size(); ++n)
                        if (n != k) prod = detail::checked(prod * (1.0 + z / p.zeros[n]));
                    return prod;
                }
                Complex sum = 0.0;
                for (double x : p.zeros) sum += 1.0 / (x + z);
                return detail::checked(eval(map, z) * sum);
            },
            [&](const EntireMap::PolyPrecomposed& c) {
                const Complex w = detail::checked(c.poly(z));
                return detail::checked(c.poly.derivative(z) * deriv(*c.base, w));
            },
        },
        map.family());
}

/// A branch of log f(z): the real part is log|f(z)|, exact beyond the overflow cutoff.
/// The imaginary part is some argument of f(z), with no continuity guarantee.
inline Complex log_eval(const EntireMap& map, Complex z) {
    return std::visit(
        overloaded{
            [&](const EntireMap::Exp&) { return z; },
            [&](const EntireMap::SinhOverZ& s) {
                if (std::abs(z.real()) > detail::kSinhScaledCutoff) {
                    const detail::ScaledSinh sc(z);
                    return sc.w + std::log(sc.value_factor(s.lambda, s.a));
                }
                return std::log(eval(map, z));
            },
            [&](const EntireMap::LPProduct& p) {
                Complex sum = 0.0;
                for (double x : p.zeros) sum += detail::log1p(z / x);
                return sum;
            },
            [&](const EntireMap::PolyPrecomposed& c) { return log_eval(*c.base, c.poly(z)); },
        },
        map.family());
}

/// f'(z)/f(z), computed without forming f where it could overflow.
inline Complex log_derivative(const EntireMap& map, Complex z) {
    return std::visit(
        overloaded{
            [&](const EntireMap::Exp&) { return Complex(1.0); },
            [&](const EntireMap::SinhOverZ& s) {
                if (std::abs(z.real()) > detail::kSinhScaledCutoff) {
                    const detail::ScaledSinh sc(z);
                    return sc.sign * sc.deriv_factor(s.lambda) / sc.value_factor(s.lambda, s.a);
                }
                return deriv(map, z) / eval(map, z);
            },
            [&](const EntireMap::LPProduct& p) {
                Complex sum = 0.0;
                for (double x : p.zeros) sum += 1.0 / (x + z);
                return sum;
            },
            [&](const EntireMap::PolyPrecomposed& c) {
                return c.poly.derivative(z) * log_derivative(*c.base, c.poly(z));
            },
        },
        map.family());
}

/// Upper estimate of |log f(z) - log f_N(z)|, i.e. sum_{n>N} |z|/x_n, for truncated
/// products. Zero for exactly evaluated families; nullopt when the tail is unknown.
inline std::optional<double> truncation_tail(const EntireMap& map, Complex z) {
    return std::visit(
        overloaded{
            [](const EntireMap::Exp&) -> std::optional<double> { return 0.0; },
            [](const EntireMap::SinhOverZ&) -> std::optional<double> { return 0.0; },
            [&](const EntireMap::LPProduct& p) -> std::optional<double> {
                if (!p.law) return std::nullopt;
                return std::abs(z) * p.law->tail_reciprocal_sum(static_cast<int>(p.zeros.size()));
            },
            [&](const EntireMap::PolyPrecomposed& c) { return truncation_tail(*c.base, c.poly(z)); },
        },
        map.family());
}

struct SingularSet {
    std::vector<Complex> values;
    double radius_bound = 0.0;  // |s| < radius_bound for every listed s
};

struct SingularSearch {
    /// sinh-over-z critical points are sought on the imaginary axis up to |y| = windows * pi.
    int windows = 40;
};

namespace detail {

inline void add_unique(std::vector<Complex>& values, Complex s) {
    for (Complex v : values)
        if (std::abs(v - s) <= 1e-12 * (1.0 + std::abs(s))) return;
    values.push_back(s);
}

inline std::vector<Complex> singular_list(const EntireMap& map, const SingularSearch& search) {
    return std::visit(
        overloaded{
            [](const EntireMap::Exp&) { return std::vector<Complex>{0.0}; },
            [&](const EntireMap::SinhOverZ& s) {
                // Critical points: z = 0 and z = +-iy with tan y = y; sinh(iy)/(iy) = sin(y)/y.
                std::vector<Complex> values{s.a, s.lambda + s.a};
                std::vector<IncompleteSingularSet::Window> failed;
                const auto h = [](double y) { return y * std::cos(y) - std::sin(y); };
                for (int k = 1; k < search.windows; ++k) {
                    const double lo = k * std::numbers::pi;
                    const double hi = lo + 0.5 * std::numbers::pi;
                    const auto y = bisect(h, lo, hi);
                    if (!y) {
                        failed.emplace_back(lo * lo, hi * hi);
                        continue;
                    }
                    add_unique(values, s.lambda * std::sin(*y) / *y + s.a);
                }
                if (!failed.empty())
                    throw IncompleteSingularSet("no sign change in critical-point window", failed);
                return values;
            },
            [&](const EntireMap::LPProduct& p) {
                // Critical points of the product interlace its zeros on the negative axis:
                // on (x_k, x_{k+1}), t -> sum 1/(x_n - t) increases from -inf to +inf.
                std::vector<Complex> values;
                std::vector<IncompleteSingularSet::Window> failed;
                const auto& xs = p.zeros;
                const auto g = [&](double t) {
                    double sum = 0.0;
                    for (double x : xs) sum += 1.0 / (x - t);
                    return sum;
                };
                for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
                    if (xs[k] == xs[k + 1]) {
                        add_unique(values, 0.0);
                        continue;
                    }
                    const double gap = xs[k + 1] - xs[k];
                    const double lo = xs[k] + 1e-9 * gap;
                    const double hi = xs[k + 1] - 1e-9 * gap;
                    const auto t = bisect(g, lo, hi);
                    if (!t) {
                        failed.emplace_back(-hi, -lo);
                        continue;
                    }
                    add_unique(values, Complex(eval(map, Complex(-*t, 0.0)).real(), 0.0));
                }
                if (!failed.empty())
                    throw IncompleteSingularSet("no sign change in critical-point window", failed);
                // Zeros growing like n^2 give order 1/2 with f -> 0 along the negative axis.
                if (p.law && p.law->exponent == 2.0) add_unique(values, 0.0);
                return values;
            },
            [&](const EntireMap::PolyPrecomposed& c) {
                auto values = singular_list(*c.base, search);
                for (Complex crit : c.poly.critical_points()) add_unique(values, eval(map, crit));
                return values;
            },
        },
        map.family());
}

}  // namespace detail

/// Critical and asymptotic values found by deterministic root scans, with a radius bound.
inline SingularSet singular_values(const EntireMap& map, const SingularSearch& search = {}) {
    SingularSet set;
    set.values = detail::singular_list(map, search);
    double max_mod = 0.0;
    for (Complex s : set.values) max_mod = std::max(max_mod, std::abs(s));
    set.radius_bound = max_mod + 1.0;
    return set;
}

}  // namespace hypwander
