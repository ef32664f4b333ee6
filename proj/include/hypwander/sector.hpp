#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hypwander/error.hpp"
#include "hypwander/interval.hpp"
#include "hypwander/maps.hpp"

namespace hypwander {

enum class Direction : int { Plus = 1, Minus = -1 };

inline double sign(Direction d) { return d == Direction::Plus ? 1.0 : -1.0; }
inline const char* to_string(Direction d) { return d == Direction::Plus ? "+" : "-"; }

struct DirectionSet {
    bool plus = false;
    bool minus = false;

    bool contains(Direction d) const { return d == Direction::Plus ? plus : minus; }
    void insert(Direction d) { (d == Direction::Plus ? plus : minus) = true; }
    bool empty() const { return !plus && !minus; }
    bool subset_of(const DirectionSet& other) const {
        return (!plus || other.plus) && (!minus || other.minus);
    }
    bool operator==(const DirectionSet&) const = default;
};

/// Log-spaced probe points x_min .. x_max.
struct ProbeSchedule {
    double x_min = 1.0;
    double x_max = 1e3;
    int probes = 64;

    double at(int k) const {
        if (probes == 1) return x_min;
        return x_min * std::pow(x_max / x_min, static_cast<double>(k) / (probes - 1));
    }
};

struct Sigma0Result {
    DirectionSet directions;
    std::optional<double> plus_witness;   // probe x where growth along +x failed
    std::optional<double> minus_witness;  // same along -x
};

/// Directions sigma with |f(sigma x)| -> infinity, decided on the final half of a
/// probe schedule: there |f(sigma x_k)| must increase strictly from probe to probe and
/// exceed x_k. The first probe breaking either rule is returned as a witness.
inline Sigma0Result sigma0(const EntireMap& map, const ProbeSchedule& schedule = {}) {
    if (!map.is_real()) throw InvalidArgument("direction tests need a real map");
    if (schedule.probes < 2 || !(0.0 < schedule.x_min && schedule.x_min < schedule.x_max))
        throw InvalidArgument("probe schedule needs >= 2 probes and 0 < x_min < x_max");
    Sigma0Result out;
    for (Direction d : {Direction::Plus, Direction::Minus}) {
        std::optional<double> witness;
        double previous = -std::numeric_limits<double>::infinity();
        for (int k = schedule.probes / 2; k < schedule.probes; ++k) {
            const double x = schedule.at(k);
            const double log_mod = log_eval(map, Complex(sign(d) * x, 0.0)).real();
            if (!(log_mod > std::log(x)) || !(log_mod > previous)) {
                witness = x;
                break;
            }
            previous = log_mod;
        }
        if (witness)
            (d == Direction::Plus ? out.plus_witness : out.minus_witness) = witness;
        else
            out.directions.insert(d);
    }
    return out;
}

struct SigmaResult {
    DirectionSet directions;
    bool inconclusive = false;  // no real singular orbit crossed the threshold
};

/// Directions in which some real singular orbit leaves {|x| <= threshold}, with the
/// sign taken from the real part.
inline SigmaResult sigma(const EntireMap& map, int n_iter, double threshold = 1e8,
                         const SingularSearch& search = {}) {
    if (!map.is_real()) throw InvalidArgument("direction tests need a real map");
    if (n_iter < 1) throw InvalidArgument("n_iter must be at least 1");
    SigmaResult out;
    for (Complex s : singular_values(map, search).values) {
        if (std::abs(s.imag()) > 1e-12 * (1.0 + std::abs(s))) continue;
        Complex z(s.real(), 0.0);
        for (int n = 0; n <= n_iter; ++n) {
            if (std::abs(z) > threshold) {
                out.directions.insert(z.real() > 0 ? Direction::Plus : Direction::Minus);
                break;
            }
            if (n == n_iter) break;
            try {
                z = Complex(eval(map, z).real(), 0.0);
            } catch (const EscapedToInfinity&) {
                // The sign of the overflowing value is read off the argument of log f.
                const double arg = log_eval(map, z).imag();
                out.directions.insert(std::cos(arg) > 0 ? Direction::Plus : Direction::Minus);
                break;
            }
        }
    }
    out.inconclusive = out.directions.empty();
    return out;
}

/// x |f'(sigma x)| / (|f(sigma x)| log|f(sigma x)|). NotInTract unless |f(sigma x)| > e.
inline double log_der_ratio(const EntireMap& map, Direction d, double x) {
    const Complex z(sign(d) * x, 0.0);
    const double log_mod = log_eval(map, z).real();
    if (!(log_mod > 1.0)) throw NotInTract("|f(" + std::to_string(z.real()) + ")| <= e");
    return x * std::abs(log_derivative(map, z)) / log_mod;
}

enum class SectorVerdict { Satisfied, Violated, Inconclusive };

inline const char* to_string(SectorVerdict v) {
    switch (v) {
        case SectorVerdict::Satisfied: return "Satisfied";
        case SectorVerdict::Violated: return "Violated";
        case SectorVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

struct SectorReport {
    Direction direction = Direction::Plus;
    double r = 0.0;
    double x_max = 0.0;
    int samples = 0;
    double k_max = 0.0;
    std::vector<std::pair<double, double>> ratios;  // (x, ratio)
    double sup_ratio = 0.0;
    SectorVerdict verdict = SectorVerdict::Inconclusive;
    std::optional<double> witness;
};

/// Samples log_der_ratio at `samples` log-spaced x in [r, x_max].
///
/// Samples before |f| first exceeds e are skipped. Violated if a later sample drops
/// back below e (|f| not growing) or any ratio exceeds k_max; Inconclusive with fewer
/// than two usable samples; otherwise Satisfied with K = sup of the ratios.
inline SectorReport sector_report(const EntireMap& map, Direction d, double r, double x_max, int samples,
                                  double k_max) {
    if (samples < 2) throw InvalidArgument("sector report needs at least two samples");
    if (!(0.0 < r && r < x_max)) throw InvalidArgument("sector report needs 0 < r < x_max");
    if (!(k_max > 0.0)) throw InvalidArgument("K_max must be positive");
    SectorReport rep{d, r, x_max, samples, k_max, {}, 0.0, SectorVerdict::Inconclusive, std::nullopt};
    std::optional<double> fell_back;
    for (int k = 0; k < samples; ++k) {
        const double x = k == samples - 1 ? x_max : r * std::pow(x_max / r, static_cast<double>(k) / (samples - 1));
        try {
            rep.ratios.emplace_back(x, log_der_ratio(map, d, x));
        } catch (const NotInTract&) {
            if (!rep.ratios.empty() && !fell_back) fell_back = x;
        }
    }
    if (rep.ratios.size() < 2) return rep;
    for (const auto& [x, q] : rep.ratios) rep.sup_ratio = std::max(rep.sup_ratio, q);
    if (fell_back) {
        rep.verdict = SectorVerdict::Violated;
        rep.witness = fell_back;
        return rep;
    }
    for (const auto& [x, q] : rep.ratios) {
        if (q > k_max) {
            rep.verdict = SectorVerdict::Violated;
            rep.witness = x;
            return rep;
        }
    }
    rep.verdict = SectorVerdict::Satisfied;
    return rep;
}

/// Enclosure of dist(z, boundary of the tract containing z), from
/// 1/(4 dist) <= |f'|/(|f| log|f|) <= 2/dist. Needs R >= 1 + radius_bound(S(f)) and
/// |f(z)| > R^2.
inline Interval tract_distance_sandwich(const EntireMap& map, Complex z, double R,
                                        const SingularSearch& search = {}) {
    const double radius = singular_values(map, search).radius_bound;
    if (!(R >= 1.0 + radius))
        throw NotInTract("R must be at least 1 + " + std::to_string(radius));
    const double log_mod = log_eval(map, z).real();
    if (!(log_mod > 2.0 * std::log(R))) throw NotInTract("|f(z)| <= R^2");
    const double q = std::abs(log_derivative(map, z)) / log_mod;
    if (!(q > 0.0) || !std::isfinite(q)) throw NotInTract("logarithmic derivative vanishes at z");
    return Interval(1.0 / (4.0 * q), 2.0 / q);
}

/// {sigma x + i y : x > r_prime, |y| < theta x}
struct TruncatedSector {
    Direction direction = Direction::Plus;
    double theta = 0.5;
    double r_prime = 1.0;

    void validate() const {
        if (!(theta > 0.0) || !(r_prime > 0.0)) throw InvalidArgument("sector needs theta > 0 and R' > 0");
    }
    bool contains(Complex z) const {
        const double x = sign(direction) * z.real();
        return x > r_prime && std::abs(z.imag()) < theta * x;
    }
};

struct SectorGrid {
    double x_max = 100.0;
    int nx = 64;  // log-spaced in (r_prime, x_max]
    int ny = 33;  // linear across |y| < theta x
};

struct DirectSectorResult {
    bool holds = true;
    double min_log_modulus = std::numeric_limits<double>::infinity();
    Complex argmin;
    std::optional<Complex> witness;  // first sample with |f| <= R
};

/// Checks |f| > R on a log x linear sample of the truncated sector.
inline DirectSectorResult direct_sector_test(const EntireMap& map, const TruncatedSector& sector, double R,
                                             const SectorGrid& grid) {
    sector.validate();
    if (!(R > 0.0)) throw InvalidArgument("R must be positive");
    if (!(grid.x_max > sector.r_prime) || grid.nx < 1 || grid.ny < 1)
        throw InvalidArgument("sector grid needs x_max > R' and positive resolution");
    DirectSectorResult out;
    const double log_r = std::log(R);
    for (int i = 0; i < grid.nx; ++i) {
        const double x = sector.r_prime * std::pow(grid.x_max / sector.r_prime, (i + 1.0) / grid.nx);
        for (int j = 0; j < grid.ny; ++j) {
            const double y = sector.theta * x * (2.0 * (j + 0.5) / grid.ny - 1.0);
            const Complex z(sign(sector.direction) * x, y);
            const double log_mod = log_eval(map, z).real();
            if (log_mod < out.min_log_modulus) {
                out.min_log_modulus = log_mod;
                out.argmin = z;
            }
            if (!(log_mod > log_r) && !out.witness) {
                out.holds = false;
                out.witness = z;
            }
        }
    }
    return out;
}

struct PreimageSeeds {
    double x_max = 50.0;
    int per_period = 4;  // seed spacing is 2 pi / per_period in both directions
    int max_newton = 100;
};

/// Solutions of f(z) = w inside the truncated sector, found by Newton's method on
/// log f(z) - log w from a rectangular seed grid over the sector. A root is kept when
/// |f(z) - w| < tol * max(1, |w|); roots closer than 10 tol (1 + |z|) are merged.
/// Non-converging seeds are dropped silently.
inline std::vector<Complex> preimage_scan(const EntireMap& map, Complex w, const TruncatedSector& sector,
                                          const PreimageSeeds& seeds, double tol) {
    sector.validate();
    if (!(tol > 0.0)) throw InvalidArgument("tolerance must be positive");
    if (seeds.per_period < 1 || !(seeds.x_max > sector.r_prime))
        throw InvalidArgument("seed grid needs x_max > R' and per_period >= 1");
    if (!std::isfinite(w.real()) || !std::isfinite(w.imag())) throw InvalidArgument("target must be finite");

    const double h = 2.0 * std::numbers::pi / seeds.per_period;
    const bool use_log = w != Complex(0.0);
    const Complex log_w = use_log ? std::log(w) : Complex(0.0);
    const double scale = std::max(1.0, std::abs(w));
    const double escape = 1e6 * (1.0 + seeds.x_max);

    const auto newton = [&](Complex z) -> std::optional<Complex> {
        for (int it = 0; it < seeds.max_newton; ++it) {
            Complex step;
            try {
                if (use_log) {
                    Complex F = log_eval(map, z) - log_w;
                    F.imag(std::remainder(F.imag(), 2.0 * std::numbers::pi));
                    step = F / log_derivative(map, z);
                } else {
                    step = eval(map, z) / deriv(map, z);
                }
            } catch (const EscapedToInfinity&) {
                return std::nullopt;
            }
            if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) return std::nullopt;
            z -= step;
            if (std::abs(z) > escape) return std::nullopt;
            if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
        }
        try {
            if (std::abs(eval(map, z) - w) < tol * scale) return z;
        } catch (const EscapedToInfinity&) {
        }
        return std::nullopt;
    };

    std::vector<Complex> roots;
    for (double x = sector.r_prime + 0.5 * h; x < seeds.x_max; x += h) {
        const int jmax = static_cast<int>(std::floor(sector.theta * x / h));
        for (int j = -jmax; j <= jmax; ++j) {
            const auto root = newton(Complex(sign(sector.direction) * x, j * h));
            if (!root || !sector.contains(*root)) continue;
            const bool seen = std::any_of(roots.begin(), roots.end(), [&](Complex r) {
                return std::abs(r - *root) <= 10.0 * tol * (1.0 + std::abs(*root));
            });
            if (!seen) roots.push_back(*root);
        }
    }
    std::sort(roots.begin(), roots.end(), [](Complex a, Complex b) {
        return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
    });
    return roots;
}

struct LpIdentityCheck {
    double lhs = 0.0;       // x f'(x)/f(x) via sum 1/(x_n + x)
    double rhs = 0.0;       // sum (1 - 1/w_n(x)), w_n = (x_n + x)/x_n
    double bound = 0.0;     // log f(x) = sum log w_n(x)
    double residual = 0.0;  // |lhs - rhs|
    bool bound_holds = false;
};

/// The logarithmic-derivative identity for prod (1 + x/x_n) and the estimate
/// x f'/f <= log f that follows from log y > 1 - 1/y.
inline LpIdentityCheck lp_logder_identity_check(std::span<const double> zeros, double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw InvalidArgument("identity check needs x > 0");
    if (zeros.empty()) throw InvalidArgument("identity check needs at least one zero");
    for (std::size_t i = 0; i < zeros.size(); ++i)
        if (!(zeros[i] > 0.0) || (i > 0 && zeros[i] < zeros[i - 1]))
            throw InvalidArgument("zeros must be positive and nondecreasing");

    LpIdentityCheck out;
    double derivative_sum = 0.0;
    for (double xn : zeros) derivative_sum += 1.0 / (xn + x);
    out.lhs = x * derivative_sum;
    // Summed from the other end so the two sides share no rounding path.
    for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
        const double wn = (*it + x) / *it;
        out.rhs += 1.0 - 1.0 / wn;
    }
    for (double xn : zeros) out.bound += std::log1p(x / xn);
    out.residual = std::abs(out.lhs - out.rhs);
    out.bound_holds = out.lhs <= out.bound;
    return out;
}

}  // namespace hypwander
