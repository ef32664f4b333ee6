#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <regex>
#include <sstream>

#include "hypwander/hypwander.hpp"

namespace hypwander::cli {

namespace {

using io::format_fixed;
using io::format_real;

struct MapOptions {
    std::string family = "exp";
    double lambda = 1.0;
    double a = 0.0;
    std::string zeros = "n^2";
    int truncation = 40;
    std::string poly;
};

struct DomainOptions {
    std::string kind = "slit";
    double base = 0.0;
    std::string direction = "+";
    double r_in = 0.5;
    double r_out = 2.0;
    double p = 0.5;
    double r = 0.5;
};

double parse_real(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidArgument("cannot parse number '" + s + "'");
    }
    if (used != s.size()) throw InvalidArgument("cannot parse number '" + s + "'");
    return v;
}

/// "x" or "x,y"
Complex parse_complex(const std::string& s) {
    const auto comma = s.find(',');
    if (comma == std::string::npos) return {parse_real(s), 0.0};
    return {parse_real(s.substr(0, comma)), parse_real(s.substr(comma + 1))};
}

Direction parse_direction(const std::string& s) {
    if (s == "+" || s == "plus" || s == "+1") return Direction::Plus;
    if (s == "-" || s == "minus" || s == "-1") return Direction::Minus;
    throw InvalidArgument("direction must be + or - (got '" + s + "')");
}

/// "[c*]n^p[*pi^2]", e.g. n^2, n^2pi^2, 3*n^1.5
ZeroLaw parse_zero_law(const std::string& s) {
    static const std::regex pattern(R"(^(?:([0-9.eE+\-]+)\*)?n\^([0-9.]+)(\*?pi\^2)?$)");
    std::smatch m;
    if (!std::regex_match(s, m, pattern)) throw InvalidArgument("cannot parse zero sequence '" + s + "'");
    ZeroLaw law;
    law.scale = m[1].matched ? parse_real(m[1].str()) : 1.0;
    law.exponent = parse_real(m[2].str());
    if (m[3].matched) law.scale *= std::numbers::pi * std::numbers::pi;
    if (!(law.scale > 0.0) || !(law.exponent > 0.0)) throw InvalidArgument("zero sequence needs positive scale and exponent");
    return law;
}

Polynomial parse_poly(const std::string& s) {
    std::vector<double> coeffs;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) coeffs.push_back(parse_real(item));
    return Polynomial(std::move(coeffs));
}

EntireMap build_map(const MapOptions& o) {
    EntireMap base = EntireMap::exp();
    if (o.family == "exp") {
    } else if (o.family == "sinh-over-z") {
        base = EntireMap::sinh_over_z(o.lambda, o.a);
    } else if (o.family == "lp-product") {
        if (o.truncation < 2) throw InvalidArgument("--N must be at least 2");
        base = EntireMap::lp_product(parse_zero_law(o.zeros), o.truncation);
    } else {
        throw InvalidArgument("unknown map family '" + o.family + "'");
    }
    if (o.poly.empty()) return base;
    return precompose_poly(base, parse_poly(o.poly));
}

ModelDomain build_domain(const DomainOptions& o) {
    ModelDomain d;
    if (o.kind == "disk") d = UnitDisk{};
    else if (o.kind == "half-plane") d = UpperHalfPlane{};
    else if (o.kind == "punctured-disk") d = PuncturedDisk{};
    else if (o.kind == "slit") d = SlitPlane{o.base, parse_direction(o.direction) == Direction::Plus ? 1 : -1};
    else if (o.kind == "annulus") d = Annulus{o.r_in, o.r_out};
    else if (o.kind == "disk-minus-point") d = DiskMinusPoint{o.p};
    else if (o.kind == "disk-radius") d = DiskOfRadius{o.r};
    else throw InvalidArgument("unknown domain '" + o.kind + "'");
    validate(d);
    return d;
}

void add_map_options(CLI::App* sub, MapOptions& o) {
    sub->add_option("--map", o.family, "Map family: exp, sinh-over-z, lp-product")
        ->check(CLI::IsMember({"exp", "sinh-over-z", "lp-product"}));
    sub->add_option("--lambda", o.lambda, "sinh-over-z: factor lambda in lambda*sinh(z)/z + a");
    sub->add_option("--a", o.a, "sinh-over-z: additive constant a");
    sub->add_option("--zeros", o.zeros, "lp-product: zero sequence [c*]n^p[*pi^2], e.g. n^2pi^2");
    sub->add_option("--N", o.truncation, "lp-product: number of factors kept");
    sub->add_option("--poly", o.poly, "Precompose with the real polynomial c0,c1,...,cd (ascending)");
}

void add_domain_options(CLI::App* sub, DomainOptions& o) {
    sub->add_option("--domain", o.kind,
                    "Model domain: disk, half-plane, punctured-disk, slit, annulus, disk-minus-point, disk-radius")
        ->check(CLI::IsMember({"disk", "half-plane", "punctured-disk", "slit", "annulus", "disk-minus-point",
                               "disk-radius"}));
    sub->add_option("--base", o.base, "slit: base point of the removed ray");
    sub->add_option("--direction", o.direction, "slit: ray direction + or -");
    sub->add_option("--r-in", o.r_in, "annulus: inner radius");
    sub->add_option("--r-out", o.r_out, "annulus: outer radius");
    sub->add_option("--p", o.p, "disk-minus-point: puncture in [0,1)");
    sub->add_option("--r", o.r, "disk-radius: radius");
}

std::vector<double> log_spaced(double lo, double hi, int count) {
    if (count < 1 || !(lo > 0.0) || !(lo <= hi)) throw InvalidArgument("log-spaced range needs 0 < min <= max, count >= 1");
    std::vector<double> xs;
    for (int k = 0; k < count; ++k)
        xs.push_back(count == 1 ? lo : (k == count - 1 ? hi : lo * std::pow(hi / lo, static_cast<double>(k) / (count - 1))));
    return xs;
}

std::vector<double> lin_spaced(double lo, double hi, int count) {
    if (count < 1 || !(lo <= hi)) throw InvalidArgument("range needs min <= max and count >= 1");
    std::vector<double> xs;
    for (int k = 0; k < count; ++k)
        xs.push_back(count == 1 ? lo : (k == count - 1 ? hi : lo + (hi - lo) * k / (count - 1)));
    return xs;
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::MaxIter: return "MaxIter";
        case Termination::EscapedToInfinity: return "EscapedToInfinity";
        case Termination::LeftDomain: return "LeftDomain";
    }
    return "?";
}

/// CSV sink: the --out file when given, else the summary stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
        if (path.empty()) return;
        file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
        if (!*file_) throw Error("cannot open output file '" + path + "'");
        os_ = file_.get();
    }
    std::ostream& stream() { return *os_; }
    void close() {
        if (file_) {
            file_->close();
            if (!*file_) throw Error("failed writing output file");
        }
    }

private:
    std::unique_ptr<std::ofstream> file_;
    std::ostream* os_;
};

struct Command {
    CLI::App* app = nullptr;
    std::function<int(std::ostream& csv, std::ostream& out)> body;
    std::string out_path;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"hypwander: hyperbolic-metric estimates and dynamics of transcendental entire maps"};
    app.require_subcommand(1);
    std::vector<Command> commands;
    const auto add = [&](const std::string& name, const std::string& help) -> Command& {
        Command& c = commands.emplace_back();
        c.app = app.add_subcommand(name, help);
        c.app->add_option("--out", c.out_path, "Write CSV here instead of stdout");
        return c;
    };
    commands.reserve(16);

    // metric-bounds
    double bounds_R = 0.0, bounds_min = 0.0, bounds_max = 0.0;
    int bounds_count = 0;
    {
        Command& c = add("metric-bounds",
                         "Sharp two-sided bounds on the density of V relative to U at a point of U-distance R "
                         "from U\\V, with R~ = (e^R-1)/(e^R+1)");
        c.app->add_option("--R", bounds_R, "Hyperbolic distance R > 0");
        c.app->add_option("--R-min", bounds_min, "Sweep: smallest R");
        c.app->add_option("--R-max", bounds_max, "Sweep: largest R");
        c.app->add_option("--count", bounds_count, "Sweep: number of log-spaced R values");
        c.body = [&](std::ostream& csv_os, std::ostream& o) {
            std::vector<double> Rs;
            if (bounds_count > 0) Rs = log_spaced(bounds_min, bounds_max, bounds_count);
            else Rs = {bounds_R};
            io::CsvWriter csv(csv_os, "metric-bounds");
            csv.header({"R", "lo", "hi", "r_tilde", "lo_minus_1", "hi_minus_1"});
            std::optional<ComparisonBounds> first;
            for (double R : Rs) {
                const auto b = comparison_bounds(R);
                if (!first) first = b;
                csv.row({R, b.bounds.lo, b.bounds.hi, b.r_tilde, b.lower_excess, b.upper_excess});
            }
            o << "R=" << format_fixed(Rs.front(), 4) << " lo=" << format_fixed(first->bounds.lo, 4)
              << " hi=" << format_fixed(first->bounds.hi, 4) << " r_tilde=" << format_fixed(first->r_tilde, 4) << "\n";
            return kOk;
        };
    }

    // density
    DomainOptions dens_dom;
    std::vector<std::string> dens_points;
    {
        Command& c = add("density",
                         "Exact hyperbolic density of a model domain, bracketed by the Koebe-type bounds "
                         "1/(2d) <= rho <= 2/d (lower bound for simply connected domains only)");
        add_domain_options(c.app, dens_dom);
        c.app->add_option("--z", dens_points, "Point x,y (repeatable; use --z=-1,0 for negative x)")->required();
        c.body = [&](std::ostream& csv_os, std::ostream& o) {
            const ModelDomain d = build_domain(dens_dom);
            const auto general = GeneralDomain::from(d);
            io::CsvWriter csv(csv_os, "density");
            csv.meta("domain", describe(d));
            csv.header({"re", "im", "density", "koebe_lo", "koebe_hi"});
            double first = 0.0;
            for (std::size_t i = 0; i < dens_points.size(); ++i) {
                const Complex z = parse_complex(dens_points[i]);
                const double rho = density(d, z);
                const Interval k = density_bounds(general, z);
                if (i == 0) first = rho;
                csv.row({format_real(z.real()), format_real(z.imag()), format_real(rho),
                         k.lower_known ? format_real(k.lo) : "unknown", format_real(k.hi)});
            }
            o << "domain=" << describe(d) << " density=" << format_real(first) << "\n";
            return kOk;
        };
    }

    // curve-length
    DomainOptions curve_dom;
    std::string curve_kind = "segment", curve_from = "0", curve_to = "0.5", curve_center = "0", curve_points;
    double curve_radius = 1.0, curve_t0 = 0.0, curve_t1 = std::numbers::pi, curve_tol = 1e-9;
    {
        Command& c = add("curve-length",
                         "Hyperbolic length of a segment, polyline or circular arc by adaptive Simpson quadrature "
                         "of rho |dz|");
        add_domain_options(c.app, curve_dom);
        c.app->add_option("--curve", curve_kind, "segment, polyline or arc")
            ->check(CLI::IsMember({"segment", "polyline", "arc"}));
        c.app->add_option("--from", curve_from, "segment: start x,y");
        c.app->add_option("--to", curve_to, "segment: end x,y");
        c.app->add_option("--points", curve_points, "polyline: x,y;x,y;...");
        c.app->add_option("--center", curve_center, "arc: center x,y");
        c.app->add_option("--radius", curve_radius, "arc: radius");
        c.app->add_option("--theta0", curve_t0, "arc: start angle");
        c.app->add_option("--theta1", curve_t1, "arc: end angle");
        c.app->add_option("--tol", curve_tol, "absolute error target");
        c.body = [&](std::ostream& csv_os, std::ostream& o) {
            const ModelDomain d = build_domain(curve_dom);
            std::vector<Curve> pieces;
            if (curve_kind == "segment") {
                pieces.push_back(Curve::segment(parse_complex(curve_from), parse_complex(curve_to)));
            } else if (curve_kind == "arc") {
                if (!(curve_radius > 0.0)) throw InvalidArgument("--radius must be positive");
                pieces.push_back(Curve::arc(parse_complex(curve_center), curve_radius, curve_t0, curve_t1));
            } else {
                std::vector<Complex> vertices;
                std::stringstream ss(curve_points);
                std::string item;
                while (std::getline(ss, item, ';')) vertices.push_back(parse_complex(item));
                if (vertices.size() < 2) throw InvalidArgument("--points needs at least two vertices");
                pieces = polyline(vertices);
            }
            const double len = curve_length(d, pieces, curve_tol);
            io::CsvWriter csv(csv_os, "curve-length");
            csv.meta("domain", describe(d));
            csv.meta("curve", curve_kind);
            csv.header({"length", "tol"});
            csv.row({len, curve_tol});
            o << "length=" << format_real(len) << "\n";
            return kOk;
        };
    }

    // orbit
    MapOptions orbit_map;
    std::string orbit_w = "0";
    int orbit_n = 50;
    double orbit_resc = kDefaultEscapeRadius;
    {
        Command& c = add("orbit", "Forward orbit of a point until escape (|w_n| > R_esc or overflow) or n_max");
        add_map_options(c.app, orbit_map);
        c.app->add_option("--w", orbit_w, "Start point x,y");
        c.app->add_option("--n-max", orbit_n, "Iteration budget");
        c.app->add_option("--r-esc", orbit_resc, "Escape radius");
        c.body = [&](std::ostream& csv_os, std::ostream& o) {
            const EntireMap m = build_map(orbit_map);
            const auto trace = iterate_orbit(m, parse_complex(orbit_w), orbit_n, orbit_resc);
            io::CsvWriter csv(csv_os, "orbit");
            csv.meta("map", m.name());
            csv.header({"n", "re", "im", "modulus"});
            for (std::size_t n = 0; n < trace.points.size(); ++n)
                csv.row({static_cast<double>(n), trace.points[n].real(), trace.points[n].imag(), std::abs(trace.points[n])});
            o << "termination=" << to_string(trace.termination) << " step=" << trace.exit_step << "\n";
            return kOk;
        };
    }

    // delta
    MapOptions delta_map;
    DomainOptions delta_dom;
    std::string delta_w = "-2,2";
    int delta_n = 30;
    {
        Command& c = add("delta",
                         "Hyperbolic derivatives eta_n = ||Df(w_n)||_U along an orbit and their cumulative "
                         "products delta_n = ||Df^n(w)||_U (nondecreasing for exp on C minus [0,inf))");
        add_map_options(c.app, delta_map);
        add_domain_options(c.app, delta_dom);
        c.app->add_option("--w", delta_w, "Start point x,y inside the domain");
        c.app->add_option("--n-max", delta_n, "Iteration budget");
        c.body = [&](std::ostream& csv_os, std::ostream& o) {
            const EntireMap m = build_map(delta_map);
            const ModelDomain d = build_domain(delta_dom);
            const auto trace = delta_sequence(m, d, parse_complex(delta_w), delta_n);
            io::CsvWriter csv(csv_os, "delta");
            csv.meta("map", m.name());
            csv.meta("domain", describe(d));
            csv.header({"n", "re", "im", "eta", "log_delta"});
            bool monotone = true;
            for (std::size_t n = 0; n < trace.log_deltas.size(); ++n) {
                const double eta = n < trace.etas.size() ? trace.etas[n] : std::nan("");
                csv.row({static_cast<double>(n), trace.points[n].real(), trace.points[n].imag(), eta, trace.log_deltas[n]});
                if (n > 0 && trace.log_deltas[n] < trace.log_deltas[n - 1] + std::log1p(-1e-9)) monotone = false;
            }
            o << "steps=" << trace.etas.size() << " termination=" << to_string(trace.termination)
              << " monotone=" << (monotone ? "yes" : "no") << "\n";
            return kOk;
        };
    }

    // expansion-grid
    double eg_re0 = -50.0, eg_re1 = -0.1, eg_im0 = 0.05, eg_im1 = 2.0 * std::numbers::pi - 0.05;
    int eg_nx = 100, eg_ny = 100;
    {
        Command& c = add("expansion-grid",
                         "Expansion of exp in the hyperbolic metric of C minus [0,inf): checks "
                         "||D exp(z)|| >= |Re z|/4 on a grid in the left half plane");
        c.app->add_option("--re-min", eg_re0);
        c.app->add_option("--re-max", eg_re1);
        c.app->add_option("--im-min", eg_im0);
        c.app->add_option("--im-max", eg_im1);
        c.app->add_option("--nx", eg_nx);
        c.app->add_option("--ny", eg_ny);
        c.body = [&](std::ostream& csv_os, std::ostream& o) {
            io::CsvWriter csv(csv_os, "expansion-grid");
            csv.header({"re", "im", "value", "bound", "ok"});
            int failures = 0;
            double min_ratio = std::numeric_limits<double>::infinity();
            for (double y : lin_spaced(eg_im0, eg_im1, eg_ny))
                for (double x : lin_spaced(eg_re0, eg_re1, eg_nx)) {
                    const auto chk = exp_expansion_check({x, y});
                    if (!chk.ok) ++failures;
                    min_ratio = std::min(min_ratio, chk.value / chk.bound);
                    csv.row({format_real(x), format_real(y), format_real(chk.value), format_real(chk.bound),
                             chk.ok ? "1" : "0"});
                }
            o << "points=" << eg_nx * eg_ny << " failures=" << failures
              << " min_value_over_bound=" << format_real(min_ratio) << "\n";
            return failures ? kViolated : kOk;
        };
    }

    // singular-escape
    MapOptions se_map;
    int se_n = 50, se_windows = 40;
    double se_target = 1e8;
    {
        Command& c = add("singular-escape",
                         "Escape of the singular orbits: first n with |f^n(s)| > R_target for every singular "
                         "value s, and whether the escape is uniform");
        add_map_options(c.app, se_map);
        c.app->add_option("--n-max", se_n);
        c.app->add_option("--r-target", se_target);
        c.app->add_option("--windows", se_windows, "Critical-point search windows");
        c.body = [&](std::ostream& csv_os, std::ostream& o) {
            const EntireMap m = build_map(se_map);
            const auto rep = singular_escape_report(m, se_n, se_target, SingularSearch{se_windows});
            io::CsvWriter csv(csv_os, "singular-escape");
            csv.meta("map", m.name());
            csv.meta("r_target", se_target);
            csv.header({"index", "s_re", "s_im", "escape_step", "max_modulus"});
            for (std::size_t i = 0; i < rep.orbits.size(); ++i) {
                const auto& orb = rep.orbits[i];
                csv.row({std::to_string(i), format_real(orb.value.real()), format_real(orb.value.imag()),
                         orb.escape_step ? std::to_string(*orb.escape_step) : "none", format_real(orb.max_modulus)});
            }
            const bool uniform = rep.verdict == EscapeVerdict::Uniform;
            o << "verdict=" << (uniform ? "Uniform" : "NotEscaping") << " singular_values=" << rep.orbits.size();
            if (uniform) o << " slowest_step=" << rep.slowest_step;
            else o << " witness=" << format_real(rep.witness->real()) << "," << format_real(rep.witness->imag());
            o << "\n";
            return uniform ? kOk : kViolated;
        };
    }

    // sector-check
    MapOptions sc_map;
    std::string sc_sigma = "+";
    double sc_r = 2.0, sc_xmax = 500.0, sc_kmax = 10.0;
    int sc_samples = 200;
    {
        Command& c = add("sector-check",
                         "Real sector condition through the logarithmic-derivative criterion "
                         "x|f'(sx)| <= K |f(sx)| log|f(sx)| on [r, x_max]");
        add_map_options(c.app, sc_map);
        c.app->add_option("--sigma", sc_sigma, "Direction + or - (use --sigma=-)");
        c.app->add_option("--r", sc_r);
        c.app->add_option("--xmax", sc_xmax);
        c.app->add_option("--samples", sc_samples);
        c.app->add_option("--k-max", sc_kmax, "Largest acceptable K");
        c.body = [&](std::ostream& csv_os, std::ostream& o) {
            const EntireMap m = build_map(sc_map);
            const auto rep = sector_report(m, parse_direction(sc_sigma), sc_r, sc_xmax, sc_samples, sc_kmax);
            io::write_sector_report_csv(csv_os, rep, m.name());
            o << "verdict=" << to_string(rep.verdict) << " K=" << format_real(rep.sup_ratio);
            if (rep.witness) o << " witness=" << format_real(*rep.witness);
            o << "\n";
            return rep.verdict == SectorVerdict::Violated ? kViolated : kOk;
        };
    }

    // tract-sandwich
    MapOptions ts_map;
    std::string ts_sigma = "+";
    double ts_R = std::numbers::e, ts_x0 = 3.0, ts_x1 = 600.0;
    int ts_count = 100;
    {
        Command& c = add("tract-sandwich",
                         "Distance to the tract boundary enclosed by 1/(4Q) <= dist <= 2/Q with "
                         "Q = |f'|/(|f| log|f|), sampled along the real axis");
        add_map_options(c.app, ts_map);
        c.app->add_option("--sigma", ts_sigma);
        c.app->add_option("--R", ts_R, "Radius R >= 1 + max|s|");
        c.app->add_option("--x-min", ts_x0);
        c.app->add_option("--x-max", ts_x1);
        c.app->add_option("--count", ts_count);
        c.body = [&](std::ostream& csv_os, std::ostream& o) {
            const EntireMap m = build_map(ts_map);
            const double s = sign(parse_direction(ts_sigma));
            io::CsvWriter csv(csv_os, "tract-sandwich");
            csv.meta("map", m.name());
            csv.meta("R", ts_R);
            csv.header({"x", "dist_lo", "dist_hi"});
            const auto xs = log_spaced(ts_x0, ts_x1, ts_count);
            for (double x : xs) {
                const Interval iv = tract_distance_sandwich(m, {s * x, 0.0}, ts_R);
                csv.row({x, iv.lo, iv.hi});
            }
            o << "points=" << xs.size() << "\n";
            return kOk;
        };
    }

    // lp-check
    std::string lp_zeros = "n^2";
    int lp_N = 3;
    std::vector<double> lp_x;
    {
        Command& c = add("lp-check",
                         "Logarithmic-derivative identity x f'/f = sum(1 - 1/w_n), w_n = (x_n + x)/x_n, and the "
                         "bound x f'/f <= log f for products with negative real zeros");
        c.app->add_option("--zeros", lp_zeros, "Zero sequence [c*]n^p[*pi^2]");
        c.app->add_option("--N", lp_N, "Number of zeros");
        c.app->add_option("--x", lp_x, "Evaluation point x > 0 (repeatable)")->required();
        c.body = [&](std::ostream& csv_os, std::ostream& o) {
            if (lp_N < 1) throw InvalidArgument("--N must be at least 1");
            const auto zeros = parse_zero_law(lp_zeros).first(lp_N);
            io::CsvWriter csv(csv_os, "lp-check");
            csv.meta("zeros", lp_zeros);
            csv.meta("N", std::to_string(lp_N));
            csv.header({"x", "lhs", "rhs", "bound", "residual", "bound_holds"});
            bool all_hold = true;
            std::optional<LpIdentityCheck> first;
            for (double x : lp_x) {
                const auto chk = lp_logder_identity_check(zeros, x);
                if (!first) first = chk;
                all_hold = all_hold && chk.bound_holds;
                csv.row({format_real(x), format_real(chk.lhs), format_real(chk.rhs), format_real(chk.bound),
                         format_real(chk.residual), chk.bound_holds ? "1" : "0"});
            }
            o << "lhs " << format_fixed(first->lhs, 6) << " rhs " << format_fixed(first->rhs, 6) << " bound "
              << format_fixed(first->bound, 6) << "\n";
            return all_hold ? kOk : kViolated;
        };
    }

    // preimage-scan
    MapOptions pre_map;
    std::string pre_w = "1", pre_sigma = "+";
    double pre_theta = 0.5, pre_rprime = 5.0, pre_xmax = 50.0, pre_tol = 1e-9;
    int pre_per_period = 4;
    {
        Command& c = add("preimage-scan",
                         "Preimages f^{-1}(w) inside a truncated sector {sx + iy : x > R', |y| < theta x}, "
                         "by seeded Newton iteration");
        add_map_options(c.app, pre_map);
        c.app->add_option("--w", pre_w, "Target value x,y");
        c.app->add_option("--sigma", pre_sigma);
        c.app->add_option("--theta", pre_theta);
        c.app->add_option("--r-prime", pre_rprime);
        c.app->add_option("--x-max", pre_xmax, "Seed grid extent");
        c.app->add_option("--per-period", pre_per_period, "Seeds per 2 pi");
        c.app->add_option("--tol", pre_tol, "Residual tolerance relative to max(1,|w|)");
        c.body = [&](std::ostream& csv_os, std::ostream& o) {
            const EntireMap m = build_map(pre_map);
            const Complex w = parse_complex(pre_w);
            const TruncatedSector sector{parse_direction(pre_sigma), pre_theta, pre_rprime};
            const auto roots = preimage_scan(m, w, sector, PreimageSeeds{pre_xmax, pre_per_period, 100}, pre_tol);
            io::CsvWriter csv(csv_os, "preimage-scan");
            csv.meta("map", m.name());
            csv.header({"re", "im", "residual"});
            for (Complex z : roots) csv.row({z.real(), z.imag(), std::abs(eval(m, z) - w)});
            o << "preimages=" << roots.size() << "\n";
            return kOk;
        };
    }

    // escape-grid
    MapOptions grid_map;
    Rect grid_rect{-4.0, 4.0, -4.0, 4.0};
    int grid_nx = 100, grid_ny = 100, grid_n = 50;
    unsigned grid_threads = 0;
    double grid_resc = kDefaultEscapeRadius;
    std::string grid_ppm;
    {
        Command& c = add("escape-grid",
                         "Escape-time classification (escaped / bounded / left-window) on a pixel grid, as CSV "
                         "and binary PPM");
        add_map_options(c.app, grid_map);
        c.app->add_option("--x-min", grid_rect.x_min);
        c.app->add_option("--x-max", grid_rect.x_max);
        c.app->add_option("--y-min", grid_rect.y_min);
        c.app->add_option("--y-max", grid_rect.y_max);
        c.app->add_option("--nx", grid_nx);
        c.app->add_option("--ny", grid_ny);
        c.app->add_option("--n-max", grid_n);
        c.app->add_option("--r-esc", grid_resc);
        c.app->add_option("--threads", grid_threads, "Worker threads (0 = all cores)");
        c.app->add_option("--ppm", grid_ppm, "Also write a P6 image here");
        c.body = [&](std::ostream& csv_os, std::ostream& o) {
            const EntireMap m = build_map(grid_map);
            const auto grid = escape_grid(m, grid_rect, grid_nx, grid_ny, grid_n, grid_resc, grid_threads);
            io::write_escape_grid_csv(csv_os, grid, m.name());
            if (!grid_ppm.empty()) {
                std::ofstream img(grid_ppm, std::ios::binary | std::ios::trunc);
                if (!img) throw Error("cannot open output file '" + grid_ppm + "'");
                io::write_escape_grid_ppm(img, grid);
                if (!img) throw Error("failed writing image");
            }
            o << "escaped=" << format_real(grid.fraction(PixelClass::Escaped))
              << " bounded=" << format_real(grid.fraction(PixelClass::Bounded))
              << " left_window=" << format_real(grid.fraction(PixelClass::LeftWindow)) << "\n";
            return kOk;
        };
    }

    std::vector<std::string> argv_store{"hypwander"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        out << sub->help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kUsage;
    }

    for (auto& c : commands) {
        if (!c.app->parsed()) continue;
        try {
            // Buffer both streams so a failing run leaves no partial CSV behind.
            std::ostringstream csv, summary;
            const int code = c.body(csv, summary);
            Sink sink(c.out_path, out);
            sink.stream() << csv.str();
            sink.close();
            out << summary.str();
            return code;
        } catch (const InvalidArgument& e) {
            err << "usage error: " << e.what() << "\n";
            return kUsage;
        } catch (const DomainViolation& e) {
            err << "precondition violated: " << e.what() << "\n";
            return kUsage;
        } catch (const NotInTract& e) {
            err << "precondition violated (not in tract): " << e.what() << "\n";
            return kUsage;
        } catch (const std::exception& e) {
            err << "numeric error: " << e.what() << "\n";
            return kNumeric;
        }
    }
    return kUsage;
}

}  // namespace hypwander::cli
