#include <gtest/gtest.h>

#include "hypwander/orbits.hpp"
#include "oracles.hpp"

using namespace hypwander;
using std::numbers::pi;

namespace {

const ModelDomain kSlit = SlitPlane{0.0, +1};

/// Fixed point of exp near 0.318 + 1.337i by Newton on e^z - z.
Complex exp_fixed_point() {
    Complex z(0.3, 1.3);
    for (int k = 0; k < 50; ++k) z -= (std::exp(z) - z) / (std::exp(z) - 1.0);
    return z;
}

}  // namespace

TEST(IterateOrbit, ExpFromTenEscapesInTwoSteps) {
    const auto t = iterate_orbit(EntireMap::exp(), 10.0, 5, 1e6);
    EXPECT_EQ(t.termination, Termination::EscapedToInfinity);
    EXPECT_LE(t.exit_step, 2u);
    EXPECT_NEAR(t.points[1].real(), std::exp(10.0), 1e-8);
}

TEST(IterateOrbit, ExpFromIPiRunsOffAlongTheRealAxis) {
    const auto t = iterate_orbit(EntireMap::exp(), Complex(0.0, pi), 20, 1e50);
    ASSERT_GE(t.points.size(), 4u);
    EXPECT_NEAR(t.points[1].real(), -1.0, 1e-15);
    EXPECT_NEAR(t.points[2].real(), std::exp(-1.0), 1e-15);
    for (std::size_t n = 2; n + 1 < t.points.size(); ++n) {
        EXPECT_LT(std::abs(t.points[n].imag()), 1e-12 * std::max(1.0, t.points[n].real()));
        EXPECT_GT(t.points[n + 1].real(), t.points[n].real());
    }
    EXPECT_EQ(t.termination, Termination::EscapedToInfinity);
}

TEST(IterateOrbit, SinhOverZRealOrbitIncreases) {
    // 5 -> 19.84 -> 1.04e7, and the third step overflows.
    const auto f = EntireMap::sinh_over_z(1.0, 5.0);
    const auto t = iterate_orbit(f, 5.0, 3, 1e300);
    ASSERT_EQ(t.points.size(), 3u);
    double x = 5.0;
    for (std::size_t n = 1; n < t.points.size(); ++n) {
        EXPECT_GT(t.points[n].real(), t.points[n - 1].real());
        EXPECT_EQ(t.points[n].imag(), 0.0);
        x = oracle::sinhc(x) + 5.0;
        EXPECT_NEAR(t.points[n].real() / x, 1.0, 1e-13);
    }
    EXPECT_EQ(t.termination, Termination::EscapedToInfinity);
    EXPECT_EQ(t.exit_step, 3u);
}

TEST(IterateOrbit, ConsecutivePointsAreImages) {
    const auto f = EntireMap::sinh_over_z(-0.7, 0.2);
    const auto t = iterate_orbit(f, Complex(0.3, 0.4), 30);
    for (std::size_t n = 0; n + 1 < t.points.size(); ++n) EXPECT_EQ(t.points[n + 1], eval(f, t.points[n]));
    const auto again = iterate_orbit(f, Complex(0.3, 0.4), 30);
    EXPECT_EQ(t.points, again.points);
}

TEST(IterateOrbit, RejectsBadArguments) {
    EXPECT_THROW((void)iterate_orbit(EntireMap::exp(), 0.0, 0), InvalidArgument);
    EXPECT_THROW((void)iterate_orbit(EntireMap::exp(), 0.0, 5, 0.0), InvalidArgument);
}

TEST(DeltaSequence, ZeroStepsGivesOne) {
    const auto t = delta_sequence(EntireMap::sinh_over_z(1.0, 0.0), UnitDisk{}, 0.2, 0);
    ASSERT_EQ(t.log_deltas.size(), 1u);
    EXPECT_EQ(t.delta(0), 1.0);
    EXPECT_TRUE(t.etas.empty());
}

TEST(DeltaSequence, ExpExamples) {
    const auto t = delta_sequence(EntireMap::exp(), kSlit, Complex(-2.0, 2.0), 30);
    ASSERT_GE(t.log_deltas.size(), 2u);
    for (std::size_t n = 1; n < t.log_deltas.size(); ++n)
        EXPECT_GE(t.log_deltas[n], t.log_deltas[n - 1] + std::log1p(-1e-9)) << n;

    const auto far = delta_sequence(EntireMap::exp(), kSlit, Complex(-20.0, 1.0), 1);
    ASSERT_EQ(far.log_deltas.size(), 2u);
    EXPECT_GE(far.delta(1), 5.0);
}

TEST(DeltaSequence, CumulativeProductMatchesChainRule) {
    oracle::Rng rng(0x5eed20);
    const auto f = EntireMap::exp();
    for (int s = 0; s < 50; ++s) {
        const Complex w(rng.uniform(-5, -1), rng.uniform(0.05, 3.1) * (s % 2 ? 1 : -1));
        const auto t = delta_sequence(f, kSlit, w, 30);
        // |(f^n)'(w)| = prod |f'(w_k)| = prod |w_{k+1}| for exp.
        double log_chain = 0.0;
        for (std::size_t n = 1; n < t.log_deltas.size(); ++n) {
            log_chain += std::log(std::abs(t.points[n]));
            const double direct = log_chain + std::log(oracle::slit_density(t.points[n])) -
                                  std::log(oracle::slit_density(w));
            EXPECT_NEAR(t.log_deltas[n], direct, 1e-8 * std::max(1.0, std::abs(direct))) << "seed " << s << " n " << n;
        }
    }
}

TEST(DeltaSequence, StopsWhenLeavingTheDomain) {
    // e^{-1} lies on the slit.
    const auto t = delta_sequence(EntireMap::exp(), kSlit, -1.0, 10);
    EXPECT_EQ(t.termination, Termination::LeftDomain);
    EXPECT_EQ(t.exit_step, 1u);
    EXPECT_TRUE(t.etas.empty());
    EXPECT_EQ(t.points.size(), 2u);
    EXPECT_EQ(t.log_deltas.size(), 1u);
}

TEST(DeltaSequence, RejectsStartOutsideDomain) {
    EXPECT_THROW((void)delta_sequence(EntireMap::exp(), kSlit, 1.0, 5), DomainViolation);
    EXPECT_THROW((void)delta_sequence(EntireMap::exp(), kSlit, Complex(-1.0, 1.0), -1), InvalidArgument);
}

TEST(DeltaSequenceProperty, NondecreasingForExpOnSlitPlane) {
    oracle::Rng rng(0x5eed21);
    int steps = 0;
    for (int s = 0; s < 100; ++s) {
        const double y = rng.uniform(1e-6, pi - 1e-6) * (rng.uniform(0, 1) < 0.5 ? -1 : 1);
        const Complex w(rng.uniform(-5, -1), y);
        const auto t = delta_sequence(EntireMap::exp(), kSlit, w, 30);
        for (std::size_t n = 1; n < t.log_deltas.size(); ++n, ++steps)
            ASSERT_GE(t.log_deltas[n], t.log_deltas[n - 1] + std::log1p(-1e-9)) << "w=" << w << " n=" << n;
    }
    EXPECT_GT(steps, 100);
}

TEST(ExpansionCheck, Examples) {
    const auto a = exp_expansion_check(Complex(-4.0, pi));
    EXPECT_NEAR(a.value, 4.806998689728636, 1e-12);
    EXPECT_EQ(a.bound, 1.0);
    EXPECT_TRUE(a.ok);
    const auto b = exp_expansion_check(Complex(-100.0, 1.0));
    EXPECT_EQ(b.bound, 25.0);
    EXPECT_TRUE(b.ok);
    const auto c = exp_expansion_check(Complex(-0.01, 1.0));
    EXPECT_EQ(c.bound, 0.0025);
    EXPECT_TRUE(c.ok);
}

TEST(ExpansionCheck, Preconditions) {
    EXPECT_THROW((void)exp_expansion_check(Complex(0.0, 1.0)), DomainViolation);
    EXPECT_THROW((void)exp_expansion_check(Complex(1.0, 1.0)), DomainViolation);
    EXPECT_THROW((void)exp_expansion_check(-2.0), DomainViolation);
}

TEST(ExpansionCheckProperty, HoldsOnGrid) {
    for (int j = 0; j < 100; ++j)
        for (int i = 0; i < 100; ++i) {
            const Complex z(-50.0 + (50.0 - 0.1) * i / 99.0, 0.05 + (2 * pi - 0.1) * j / 99.0);
            const auto chk = exp_expansion_check(z);
            ASSERT_TRUE(chk.ok) << z << " value " << chk.value << " bound " << chk.bound;
        }
}

TEST(SingularEscape, ExpOrbitOfZero) {
    const auto rep = singular_escape_report(EntireMap::exp(), 10, 1e6);
    ASSERT_EQ(rep.orbits.size(), 1u);
    EXPECT_EQ(rep.verdict, EscapeVerdict::Uniform);
    // 0, 1, e, e^e = 15.15, e^{15.15} = 3.8e6
    EXPECT_EQ(rep.orbits[0].escape_step, 4);
    EXPECT_EQ(rep.slowest_step, 4);
    EXPECT_FALSE(rep.witness.has_value());
}

TEST(SingularEscape, SinhOverZWithShiftIsUniform) {
    const auto rep = singular_escape_report(EntireMap::sinh_over_z(1.0, 5.0), 20, 1e8);
    EXPECT_EQ(rep.verdict, EscapeVerdict::Uniform);
    EXPECT_LE(rep.slowest_step, 6);
    for (const auto& o : rep.orbits) {
        ASSERT_TRUE(o.escape_step.has_value());
        EXPECT_GE(o.value.real(), 4.0);
    }
}

TEST(SingularEscape, SinhOverZWithoutShiftHasBoundedOrbit) {
    const auto rep = singular_escape_report(EntireMap::sinh_over_z(1.0, 0.0), 50, 1e8);
    EXPECT_EQ(rep.verdict, EscapeVerdict::NotEscaping);
    ASSERT_TRUE(rep.witness.has_value());
    const auto it = std::find_if(rep.orbits.begin(), rep.orbits.end(), [&](const SingularOrbit& o) {
        return o.value == *rep.witness;
    });
    ASSERT_NE(it, rep.orbits.end());
    EXPECT_FALSE(it->escape_step.has_value());
    EXPECT_LT(it->max_modulus, 1e8);
}

TEST(SingularEscape, RejectsBadArguments) {
    EXPECT_THROW((void)singular_escape_report(EntireMap::exp(), 0, 1e6), InvalidArgument);
    EXPECT_THROW((void)singular_escape_report(EntireMap::exp(), 5, -1.0), InvalidArgument);
}

TEST(EscapeGrid, ExpMostlyEscapes) {
    const Rect r{-4, 4, -4, 4};
    const auto g = escape_grid(EntireMap::exp(), r, 100, 100, 50, 1e50);
    EXPECT_GT(g.fraction(PixelClass::Escaped), 0.99);
    EXPECT_EQ(g.pixels.size(), 10000u);
}

TEST(EscapeGrid, DeterministicAndThreadCountIndependent) {
    const Rect r{-2, 3, -1.5, 2.5};
    const auto f = EntireMap::sinh_over_z(1.0, 0.3);
    const auto a = escape_grid(f, r, 64, 48, 40, 1e20, 1);
    const auto b = escape_grid(f, r, 64, 48, 40, 1e20, 4);
    const auto c = escape_grid(f, r, 64, 48, 40, 1e20, 0);
    EXPECT_EQ(a.pixels, b.pixels);
    EXPECT_EQ(a.pixels, c.pixels);
    for (int j = 0; j < 48; j += 7)
        for (int i = 0; i < 64; i += 5) EXPECT_EQ(a.at(i, j), classify_point(f, a.center(i, j), 40, 1e20, r));
}

TEST(EscapeGrid, FixedPointOfExpIsBounded) {
    const Complex p = exp_fixed_point();
    EXPECT_NEAR(p.real(), 0.3181315052047641, 1e-12);
    EXPECT_NEAR(p.imag(), 1.3372357014306894, 1e-12);
    const auto px = classify_point(EntireMap::exp(), p, 50, 1e50, Rect{-4, 4, -4, 4});
    EXPECT_EQ(px.cls, PixelClass::Bounded);
    EXPECT_EQ(px.iterations, 50);
}

TEST(EscapeGrid, PixelGeometryAndClasses) {
    const Rect r{-4, 4, -2, 2};
    const auto g = escape_grid(EntireMap::exp(), r, 8, 4, 1, 1e50, 2);
    EXPECT_EQ(g.center(0, 0), Complex(-3.5, 1.5));
    EXPECT_EQ(g.center(7, 3), Complex(3.5, -1.5));
    // One step from x = 3.5: e^3.5 = 33 leaves the window without escaping.
    EXPECT_EQ(g.at(7, 1).cls, PixelClass::LeftWindow);
    EXPECT_EQ(g.at(0, 1).cls, PixelClass::Bounded);
    EXPECT_EQ(classify_point(EntireMap::exp(), 800.0, 5, 1e50, r), (Pixel{PixelClass::Escaped, 1}));
    EXPECT_EQ(classify_point(EntireMap::exp(), 1e60, 5, 1e50, r), (Pixel{PixelClass::Escaped, 0}));
}

TEST(EscapeGrid, RejectsBadArguments) {
    const Rect r{-1, 1, -1, 1};
    EXPECT_THROW((void)escape_grid(EntireMap::exp(), r, 0, 10, 5), InvalidArgument);
    EXPECT_THROW((void)escape_grid(EntireMap::exp(), r, 10, 10, 0), InvalidArgument);
    EXPECT_THROW((void)escape_grid(EntireMap::exp(), Rect{1, -1, -1, 1}, 10, 10, 5), InvalidArgument);
    EXPECT_THROW((void)escape_grid(EntireMap::exp(), r, 10, 10, 5, -1.0), InvalidArgument);
}
