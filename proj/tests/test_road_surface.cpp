#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "roadmodal/road_surface.hpp"

using namespace roadmodal;

namespace {

constexpr double pi = std::numbers::pi;

double lorentzian(double a, double tau)
{
    return a / (pi * (a * a + tau * tau));
}

// Composite Simpson on [lo, hi], independent of the FFT path.
template <class F>
double simpson(F f, double lo, double hi, int n)
{
    if (n % 2)
        ++n;
    const double h = (hi - lo) / n;
    double s = f(lo) + f(hi);
    for (int k = 1; k < n; ++k)
        s += (k % 2 ? 4.0 : 2.0) * f(lo + k * h);
    return s * h / 3.0;
}

} // namespace

TEST(RoadSpectrum, SpatialClassC)
{
    const RoadModel m;
    EXPECT_DOUBLE_EQ(iso8608_psd_spatial(1.0, m), 16e-6);
    EXPECT_DOUBLE_EQ(iso8608_psd_spatial(2.0, m), 4e-6);
    EXPECT_EQ(iso8608_psd_spatial(0.01, m), 0.0);
    EXPECT_EQ(iso8608_psd_spatial(20.0, m), 0.0);
    EXPECT_THROW(iso8608_psd_spatial(0.0, m), DomainError);
    EXPECT_THROW(iso8608_psd_spatial(-1.0, m), DomainError);
}

TEST(RoadSpectrum, TemporalValues)
{
    const RoadModel m;
    EXPECT_NEAR(iso8608_psd_temporal_one_sided(20.0, m), 8e-7, 1e-20);
    EXPECT_NEAR(iso8608_psd_temporal(20.0, m), 4e-7, 1e-20);
    EXPECT_NEAR(iso8608_psd_temporal(40.0, m), 1e-7, 1e-20);
    EXPECT_EQ(iso8608_psd_temporal(-20.0, m), iso8608_psd_temporal(20.0, m));
    EXPECT_EQ(iso8608_psd_temporal(200.0, m), 0.0);
    EXPECT_EQ(iso8608_psd_temporal(0.0, m), 0.0);
}

TEST(RoadSpectrum, BandEdgesFromDesignSpeeds)
{
    const RoadModel m;
    EXPECT_NEAR(m.omega_a(), 1.89, 1e-12);
    EXPECT_NEAR(m.omega_b(), 177.7, 1e-12);
    EXPECT_GT(iso8608_psd_temporal(m.omega_a(), m), 0.0);
    EXPECT_GT(iso8608_psd_temporal(m.omega_b(), m), 0.0);
}

TEST(RoadSpectrum, ClassPresets)
{
    EXPECT_DOUBLE_EQ(RoadModel::iso_class('C').S0, 16e-6);
    EXPECT_DOUBLE_EQ(RoadModel::iso_class('A').S0, 1e-6);
    EXPECT_DOUBLE_EQ(RoadModel::iso_class('D').S0, 64e-6);
    EXPECT_THROW(RoadModel::iso_class('Z'), ParameterError);
}

TEST(RoadSpectrum, Violations)
{
    RoadModel m;
    m.V = -5.0;
    m.S0 = 0.0;
    m.nu_a = 20.0;
    EXPECT_EQ(m.violations().size(), 3u);
    EXPECT_TRUE(RoadModel::white_noise(1e-6).violations().empty());
    EXPECT_TRUE(RoadModel::white_noise(1e-6).white());
    RoadModel odd;
    odd.e = 2.5;
    EXPECT_TRUE(odd.violations().empty());
    EXPECT_TRUE(odd.nonstandard_exponent());
}

TEST(Coherence, KnownValues)
{
    const RoadModel m;
    EXPECT_EQ(bogsjo_coherence(0.0, 1.49, m), 1.0);
    EXPECT_EQ(bogsjo_coherence(50.0, 0.0, m), 1.0);
    EXPECT_NEAR(bogsjo_coherence(20.0, 1.490, m), std::exp(-3.8 * 1.490 * 20.0 / (2.0 * pi * 20.0)), 1e-15);
    EXPECT_NEAR(bogsjo_coherence(20.0, 1.490, m), 0.4061, 1e-4);
    EXPECT_EQ(bogsjo_coherence(-20.0, 1.49, m), bogsjo_coherence(20.0, 1.49, m));
    EXPECT_THROW(bogsjo_coherence(1.0, -0.1, m), DomainError);
}

TEST(Coherence, BoundsAndMonotonicity)
{
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> w(-300.0, 300.0), sep(0.0, 5.0), mu(0.0, 10.0), bump(0.01, 2.0);
    for (int k = 0; k < 500; ++k) {
        RoadModel m;
        m.mu = mu(rng);
        const double om = w(rng), W = sep(rng);
        const double g = bogsjo_coherence(om, W, m);
        EXPECT_GE(g, 0.0);
        EXPECT_LE(g, 1.0);
        EXPECT_LE(bogsjo_coherence(std::abs(om) + bump(rng), W, m), g);
        EXPECT_LE(bogsjo_coherence(om, W + bump(rng), m), g);
        RoadModel m2 = m;
        m2.mu += bump(rng);
        EXPECT_LE(bogsjo_coherence(om, W, m2), g);
    }
}

TEST(CoherenceIft, MatchesLorentzian)
{
    const RoadModel m;
    const LagGrid grid = LagGrid::covering(0.133 / 16.0, 50.0);
    const auto H = coherence_ift(1.49, m, grid);
    const double a = coherence_time(1.49, m);
    EXPECT_NEAR(a, 0.04506, 1e-5);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double ref = lorentzian(a, grid.tau(j));
        num += std::pow(H.values[j] - ref, 2);
        den += ref * ref;
    }
    EXPECT_LT(std::sqrt(num / den), 0.01);
    EXPECT_NEAR(H.values[grid.centre()], 1.0 / (pi * a), 0.01 * 7.065);
    EXPECT_NEAR(H.values[grid.centre()], 7.065, 0.05);
}

TEST(CoherenceIft, UnitMass)
{
    const RoadModel m;
    const LagGrid grid = LagGrid::covering(0.133 / 16.0, 50.0);
    const auto H = coherence_ift(1.49, m, grid);
    double mass = 0.0;
    for (double v : H.values)
        mass += v * grid.step;
    EXPECT_NEAR(mass, 1.0, 1e-3);
}

TEST(CoherenceIft, ZeroSeparationIsDiscreteDelta)
{
    const RoadModel m;
    const LagGrid grid = LagGrid::covering(0.01, 1.0);
    const auto H = coherence_ift(0.0, m, grid);
    for (std::size_t j = 0; j < grid.size(); ++j)
        EXPECT_EQ(H.values[j], j == grid.centre() ? 100.0 : 0.0);
}

TEST(CoherenceIft, CoarseGridRejected)
{
    const RoadModel m;
    EXPECT_THROW(coherence_ift(1.49, m, LagGrid::covering(0.05, 10.0)), ResolutionError);
}

TEST(CoherenceIft, RoundTripRecoversCoherence)
{
    const RoadModel m;
    const LagGrid grid = LagGrid::covering(0.133 / 16.0, 50.0);
    const auto H = coherence_ift(1.49, m, grid);
    double num = 0.0, den = 0.0;
    for (double om = m.omega_a(); om <= m.omega_b(); om += 0.5) {
        double ft = 0.0;
        for (std::size_t j = 0; j < grid.size(); ++j)
            ft += H.values[j] * std::cos(om * grid.tau(j)) * grid.step;
        const double g = bogsjo_coherence(om, 1.49, m);
        num += (ft - g) * (ft - g);
        den += g * g;
    }
    EXPECT_LT(std::sqrt(num / den), 0.01);
}

TEST(RoughnessCorrelation, ZeroLagParseval)
{
    const RoadModel m;
    const LagGrid grid = LagGrid::covering(0.133 / 16.0, 60.0);
    const auto R = roughness_correlation(m, grid);
    const double closed = m.S0 * m.omega0() * m.omega0() / (2.0 * pi * m.V) * (1.0 / m.omega_a() - 1.0 / m.omega_b());
    EXPECT_NEAR(closed, 2.666e-5, 1e-8);
    EXPECT_NEAR(R.values[grid.centre()], closed, 0.005 * closed);
}

TEST(RoughnessCorrelation, MatchesDirectQuadrature)
{
    const RoadModel m;
    const LagGrid grid = LagGrid::covering(0.133 / 16.0, 60.0);
    const auto R = roughness_correlation(m, grid);
    for (long k : {1L, 7L, 60L, 240L, 1200L}) {
        const double tau = static_cast<double>(k) * grid.step;
        const double ref = simpson([&](double w) { return iso8608_psd_temporal(w, m) * std::cos(w * tau); },
                                   m.omega_a(), m.omega_b(), 400000) / pi;
        EXPECT_NEAR(R.at(k), ref, 2e-3 * R.values[grid.centre()]) << "tau " << tau;
    }
}

TEST(RoughnessCorrelation, EvenAndDecaying)
{
    const RoadModel m;
    const LagGrid grid = LagGrid::covering(0.133 / 16.0, 80.0);
    const auto R = roughness_correlation(m, grid);
    for (std::size_t j = 0; j < grid.size(); ++j)
        EXPECT_EQ(R.values[j], R.values[grid.size() - 1 - j]);
    // The hard band edges leave a sinc-like tail bounded by
    // (S_d(w_a) + S_d(w_b)) / (pi |tau|); it stays under 1% of R_d(0) past 55 s.
    const double r0 = R.values[grid.centre()];
    const double edge = iso8608_psd_temporal(m.omega_a(), m) + iso8608_psd_temporal(m.omega_b(), m);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = std::abs(grid.tau(j));
        if (t > 5.0) {
            EXPECT_LT(std::abs(R.values[j]), 1.02 * edge / (pi * t));
        }
        if (t > 55.0) {
            EXPECT_LT(std::abs(R.values[j]), 0.01 * r0);
        }
    }
}

TEST(RoughnessCorrelation, AliasingGuard)
{
    const RoadModel m;
    EXPECT_THROW(roughness_correlation(m, LagGrid::covering(0.05, 10.0)), AliasingError);
}

TEST(RoughnessCorrelation, WhiteModelIsDiscreteMass)
{
    const auto m = RoadModel::white_noise(3e-7);
    const LagGrid grid = LagGrid::covering(1e-3, 0.1);
    const auto R = roughness_correlation(m, grid);
    double mass = 0.0;
    for (double v : R.values)
        mass += v * grid.step;
    EXPECT_NEAR(mass, 3e-7, 1e-20);
    EXPECT_EQ(R.values[grid.centre() + 1], 0.0);
}

TEST(RoughnessCorrelation, LinearInLevel)
{
    RoadModel m;
    const LagGrid grid = LagGrid::covering(0.133 / 16.0, 20.0);
    const auto R1 = roughness_correlation(m, grid);
    m.S0 *= 2.0;
    const auto R2 = roughness_correlation(m, grid);
    for (std::size_t j = 0; j < grid.size(); ++j)
        EXPECT_NEAR(R2.values[j], 2.0 * R1.values[j], 1e-15);
}
