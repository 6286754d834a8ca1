#include <gtest/gtest.h>

#include <random>

#include "roadmodal/excitation.hpp"

using namespace roadmodal;
using cd = std::complex<double>;

namespace {

double hermitian_residual(const Eigen::MatrixXcd& S)
{
    return (S - S.adjoint()).cwiseAbs().maxCoeff();
}

double min_eigen_ratio(const Eigen::MatrixXcd& S)
{
    const Eigen::MatrixXcd H = 0.5 * (S + S.adjoint());
    const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H).eigenvalues();
    return ev.minCoeff() / std::max(ev.maxCoeff(), 1e-300);
}

// Block expansion of G_fr (D kron Delta) G_fr^T for the wheel rows.
Eigen::Matrix4cd expanded(const StaticGain& g, const Eigen::Matrix4cd& delta, double w)
{
    const Eigen::Matrix4cd Kt = g.Kt().cast<cd>();
    const Eigen::Matrix4cd Ct = g.Ct().cast<cd>();
    const cd iw(0.0, w);
    return Kt * delta * Kt + iw * (Kt * delta * Ct) - iw * (Ct * delta * Kt) + w * w * (Ct * delta * Ct);
}

struct Fixture {
    VehicleParams p = VehicleParams::reference_car();
    RoadModel road;
    StaticGain gain = static_gain(p);
    DelayStructure ds = delay_structure(p, road.V);
};

} // namespace

TEST(StaticGain, Layout)
{
    const auto g = static_gain(VehicleParams::reference_car());
    ASSERT_EQ(g.G_fr.rows(), 7);
    ASSERT_EQ(g.G_fr.cols(), 8);
    EXPECT_EQ(g.G_fr.topRows(3).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(g.G_fr(3, 0), 140000.0);
    EXPECT_EQ(g.G_fr(6, 3), 140000.0);
    EXPECT_EQ(g.G_fr(4, 5), 150.0);
    EXPECT_EQ(g.G_fr(4, 4), 0.0);
}

TEST(DelayStructure, AxleDelay)
{
    const auto ds = delay_structure(VehicleParams::reference_car(), 20.0);
    EXPECT_NEAR(ds.tau1, 0.133, 1e-15);
    EXPECT_THROW(delay_structure(VehicleParams::reference_car(), 0.0), DomainError);
    EXPECT_LT(delay_structure(VehicleParams::reference_car(), 1e12).tau1, 1e-11);
}

TEST(DelayStructure, DeltaEntries)
{
    const auto ds = delay_structure(VehicleParams::reference_car(), 20.0);
    const double w = 7.3;
    const cd lag = std::exp(cd(0.0, -w * 0.133));
    const auto D0 = ds.delta0(w);
    const auto D1 = ds.delta1(w);
    for (int k = 0; k < 4; ++k) {
        EXPECT_EQ(D0(k, k), cd(1.0));
        EXPECT_EQ(D1(k, k), cd(0.0));
    }
    EXPECT_LT(std::abs(D0(0, 2) - lag), 1e-15);
    EXPECT_LT(std::abs(D0(3, 1) - std::conj(lag)), 1e-15);
    EXPECT_EQ(D1(0, 1), cd(1.0));
    EXPECT_LT(std::abs(D1(0, 3) - lag), 1e-15);
    EXPECT_LT(std::abs(D1(2, 1) - std::conj(lag)), 1e-15);
    EXPECT_LT(hermitian_residual(D0), 1e-15);
    EXPECT_LT(hermitian_residual(D1), 1e-15);
}

TEST(DelayStructure, ZeroDelayIsAllPass)
{
    const DelayStructure ds{0.0, 1.49};
    const Eigen::Matrix4cd sum = ds.delta0(3.0) + ds.delta1(3.0);
    EXPECT_LT((sum - Eigen::Matrix4cd::Ones()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DisplacementPsd, FullyCoherentZeroDelay)
{
    RoadModel road;
    road.mu = 0.0;
    const DelayStructure ds{0.0, 1.49};
    const double w = 10.0;
    const auto S = displacement_psd_matrix(w, road, ds);
    EXPECT_LT((S - iso8608_psd_temporal(w, road) * Eigen::Matrix4cd::Ones()).cwiseAbs().maxCoeff(), 1e-20);
}

TEST(DisplacementPsd, CrossTrackDelayedEntry)
{
    Fixture f;
    const double w = 12.0;
    const auto S = displacement_psd_matrix(w, f.road, f.p);
    const double sd = iso8608_psd_temporal(w, f.road);
    const cd expect = sd * bogsjo_coherence(w, f.p.W1, f.road) * std::exp(cd(0.0, -w * f.ds.tau1));
    EXPECT_LT(std::abs(S(1, 2) - expect), 1e-12 * sd);
    EXPECT_LT(std::abs(S(0, 2) - sd * std::exp(cd(0.0, -w * f.ds.tau1))), 1e-12 * sd);
    for (int k = 0; k < 4; ++k)
        EXPECT_NEAR(S(k, k).real(), sd, 1e-12 * sd);
}

TEST(DisplacementPsd, OutsideBandIsZero)
{
    Fixture f;
    EXPECT_EQ(displacement_psd_matrix(200.0, f.road, f.ds).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_EQ(displacement_psd_matrix(0.5, f.road, f.ds).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ForcePsd, MatchesHandExpandedBlocks)
{
    Fixture f;
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(f.road.omega_a(), f.road.omega_b());
    for (int k = 0; k < 50; ++k) {
        const double w = u(rng);
        const auto S = force_psd_matrix(w, f.road, f.gain, f.ds);
        const double sd = iso8608_psd_temporal(w, f.road);
        const Eigen::Matrix4cd ref =
            sd * (expanded(f.gain, f.ds.delta0(w), w) + bogsjo_coherence(w, f.p.W1, f.road) * expanded(f.gain, f.ds.delta1(w), w));
        EXPECT_LT((S.bottomRightCorner(4, 4) - ref).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff());
        EXPECT_EQ(S.topRows(3).cwiseAbs().maxCoeff(), 0.0);
        EXPECT_EQ(S.leftCols(3).cwiseAbs().maxCoeff(), 0.0);
    }
}

TEST(ForcePsd, DiagonalEntry)
{
    Fixture f;
    const double w = 40.0;
    const auto S = force_psd_matrix(w, f.road, f.gain, f.ds);
    const double expect = iso8608_psd_temporal(w, f.road) * (f.p.kft * f.p.kft + w * w * f.p.cft * f.p.cft);
    EXPECT_NEAR(S(3, 3).real(), expect, 1e-12 * expect);
    EXPECT_NEAR(S(3, 3).imag(), 0.0, 1e-12 * expect);
}

TEST(ForcePsd, StiffnessOnlyReducesToKtSrKt)
{
    Fixture f;
    f.p.cft = f.p.crt = 0.0;
    f.gain = static_gain(f.p);
    const double w = 25.0;
    const auto S = force_psd_matrix(w, f.road, f.gain, f.ds);
    const Eigen::Matrix4cd Kt = f.gain.Kt().cast<cd>();
    const Eigen::Matrix4cd ref = Kt * displacement_psd_matrix(w, f.road, f.ds) * Kt;
    EXPECT_LT((S.bottomRightCorner(4, 4) - ref).cwiseAbs().maxCoeff(), 1e-12 * ref.cwiseAbs().maxCoeff());
}

TEST(ForcePsd, HermitianPsdAndConjugateSymmetricOnGrid)
{
    Fixture f;
    const auto grid = frequency_grid(2.0 * std::numbers::pi * 30.0, 4096);
    for (double w : grid) {
        const auto Sr = displacement_psd_matrix(w, f.road, f.ds);
        const auto Sf = force_psd_matrix(w, f.road, f.gain, f.ds);
        const double sr_max = Sr.cwiseAbs().maxCoeff();
        const double sf_max = Sf.cwiseAbs().maxCoeff();
        if (sf_max == 0.0)
            continue;
        EXPECT_LE(hermitian_residual(Sr), 1e-14 * sr_max);
        EXPECT_LE(hermitian_residual(Sf), 1e-14 * sf_max);
        EXPECT_GE(min_eigen_ratio(Sr), -1e-10);
        EXPECT_GE(min_eigen_ratio(Sf), -1e-10);
        const auto Sneg = force_psd_matrix(-w, f.road, f.gain, f.ds);
        EXPECT_LE((Sneg - Sf.conjugate()).cwiseAbs().maxCoeff(), 1e-14 * sf_max);
    }
}

TEST(FrequencyGrid, Endpoints)
{
    const auto g = frequency_grid(10.0, 11);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_EQ(g.back(), 10.0);
    EXPECT_DOUBLE_EQ(g[3], 3.0);
    EXPECT_THROW(frequency_grid(10.0, 1), UsageError);
}
