#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "roadmodal/oracle.hpp"

using namespace roadmodal;
using cplx = std::complex<double>;

namespace {

constexpr double pi = std::numbers::pi;

SystemMatrices oscillator(double m, double c, double k)
{
    SystemMatrices s;
    s.M = Eigen::MatrixXd::Constant(1, 1, m);
    s.C = Eigen::MatrixXd::Constant(1, 1, c);
    s.K = Eigen::MatrixXd::Constant(1, 1, k);
    return s;
}

SpectralMatrixFunction scalar_function(const std::vector<double>& w, double level)
{
    SpectralMatrixFunction f{w, {}, "flat"};
    for (std::size_t k = 0; k < w.size(); ++k)
        f.values.push_back(Eigen::MatrixXcd::Constant(1, 1, cplx(level, 0.0)));
    return f;
}

struct Scene {
    VehicleParams p = VehicleParams::reference_car();
    RoadModel road;
    SystemMatrices sys = build_system_matrices(p, CoordinateSet::cg);
    StaticGain gain = static_gain(p);
    DelayStructure ds = delay_structure(p, road.V);
};

} // namespace

TEST(Frf, StaticComplianceAtZeroFrequency)
{
    const Scene s;
    const Eigen::MatrixXcd G = frf_matrix(0.0, s.sys);
    EXPECT_LT((G.real() - s.sys.K.inverse()).cwiseAbs().maxCoeff(), 1e-12 * G.cwiseAbs().maxCoeff());
    EXPECT_EQ(G.imag().cwiseAbs().maxCoeff(), 0.0);
}

TEST(Frf, ResonantUnitOscillator)
{
    const auto G = frf_matrix(1.0, oscillator(1.0, 0.1, 1.0));
    EXPECT_LT(std::abs(G(0, 0) - cplx(0.0, -10.0)), 1e-12);
    EXPECT_THROW(frf_matrix(1.0, oscillator(1.0, 0.0, 1.0)), NumericError);
}

TEST(Frf, ResidualAndHeavePeak)
{
    const Scene s;
    const double w = 2.0 * pi * 1.064;
    const auto G = frf_matrix(w, s.sys);
    const Eigen::MatrixXcd Z = s.sys.K.cast<cplx>() - w * w * s.sys.M.cast<cplx>() + cplx(0.0, w) * s.sys.C.cast<cplx>();
    EXPECT_LT((Z * G - Eigen::MatrixXcd::Identity(7, 7)).cwiseAbs().maxCoeff(), 1e-10);
    // Heave receptance is locally largest near the heave mode.
    const double here = std::abs(G(0, 0));
    EXPECT_GT(here, std::abs(frf_matrix(2.0 * pi * 0.5, s.sys)(0, 0)));
    EXPECT_GT(here, std::abs(frf_matrix(2.0 * pi * 3.0, s.sys)(0, 0)));
}

TEST(OraclePsd, ZeroOutsideBand)
{
    const Scene s;
    EXPECT_EQ(output_psd_oracle(0.5, s.sys, s.road, s.gain, s.ds).norm(), 0.0);
    EXPECT_EQ(output_psd_oracle(500.0, s.sys, s.road, s.gain, s.ds).norm(), 0.0);
}

TEST(OraclePsd, HermitianAndPositiveSemidefinite)
{
    const Scene s;
    const auto grid = frequency_grid(2.0 * pi * 30.0, 1024);
    const auto S = output_psd_oracle(grid, s.sys, s.road, s.gain, s.ds);
    for (const auto& X : S.values) {
        const double scale = X.cwiseAbs().maxCoeff();
        if (scale == 0.0)
            continue;
        EXPECT_LT((X - X.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * scale);
        const Eigen::MatrixXcd H = 0.5 * (X + X.adjoint());
        const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(H).eigenvalues();
        EXPECT_GE(ev.minCoeff(), -1e-10 * ev.maxCoeff());
    }
}

TEST(OraclePsd, WheelbaseFilteringHumps)
{
    // The front/rear body-corner cross term alternates in magnitude as the
    // delayed inputs move in and out of phase.
    const Scene s;
    const auto corner = build_system_matrices(s.p, CoordinateSet::corner);
    std::vector<double> mag;
    for (double f = 2.0; f <= 12.0; f += 0.05)
        mag.push_back(std::abs(output_psd_oracle(2.0 * pi * f, corner, s.road, s.gain, s.ds)(1, 2)));
    int extrema = 0;
    for (std::size_t k = 1; k + 1 < mag.size(); ++k)
        if ((mag[k] > mag[k - 1] && mag[k] > mag[k + 1]) || (mag[k] < mag[k - 1] && mag[k] < mag[k + 1]))
            ++extrema;
    EXPECT_GE(extrema, 2);
}

TEST(OracleCorr, FlatSpectrumGivesDiscreteDelta)
{
    const double wmax = 100.0;
    const auto w = frequency_grid(wmax, 1001);
    const LagGrid grid{pi / wmax, 20};
    const auto R = output_corr_oracle(grid, scalar_function(w, 2.0));
    EXPECT_NEAR(R.values[grid.centre()](0, 0), 2.0 * wmax / pi, 1e-10);
    for (std::size_t j = 0; j < grid.size(); ++j)
        if (j != grid.centre()) {
            EXPECT_NEAR(R.values[j](0, 0), 0.0, 1e-10);
        }
}

TEST(OracleCorr, ParsevalAtZeroLag)
{
    const Scene s;
    // Composite Simpson of (1/pi) S_ii over the road band.
    const int n = 40000;
    const double lo = s.road.omega_a(), hi = s.road.omega_b(), h = (hi - lo) / n;
    Eigen::VectorXd ref = Eigen::VectorXd::Zero(7);
    for (int k = 0; k <= n; ++k) {
        const double wt = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        ref += wt * output_psd_oracle(lo + k * h, s.sys, s.road, s.gain, s.ds).diagonal().real();
    }
    ref *= h / (3.0 * pi);

    const LagGrid grid{s.ds.tau1 / 16.0, 0};
    const auto w = frequency_grid(2.0 * pi * 30.0, 32768);
    const auto sampled = output_corr_oracle(grid, output_psd_oracle(w, s.sys, s.road, s.gain, s.ds));
    const auto dense = output_corr_oracle(grid, s.sys, s.road, s.gain, s.ds);
    for (int i = 0; i < 7; ++i) {
        EXPECT_NEAR(sampled.values[0](i, i), ref(i), 5e-3 * ref(i)) << "dof " << i;
        EXPECT_NEAR(dense.values[0](i, i), ref(i), 5e-3 * ref(i)) << "dof " << i;
    }
}

TEST(OracleCorr, TransposeSymmetryAndGuards)
{
    const Scene s;
    const LagGrid grid = LagGrid::covering(s.ds.tau1 / 16.0, 3.0);
    const auto R = output_corr_oracle(grid, s.sys, s.road, s.gain, s.ds);
    for (std::size_t j = 0; j < grid.size(); ++j)
        EXPECT_LT((R.values[j] - R.values[grid.size() - 1 - j].transpose()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_THROW(output_corr_oracle(LagGrid::covering(0.05, 3.0), s.sys, s.road, s.gain, s.ds), AliasingError);
    const auto w = frequency_grid(10.0, 101);
    EXPECT_THROW(output_corr_oracle(LagGrid::covering(0.01, 50.0), scalar_function(w, 1.0)), AliasingError);
}

TEST(Compare, IdenticalInputsPass)
{
    const Scene s;
    const auto grid = frequency_grid(2.0 * pi * 30.0, 256);
    const auto S = output_psd_oracle(grid, s.sys, s.road, s.gain, s.ds);
    const auto rep = compare(S, S, {1e-12, 1e-12}, s.road.omega_a(), s.road.omega_b());
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.max_pointwise, 0.0);
    EXPECT_EQ(rep.max_relative_rms(), 0.0);
    EXPECT_EQ(rep.pairs.size(), 49u);
}

TEST(Compare, ScaledRouteAndSymmetry)
{
    const Scene s;
    const auto grid = frequency_grid(2.0 * pi * 30.0, 256);
    const auto a = output_psd_oracle(grid, s.sys, s.road, s.gain, s.ds);
    auto b = a;
    for (auto& X : b.values)
        X *= 1.0 + 1e-3;
    const auto ab = compare(a, b, {1e-2, 1e-2}, s.road.omega_a(), s.road.omega_b());
    const auto ba = compare(b, a, {1e-2, 1e-2}, s.road.omega_a(), s.road.omega_b());
    EXPECT_NEAR(ab.max_relative_rms(), 1e-3, 1e-5);
    EXPECT_NEAR(ab.max_pointwise, 1e-3, 1e-5);
    for (std::size_t q = 0; q < ab.pairs.size(); ++q)
        EXPECT_DOUBLE_EQ(ab.pairs[q].relative_rms, ba.pairs[q].relative_rms);
    EXPECT_TRUE(ab.pass);
    EXPECT_FALSE(compare(a, b, {0.0, 0.0}, s.road.omega_a(), s.road.omega_b()).pass);
}

TEST(Compare, GridMismatchIsUsageError)
{
    const Scene s;
    const auto a = output_psd_oracle(frequency_grid(100.0, 64), s.sys, s.road, s.gain, s.ds);
    const auto b = output_psd_oracle(frequency_grid(100.0, 65), s.sys, s.road, s.gain, s.ds);
    EXPECT_THROW(compare(a, b, {}, 0.0, 100.0), UsageError);
    const MatrixLagFunction r1{LagGrid{0.1, 3}, std::vector<Eigen::MatrixXd>(7, Eigen::MatrixXd::Ones(2, 2))};
    const MatrixLagFunction r2{LagGrid{0.1, 4}, std::vector<Eigen::MatrixXd>(9, Eigen::MatrixXd::Ones(2, 2))};
    EXPECT_THROW(compare(r1, r2, {}), UsageError);
}

TEST(Compare, CentralFractionOfLags)
{
    MatrixLagFunction a{LagGrid{0.1, 10}, std::vector<Eigen::MatrixXd>(21, Eigen::MatrixXd::Ones(1, 1))};
    auto b = a;
    b.values.front()(0, 0) = 5.0; // outside the central half
    b.values.back()(0, 0) = 5.0;
    const auto rep = compare(a, b, {1e-12, 1e-12}, 0.5);
    EXPECT_TRUE(rep.pass);
    EXPECT_EQ(rep.samples, 11u);
    EXPECT_FALSE(compare(a, b, {1e-12, 1e-12}, 1.0).pass);
}
