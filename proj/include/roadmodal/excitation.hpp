#pragma once

#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "roadmodal/error.hpp"
#include "roadmodal/road_surface.hpp"
#include "roadmodal/vehicle_model.hpp"

namespace roadmodal {

/// Samples of a complex matrix-valued function of angular frequency.
struct SpectralMatrixFunction {
    std::vector<double> omega;
    std::vector<Eigen::MatrixXcd> values;
    std::string quantity;
};

/// n samples evenly spaced on [0, omega_max], both ends included.
inline std::vector<double> frequency_grid(double omega_max, std::size_t n)
{
    if (n < 2 || !(omega_max > 0.0))
        throw UsageError("frequency_grid needs at least two samples and a positive upper limit");
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k)
        w[k] = omega_max * static_cast<double>(k) / static_cast<double>(n - 1);
    return w;
}

/// Maps road displacements and velocities at the four contact points to
/// generalized forces: f = G_fr [r; r'].
struct StaticGain {
    Eigen::MatrixXd G_fr; ///< 7 x 8
    Eigen::Vector4d kt;
    Eigen::Vector4d ct;

    Eigen::Matrix4d Kt() const { return kt.asDiagonal(); }
    Eigen::Matrix4d Ct() const { return ct.asDiagonal(); }
};

inline StaticGain static_gain(const VehicleParams& p)
{
    StaticGain g;
    g.kt << p.kft, p.kft, p.krt, p.krt;
    g.ct << p.cft, p.cft, p.crt, p.crt;
    g.G_fr = Eigen::MatrixXd::Zero(7, 8);
    g.G_fr.block<4, 4>(3, 0) = g.Kt();
    g.G_fr.block<4, 4>(3, 4) = g.Ct();
    return g;
}

/**
 * Axle delay and track coherence layout of the four-wheel input field.
 *
 * Correlations follow R_xy(tau) = E[x(t) y(t + tau)]; a rear wheel sees the
 * front profile tau1 later, so front-to-rear entries carry exp(-i w tau1).
 */
struct DelayStructure {
    double tau1 = 0.0;
    double track_width = 0.0; ///< separation of the two parallel tracks

    /// Same-track pairs.
    Eigen::Matrix4cd delta0(double w) const
    {
        const std::complex<double> lag = std::exp(std::complex<double>(0.0, -w * tau1));
        Eigen::Matrix4cd D = Eigen::Matrix4cd::Identity();
        D(0, 2) = D(1, 3) = lag;
        D(2, 0) = D(3, 1) = std::conj(lag);
        return D;
    }

    /// Cross-track pairs.
    Eigen::Matrix4cd delta1(double w) const
    {
        const std::complex<double> lag = std::exp(std::complex<double>(0.0, -w * tau1));
        Eigen::Matrix4cd D = Eigen::Matrix4cd::Zero();
        D(0, 1) = D(1, 0) = D(2, 3) = D(3, 2) = 1.0;
        D(0, 3) = D(1, 2) = lag;
        D(3, 0) = D(2, 1) = std::conj(lag);
        return D;
    }
};

inline DelayStructure delay_structure(const VehicleParams& p, double V)
{
    if (!(V > 0.0))
        throw DomainError("delay_structure: speed must be positive");
    p.validate();
    return {p.wheelbase() / V, p.W1};
}

/// D(w) = [[1, i w], [-i w, w^2]]: displacement/velocity cross-spectral factor.
inline Eigen::Matrix2cd velocity_coupling(double w)
{
    Eigen::Matrix2cd D;
    D << 1.0, std::complex<double>(0.0, w), std::complex<double>(0.0, -w), w * w;
    return D;
}

/// S_r(w) = S_d(w) [Delta0(w) + Gamma1(w) Delta1(w)].
inline Eigen::Matrix4cd displacement_psd_matrix(double w, const RoadModel& road, const DelayStructure& ds)
{
    const double sd = iso8608_psd_temporal(w, road);
    if (sd == 0.0)
        return Eigen::Matrix4cd::Zero();
    return sd * (ds.delta0(w) + bogsjo_coherence(w, ds.track_width, road) * ds.delta1(w));
}

inline Eigen::Matrix4cd displacement_psd_matrix(double w, const RoadModel& road, const VehicleParams& geom)
{
    return displacement_psd_matrix(w, road, delay_structure(geom, road.V));
}

/// S_f(w) = S_d(w) sum_p Gamma_p(w) G_fr (D(w) kron Delta_p(w)) G_fr^T.
inline Eigen::MatrixXcd force_psd_matrix(double w, const RoadModel& road, const StaticGain& gain, const DelayStructure& ds)
{
    const double sd = iso8608_psd_temporal(w, road);
    if (sd == 0.0)
        return Eigen::MatrixXcd::Zero(7, 7);
    const Eigen::Matrix2cd D = velocity_coupling(w);
    const Eigen::MatrixXcd field = Eigen::kroneckerProduct(D, ds.delta0(w)).eval() +
                                   bogsjo_coherence(w, ds.track_width, road) * Eigen::kroneckerProduct(D, ds.delta1(w)).eval();
    const Eigen::MatrixXcd G = gain.G_fr.cast<std::complex<double>>();
    return sd * (G * field * G.transpose());
}

inline SpectralMatrixFunction force_psd(const std::vector<double>& grid, const RoadModel& road, const StaticGain& gain,
                                        const DelayStructure& ds)
{
    SpectralMatrixFunction out{grid, {}, "S_f"};
    out.values.reserve(grid.size());
    for (double w : grid)
        out.values.push_back(force_psd_matrix(w, road, gain, ds));
    return out;
}

} // namespace roadmodal
