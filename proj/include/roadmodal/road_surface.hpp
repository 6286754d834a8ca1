#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "roadmodal/error.hpp"
#include "roadmodal/lag_transform.hpp"

namespace roadmodal {

/**
 * Single-track roughness spectrum with a hard band limit, the parallel-track
 * coherence decay and the travelling speed.
 *
 * Spectra are two-sided in angular frequency: S_d(w) = 1/2 (S0/V) (|w|/w0)^-e
 * inside the band. The temporal band is derived from the spatial limits and a
 * design speed range: w_a = nu_a * band_speed_max, w_b = nu_b * band_speed_min,
 * so one band serves every speed in that range. Setting both design speeds to
 * V gives w = nu V.
 */
struct RoadModel {
    double S0 = 16e-6;  ///< m^3 at nu0
    double nu0 = 1.0;   ///< rad/m
    double e = 2.0;
    double nu_a = 0.063; ///< rad/m
    double nu_b = 17.77; ///< rad/m
    double band_speed_min = 10.0;
    double band_speed_max = 30.0;
    double mu = 3.8;
    double V = 20.0;

    double omega0() const { return nu0 * V; }
    double omega_a() const { return nu_a * band_speed_max; }
    double omega_b() const { return nu_b * band_speed_min; }

    /// Flat spectrum over all frequencies (e = 0, unbounded band).
    bool white() const { return e == 0.0 && nu_a == 0.0 && std::isinf(nu_b); }

    /// Anything but e = 2 is accepted but outside the constant-velocity form.
    bool nonstandard_exponent() const { return e != 2.0; }

    /// Level of a white model, two-sided.
    double flat_level() const { return 0.5 * S0 / V; }

    /// Roughness class preset 'A'..'H'; class C is 16e-6 m^3 and neighbouring
    /// classes differ by a factor of four.
    static RoadModel iso_class(char cls, double speed = 20.0)
    {
        if (cls < 'A' || cls > 'H')
            throw ParameterError(std::string("unknown roughness class '") + cls + "'");
        RoadModel m;
        m.S0 = 16e-6 * std::pow(4.0, static_cast<double>(cls - 'C'));
        m.V = speed;
        return m;
    }

    /// White-noise profile with the given two-sided level and no coherence loss.
    static RoadModel white_noise(double level, double speed = 20.0)
    {
        RoadModel m;
        m.V = speed;
        m.S0 = 2.0 * level * speed;
        m.e = 0.0;
        m.nu_a = 0.0;
        m.nu_b = std::numeric_limits<double>::infinity();
        m.mu = 0.0;
        return m;
    }

    std::vector<std::string> violations() const
    {
        std::vector<std::string> out;
        if (!(S0 > 0.0) || !std::isfinite(S0))
            out.emplace_back("road.S0 must be strictly positive");
        if (!(nu0 > 0.0))
            out.emplace_back("road.nu0 must be strictly positive");
        if (!(V > 0.0) || !std::isfinite(V))
            out.emplace_back("speed V must be strictly positive");
        if (!(mu >= 0.0))
            out.emplace_back("road.mu must be non-negative");
        if (!(nu_a < nu_b))
            out.emplace_back("road.nu_a must be below road.nu_b");
        if (!(nu_a >= 0.0))
            out.emplace_back("road.nu_a must be non-negative");
        if (!white() && !(nu_a > 0.0))
            out.emplace_back("road.nu_a must be positive unless the model is white (e = 0, unbounded band)");
        if (!(band_speed_min > 0.0) || !(band_speed_max >= band_speed_min))
            out.emplace_back("road.band_speed_min/max must satisfy 0 < min <= max");
        if (!std::isfinite(e))
            out.emplace_back("road.e must be finite");
        return out;
    }

    void validate() const
    {
        if (auto v = violations(); !v.empty()) {
            std::string msg = "invalid road model:";
            for (const auto& s : v)
                msg += " " + s + ";";
            throw ParameterError(msg);
        }
    }
};

/// One-sided spatial PSD (m^3), zero outside [nu_a, nu_b].
inline double iso8608_psd_spatial(double nu, const RoadModel& m)
{
    if (!(nu > 0.0))
        throw DomainError("iso8608_psd_spatial: spatial frequency must be positive");
    if (nu < m.nu_a || nu > m.nu_b)
        return 0.0;
    return m.S0 * std::pow(nu / m.nu0, -m.e);
}

/// One-sided temporal PSD (m^2 s/rad) at |omega|, zero outside the band.
inline double iso8608_psd_temporal_one_sided(double omega, const RoadModel& m)
{
    const double w = std::abs(omega);
    if (w < m.omega_a() || w > m.omega_b())
        return 0.0;
    if (m.e == 0.0)
        return m.S0 / m.V;
    return (m.S0 / m.V) * std::pow(w / m.omega0(), -m.e);
}

/// Two-sided temporal PSD, even in omega.
inline double iso8608_psd_temporal(double omega, const RoadModel& m)
{
    return 0.5 * iso8608_psd_temporal_one_sided(omega, m);
}

inline double bogsjo_coherence(double omega, double Wp, const RoadModel& m)
{
    if (Wp < 0.0)
        throw DomainError("bogsjo_coherence: negative track separation");
    return std::exp(-m.mu * Wp * std::abs(omega) / (2.0 * std::numbers::pi * m.V));
}

/// Half-width of the Lorentzian coherence kernel, a = mu Wp / (2 pi V), in seconds.
inline double coherence_time(double Wp, const RoadModel& m)
{
    return m.mu * Wp / (2.0 * std::numbers::pi * m.V);
}

namespace detail {

inline void symmetrise(LagFunction& f)
{
    const std::size_t n = f.values.size();
    for (std::size_t j = 0; j < f.grid.half; ++j) {
        const double avg = 0.5 * (f.values[j] + f.values[n - 1 - j]);
        f.values[j] = f.values[n - 1 - j] = avg;
    }
}

} // namespace detail

/// Lag-domain coherence kernel H_p(tau), the inverse transform of Gamma_p
/// over the grid's Nyquist band. Zero width gives a unit discrete mass.
inline LagFunction coherence_ift(double Wp, const RoadModel& m, const LagGrid& grid, double phase_step = 0.05)
{
    if (Wp < 0.0)
        throw DomainError("coherence_ift: negative track separation");
    LagFunction out{grid, std::vector<double>(grid.size(), 0.0)};
    const double a = coherence_time(Wp, m);
    if (a == 0.0) {
        out.values[grid.centre()] = 1.0 / grid.step;
        return out;
    }
    if (a < 2.0 * grid.step)
        throw ResolutionError("coherence_ift: lag step " + std::to_string(grid.step) +
                              " s too coarse for coherence width " + std::to_string(a) + " s");

    const std::size_t N = transform_size(grid.step, grid.span(), phase_step);
    const BandGrid band = BandGrid::make(0.0, std::numbers::pi / grid.step, 2.0 * std::numbers::pi / (static_cast<double>(N) * grid.step));
    Eigen::MatrixXcd F(static_cast<Eigen::Index>(band.count()), 1);
    for (std::size_t k = 0; k < band.count(); ++k)
        F(static_cast<Eigen::Index>(k), 0) = bogsjo_coherence(band.node(k), Wp, m);
    const Eigen::MatrixXd r = inverse_transform(band, F, grid, N);
    for (std::size_t j = 0; j < grid.size(); ++j)
        out.values[j] = r(static_cast<Eigen::Index>(j), 0);
    detail::symmetrise(out);
    return out;
}

/// Roughness autocorrelation R_d(tau). White models give a discrete mass.
inline LagFunction roughness_correlation(const RoadModel& m, const LagGrid& grid, double phase_step = 0.05)
{
    m.validate();
    LagFunction out{grid, std::vector<double>(grid.size(), 0.0)};
    if (m.white()) {
        out.values[grid.centre()] = m.flat_level() / grid.step;
        return out;
    }
    const double nyquist = std::numbers::pi / grid.step;
    if (nyquist < m.omega_b())
        throw AliasingError("roughness_correlation: lag-grid Nyquist " + std::to_string(nyquist) +
                            " rad/s below the band limit " + std::to_string(m.omega_b()) + " rad/s");

    const std::size_t N = transform_size(grid.step, grid.span(), phase_step);
    const BandGrid band = BandGrid::make(m.omega_a(), m.omega_b(), 2.0 * std::numbers::pi / (static_cast<double>(N) * grid.step));
    Eigen::MatrixXcd F(static_cast<Eigen::Index>(band.count()), 1);
    for (std::size_t k = 0; k < band.count(); ++k)
        F(static_cast<Eigen::Index>(k), 0) = iso8608_psd_temporal(band.node(k), m);
    const Eigen::MatrixXd r = inverse_transform(band, F, grid, N);
    for (std::size_t j = 0; j < grid.size(); ++j)
        out.values[j] = r(static_cast<Eigen::Index>(j), 0);
    detail::symmetrise(out);
    return out;
}

} // namespace roadmodal
