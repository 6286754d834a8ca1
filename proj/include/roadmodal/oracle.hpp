#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "roadmodal/error.hpp"
#include "roadmodal/excitation.hpp"
#include "roadmodal/lag_transform.hpp"
#include "roadmodal/road_surface.hpp"
#include "roadmodal/vehicle_model.hpp"

namespace roadmodal {

/// Receptance G(w) = (K - w^2 M + i w C)^-1.
inline Eigen::MatrixXcd frf_matrix(double w, const SystemMatrices& sys)
{
    using cd = std::complex<double>;
    const Eigen::MatrixXcd Z = sys.K.cast<cd>() - (w * w) * sys.M.cast<cd>() + cd(0.0, w) * sys.C.cast<cd>();
    const Eigen::FullPivLU<Eigen::MatrixXcd> lu(Z);
    if (!lu.isInvertible())
        throw NumericError("frf_matrix: dynamic stiffness singular at omega = " + std::to_string(w));
    const Eigen::MatrixXcd G = lu.inverse();
    if (!G.allFinite())
        throw NumericError("frf_matrix: non-finite receptance at omega = " + std::to_string(w));
    const Eigen::Index n = Z.rows();
    const double res = (Z * G - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    if (res > 1e-10 * std::max(1.0, Z.cwiseAbs().maxCoeff() * G.cwiseAbs().maxCoeff()))
        throw NumericError("frf_matrix: ill-conditioned dynamic stiffness at omega = " + std::to_string(w));
    return G;
}

/// S_q = conj(G) S_f G^T at one frequency.
inline Eigen::MatrixXcd output_psd_oracle(double w, const SystemMatrices& sys, const RoadModel& road, const StaticGain& gain,
                                          const DelayStructure& ds)
{
    const Eigen::MatrixXcd Sf = force_psd_matrix(w, road, gain, ds);
    if (Sf.cwiseAbs().maxCoeff() == 0.0)
        return Eigen::MatrixXcd::Zero(sys.dofs(), sys.dofs());
    const Eigen::MatrixXcd G = frf_matrix(w, sys);
    return G.conjugate() * Sf * G.transpose();
}

inline SpectralMatrixFunction output_psd_oracle(const std::vector<double>& grid, const SystemMatrices& sys, const RoadModel& road,
                                                const StaticGain& gain, const DelayStructure& ds)
{
    SpectralMatrixFunction out{grid, {}, "S_q"};
    out.values.reserve(grid.size());
    for (double w : grid)
        out.values.push_back(output_psd_oracle(w, sys, road, gain, ds));
    return out;
}

namespace detail {

inline MatrixLagFunction symmetric_lag_function(const LagGrid& grid, const Eigen::MatrixXd& cols, Eigen::Index n)
{
    MatrixLagFunction out{grid, std::vector<Eigen::MatrixXd>(grid.size())};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const Eigen::RowVectorXd row = cols.row(static_cast<Eigen::Index>(j));
        out.values[j] = Eigen::Map<const Eigen::MatrixXd>(row.data(), n, n);
    }
    // R(tau) = R(-tau)^T holds analytically; remove rounding asymmetry.
    for (std::size_t j = 0; j < grid.half; ++j) {
        auto& lo = out.values[j];
        auto& hi = out.values[grid.size() - 1 - j];
        const Eigen::MatrixXd avg = 0.5 * (lo + hi.transpose());
        lo = avg;
        hi = avg.transpose();
    }
    auto& mid = out.values[grid.centre()];
    mid = 0.5 * (mid + mid.transpose()).eval();
    return out;
}

} // namespace detail

/**
 * R(tau) = (1/pi) Re int_0^inf S(w) e^{i w tau} dw by trapezoid over the
 * given samples, which must start at w = 0 and be uniformly spaced.
 */
inline MatrixLagFunction output_corr_oracle(const LagGrid& grid, const SpectralMatrixFunction& psd)
{
    using cd = std::complex<double>;
    const auto& w = psd.omega;
    if (w.size() < 2 || w.front() != 0.0)
        throw UsageError("output_corr_oracle: spectrum must be sampled from omega = 0");
    const double dw = w[1] - w[0];
    for (std::size_t k = 1; k < w.size(); ++k)
        if (std::abs(w[k] - w[k - 1] - dw) > 1e-9 * dw)
            throw UsageError("output_corr_oracle: spectrum must be uniformly sampled");
    if (grid.span() * dw > std::numbers::pi)
        throw AliasingError("output_corr_oracle: lag span exceeds half the period 2 pi / d omega");
    const Eigen::Index n = psd.values.front().rows();
    const Eigen::Index nc = n * n;

    Eigen::MatrixXd cols(static_cast<Eigen::Index>(grid.size()), nc);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double tau = grid.tau(j);
        const cd rot = std::exp(cd(0.0, dw * tau));
        cd ph = 1.0;
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(n, n);
        for (std::size_t k = 0; k < w.size(); ++k) {
            const double wt = (k == 0 || k + 1 == w.size()) ? 0.5 : 1.0;
            acc += (wt * ph) * psd.values[k];
            ph *= rot;
        }
        const Eigen::MatrixXd r = (dw / std::numbers::pi) * acc.real();
        cols.row(static_cast<Eigen::Index>(j)) = Eigen::Map<const Eigen::RowVectorXd>(r.data(), nc);
    }
    return detail::symmetric_lag_function(grid, cols, n);
}

/**
 * Dense oracle correlation: evaluates the input-output spectrum on a
 * band-aligned comb fine enough for the lag span and transforms it by FFT.
 * White roads are integrated up to the lag-grid Nyquist frequency. The comb
 * spacing never exceeds max_dw (rad/s) so resonance peaks stay resolved even
 * for short lag spans.
 */
inline MatrixLagFunction output_corr_oracle(const LagGrid& grid, const SystemMatrices& sys, const RoadModel& road,
                                            const StaticGain& gain, const DelayStructure& ds, double phase_step = 0.05,
                                            double max_dw = 0.02)
{
    const double nyquist = std::numbers::pi / grid.step;
    double lo = 0.0, hi = nyquist;
    if (!road.white()) {
        if (nyquist < road.omega_b())
            throw AliasingError("output_corr_oracle: lag-grid Nyquist below the road band limit");
        lo = road.omega_a();
        hi = road.omega_b();
    }
    std::size_t N = transform_size(grid.step, grid.span(), phase_step);
    while (2.0 * std::numbers::pi / (static_cast<double>(N) * grid.step) > max_dw)
        N *= 2;
    const BandGrid band = BandGrid::make(lo, hi, 2.0 * std::numbers::pi / (static_cast<double>(N) * grid.step));
    const Eigen::Index n = sys.dofs();
    Eigen::MatrixXcd F(static_cast<Eigen::Index>(band.count()), n * n);
    for (std::size_t k = 0; k < band.count(); ++k) {
        const Eigen::MatrixXcd S = output_psd_oracle(band.node(k), sys, road, gain, ds);
        F.row(static_cast<Eigen::Index>(k)) = Eigen::Map<const Eigen::RowVectorXcd>(S.data(), n * n);
    }
    return detail::symmetric_lag_function(grid, inverse_transform(band, F, grid, N), n);
}

struct ComparisonTolerances {
    double relative_rms = 1e-6;
    double pointwise = 1e-6;
};

struct PairError {
    int i = 0; ///< 0-based dof indices
    int j = 0;
    double relative_rms = 0.0;
};

/**
 * Outcome of comparing two sampled matrix functions.
 *
 * Pair errors are RMS differences over the comparison band divided by the
 * larger of the two RMS norms. The pointwise error is the Frobenius norm of
 * the difference over the larger Frobenius norm at the same sample for
 * spectra, and over the larger peak Frobenius norm for correlations.
 */
struct ComparisonReport {
    std::string quantity;
    std::vector<PairError> pairs;
    double max_pointwise = 0.0;
    double band_lo = 0.0; ///< rad/s or s
    double band_hi = 0.0;
    std::size_t samples = 0;
    ComparisonTolerances tolerances;
    bool pass = false;

    double max_relative_rms() const
    {
        double m = 0.0;
        for (const auto& p : pairs)
            m = std::max(m, p.relative_rms);
        return m;
    }
};

namespace detail {

inline std::vector<std::pair<int, int>> all_pairs(Eigen::Index n)
{
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.emplace_back(i, j);
    return out;
}

template <class Mat>
ComparisonReport compare_samples(const std::vector<const Mat*>& a, const std::vector<const Mat*>& b,
                                 std::vector<std::pair<int, int>> pairs, const ComparisonTolerances& tol, bool pointwise_by_peak)
{
    ComparisonReport rep;
    rep.tolerances = tol;
    rep.samples = a.size();
    if (a.empty())
        throw UsageError("compare: empty comparison band");
    const Eigen::Index n = a.front()->rows();
    if (pairs.empty())
        pairs = all_pairs(n);
    for (const auto& [i, j] : pairs)
        if (i < 0 || j < 0 || i >= n || j >= n)
            throw UsageError("compare: pair index outside the matrix");

    std::vector<double> diff(pairs.size(), 0.0), na(pairs.size(), 0.0), nb(pairs.size(), 0.0);
    double peak = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        peak = std::max({peak, a[k]->norm(), b[k]->norm()});
    for (std::size_t k = 0; k < a.size(); ++k) {
        const Mat& A = *a[k];
        const Mat& B = *b[k];
        for (std::size_t q = 0; q < pairs.size(); ++q) {
            const auto [i, j] = pairs[q];
            diff[q] += std::norm(A(i, j) - B(i, j));
            na[q] += std::norm(A(i, j));
            nb[q] += std::norm(B(i, j));
        }
        const double scale = pointwise_by_peak ? peak : std::max(A.norm(), B.norm());
        if (scale > 0.0)
            rep.max_pointwise = std::max(rep.max_pointwise, (A - B).norm() / scale);
    }
    for (std::size_t q = 0; q < pairs.size(); ++q) {
        const double ref = std::max(na[q], nb[q]);
        rep.pairs.push_back({pairs[q].first, pairs[q].second, ref > 0.0 ? std::sqrt(diff[q] / ref) : 0.0});
    }
    rep.pass = rep.max_pointwise <= tol.pointwise && rep.max_relative_rms() <= tol.relative_rms;
    return rep;
}

} // namespace detail

/// Compares two spectra on identical grids over the band [lo, hi] (rad/s).
inline ComparisonReport compare(const SpectralMatrixFunction& a, const SpectralMatrixFunction& b, const ComparisonTolerances& tol,
                                double lo, double hi, std::vector<std::pair<int, int>> pairs = {})
{
    if (a.omega != b.omega || a.values.size() != b.values.size() || a.values.size() != a.omega.size())
        throw UsageError("compare: spectra are sampled on different grids");
    std::vector<const Eigen::MatrixXcd*> pa, pb;
    for (std::size_t k = 0; k < a.omega.size(); ++k) {
        const double w = std::abs(a.omega[k]);
        if (w >= lo && w <= hi) {
            pa.push_back(&a.values[k]);
            pb.push_back(&b.values[k]);
        }
    }
    auto rep = detail::compare_samples(pa, pb, std::move(pairs), tol, false);
    rep.quantity = a.quantity;
    rep.band_lo = lo;
    rep.band_hi = hi;
    return rep;
}

/// Compares two lag functions on identical grids over the central fraction of lags.
inline ComparisonReport compare(const MatrixLagFunction& a, const MatrixLagFunction& b, const ComparisonTolerances& tol,
                                double central_fraction = 1.0, std::vector<std::pair<int, int>> pairs = {})
{
    if (!(a.grid == b.grid) || a.values.size() != b.values.size() || a.values.size() != a.grid.size())
        throw UsageError("compare: correlations are sampled on different lag grids");
    if (!(central_fraction > 0.0 && central_fraction <= 1.0))
        throw UsageError("compare: central fraction must lie in (0, 1]");
    const double limit = central_fraction * a.grid.span() * (1.0 + 1e-12);
    std::vector<const Eigen::MatrixXd*> pa, pb;
    for (std::size_t j = 0; j < a.grid.size(); ++j) {
        if (std::abs(a.grid.tau(j)) <= limit) {
            pa.push_back(&a.values[j]);
            pb.push_back(&b.values[j]);
        }
    }
    auto rep = detail::compare_samples(pa, pb, std::move(pairs), tol, true);
    rep.quantity = "R_q";
    rep.band_lo = -limit;
    rep.band_hi = limit;
    return rep;
}

/**
 * Mean spacing in Hz between successive 2 pi jumps of arg S_ij(w) over the
 * samples with w in [lo, hi]. A jump is a step of more than pi between
 * neighbouring samples, so the grid must resolve the phase slope.
 */
inline double phase_wrap_spacing_hz(const SpectralMatrixFunction& S, int i, int j, double lo, double hi)
{
    std::vector<double> wraps;
    double prev_w = 0.0, prev_phase = 0.0;
    bool have_prev = false;
    for (std::size_t k = 0; k < S.omega.size(); ++k) {
        const double w = S.omega[k];
        const std::complex<double> z = S.values[k](i, j);
        if (w < lo || w > hi || z == 0.0) {
            have_prev = false;
            continue;
        }
        const double ph = std::arg(z);
        if (have_prev && std::abs(ph - prev_phase) > std::numbers::pi)
            wraps.push_back(0.5 * (w + prev_w) / (2.0 * std::numbers::pi));
        prev_w = w;
        prev_phase = ph;
        have_prev = true;
    }
    if (wraps.size() < 2)
        throw DomainError("phase_wrap_spacing_hz: fewer than two phase wraps in the band");
    return (wraps.back() - wraps.front()) / static_cast<double>(wraps.size() - 1);
}

} // namespace roadmodal
