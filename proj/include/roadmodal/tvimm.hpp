#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "roadmodal/error.hpp"
#include "roadmodal/excitation.hpp"
#include "roadmodal/lag_transform.hpp"
#include "roadmodal/modal_core.hpp"
#include "roadmodal/road_surface.hpp"

namespace roadmodal {

/**
 * Operational reference coefficients, one 7 x 2N table per input path.
 *
 * Superscript 0 tables collect same-track wheel pairs, superscript 1 tables
 * cross-track pairs. alpha terms carry no delay, beta terms multiply
 * exp(+i w tau1) (rear wheel on the modal side), gamma terms exp(-i w tau1).
 */
struct TvimmCoefficients {
    Eigen::MatrixXcd alpha0, beta01, gamma01;
    Eigen::MatrixXcd alpha1, beta11, gamma11;

    Eigen::Index modes() const { return alpha0.cols(); }
};

namespace detail {

struct WheelPair {
    int a; ///< wheel on the summed mode m
    int b; ///< wheel on the reference mode n
};

inline const std::array<std::vector<WheelPair>, 6>& coefficient_pairs()
{
    static const std::array<std::vector<WheelPair>, 6> pairs{{
        {{0, 0}, {1, 1}, {2, 2}, {3, 3}}, // alpha0
        {{2, 0}, {3, 1}},                 // beta01
        {{0, 2}, {1, 3}},                 // gamma01
        {{0, 1}, {1, 0}, {2, 3}, {3, 2}}, // alpha1
        {{2, 1}, {3, 0}},                 // beta11
        {{0, 3}, {1, 2}},                 // gamma11
    }};
    return pairs;
}

template <class Factor>
TvimmCoefficients assemble_coefficients(const ModalDecomposition& md, const VehicleParams& p, Factor factor)
{
    if (md.dofs() != 7)
        throw UsageError("coefficient tables need the seven-dof full-car modal decomposition");
    const Eigen::Index n2 = md.modes();
    const auto kt = p.tyre_stiffness();
    const auto ct = p.tyre_damping();

    TvimmCoefficients out;
    std::array<Eigen::MatrixXcd*, 6> tables{&out.alpha0, &out.beta01, &out.gamma01, &out.alpha1, &out.beta11, &out.gamma11};
    for (auto* t : tables)
        *t = Eigen::MatrixXcd::Zero(7, n2);

    const auto& pairs = coefficient_pairs();
    for (Eigen::Index n = 0; n < n2; ++n) {
        const cd ln = md.poles(n);
        for (Eigen::Index m = 0; m < n2; ++m) {
            const cd lm = md.poles(m);
            const cd sum = ln + lm;
            if (std::abs(sum) < 1e-12 * std::abs(ln))
                throw NumericError("coefficient denominator lambda_n + lambda_m vanishes");
            const cd denom = md.modal_a(n) * md.modal_a(m) * sum;
            for (std::size_t t = 0; t < 6; ++t) {
                cd w = 0.0;
                for (const auto& pr : pairs[t])
                    w += md.psi(3 + pr.a, m) * md.psi(3 + pr.b, n) *
                         factor(kt[static_cast<std::size_t>(pr.a)], ct[static_cast<std::size_t>(pr.a)],
                                kt[static_cast<std::size_t>(pr.b)], ct[static_cast<std::size_t>(pr.b)], lm, ln);
                tables[t]->col(n) += (w / denom) * md.psi.col(m);
            }
        }
    }

    const Eigen::Index N = md.dofs();
    for (auto* t : tables) {
        const double scale = std::max(t->cwiseAbs().maxCoeff(), 1e-300);
        for (Eigen::Index n = 0; n < N; ++n) {
            if (md.real_pole[static_cast<std::size_t>(n)])
                continue;
            if ((t->col(n + N) - t->col(n).conjugate()).cwiseAbs().maxCoeff() > 1e-8 * scale)
                throw NumericError("coefficient tables violate conjugate-mode symmetry");
        }
    }
    return out;
}

} // namespace detail

/// Coefficient tables from the residue expansion of the input-output formula.
/// Each wheel contributes its tyre impedance k + c lambda evaluated at the
/// pole of the mode it is attached to.
inline TvimmCoefficients compute_coefficients(const ModalDecomposition& md, const VehicleParams& p)
{
    return detail::assemble_coefficients(md, p, [](double ka, double ca, double kb, double cb, cd lm, cd ln) {
        return -(ka + ca * lm) * (kb + cb * ln);
    });
}

/// Variant with both tyre impedances evaluated at lambda_m, in the shape
/// (c_a lambda_m + k_a)(c_b lambda_m - k_b). It agrees with
/// compute_coefficients only when tyre damping vanishes; kept so the
/// difference stays measurable.
inline TvimmCoefficients compute_coefficients_same_pole(const ModalDecomposition& md, const VehicleParams& p)
{
    return detail::assemble_coefficients(md, p, [](double ka, double ca, double kb, double cb, cd lm, cd) {
        return (ka + ca * lm) * (cb * lm - kb);
    });
}

/// Step function with the midpoint value at the jump.
inline double step(double t)
{
    return t > 0.0 ? 1.0 : (t < 0.0 ? 0.0 : 0.5);
}

/// Closed-form double convolutions of two modal exponentials with a
/// (possibly shifted) Dirac input.
struct EKernels {
    cd lambda_n;
    cd lambda_m;
    double tau1 = 0.0;

    cd e1(double tau) const
    {
        return -(std::exp(lambda_m * tau) * step(tau) + std::exp(-lambda_n * tau) * step(-tau)) / (lambda_n + lambda_m);
    }
    cd e2(double tau) const { return e1(tau + tau1); }
    cd e3(double tau) const { return e1(tau - tau1); }
};

inline EKernels e_kernels(cd lambda_n, cd lambda_m, double tau1)
{
    if (std::abs(lambda_n + lambda_m) < 1e-12 * std::abs(lambda_n))
        throw NumericError("e_kernels: lambda_n + lambda_m vanishes");
    return {lambda_n, lambda_m, tau1};
}

/// phi_n(w) for every mode, as columns of a 7 x 2N matrix.
inline Eigen::MatrixXcd reference_vectors_freq(double w, const TvimmCoefficients& c, const RoadModel& road, const DelayStructure& ds)
{
    const double sd = iso8608_psd_temporal(w, road);
    if (sd == 0.0)
        return Eigen::MatrixXcd::Zero(c.alpha0.rows(), c.modes());
    const cd ahead = std::exp(cd(0.0, w * ds.tau1));
    const cd behind = std::conj(ahead);
    const double g1 = bogsjo_coherence(w, ds.track_width, road);
    return sd * ((c.alpha0 + ahead * c.beta01 + behind * c.gamma01) + g1 * (c.alpha1 + ahead * c.beta11 + behind * c.gamma11));
}

/// Output PSD matrix at one frequency from the modal reference vectors.
inline Eigen::MatrixXcd output_psd_tvimm(double w, const ModalDecomposition& md, const TvimmCoefficients& c,
                                         const RoadModel& road, const DelayStructure& ds)
{
    const Eigen::MatrixXcd pos = reference_vectors_freq(w, c, road, ds);
    const Eigen::MatrixXcd neg = reference_vectors_freq(-w, c, road, ds);
    const Eigen::Index N = md.dofs();
    Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(N, N);
    const cd iw(0.0, w);
    for (Eigen::Index n = 0; n < md.modes(); ++n) {
        S += pos.col(n) * md.psi.col(n).transpose() / (iw - md.poles(n));
        S += md.psi.col(n) * neg.col(n).transpose() / (-iw - md.poles(n));
    }
    return S;
}

inline SpectralMatrixFunction output_psd_tvimm(const std::vector<double>& grid, const ModalDecomposition& md,
                                               const TvimmCoefficients& c, const RoadModel& road, const DelayStructure& ds)
{
    SpectralMatrixFunction out{grid, {}, "S_q"};
    out.values.reserve(grid.size());
    for (double w : grid)
        out.values.push_back(output_psd_tvimm(w, md, c, road, ds));
    return out;
}

/// Tuning of the lag-domain synthesis.
struct CorrelationOptions {
    double kernel_tolerance = 1e-12; ///< truncate exp(lambda s) below this level
    double coherence_span = 40.0;    ///< half-width (s) of the sampled coherence kernel
    double phase_step = 0.05;        ///< accuracy knob of the roughness inverse transform
};

/**
 * Output correlation matrix by discrete lag-domain convolution.
 *
 * The roughness correlation and the cross-track coherence kernel are
 * sampled on the lag grid; the modal step-exponential kernels
 * exp(lambda_n s) h(s) are applied analytically sample by sample, with
 * trapezoid weight 1/2 at s = 0. The grid step must divide tau1 and be at
 * most tau1 / 10.
 */
inline MatrixLagFunction output_corr_tvimm(const LagGrid& grid, const ModalDecomposition& md, const TvimmCoefficients& c,
                                           const RoadModel& road, const DelayStructure& ds, const CorrelationOptions& opt = {})
{
    const double dt = grid.step;
    long shift = 0;
    if (ds.tau1 > 0.0) {
        if (dt > ds.tau1)
            throw ResolutionError("output_corr_tvimm: lag step coarser than the axle delay");
        if (dt > ds.tau1 / 10.0 * (1.0 + 1e-12))
            throw ResolutionError("output_corr_tvimm: lag step must be at most tau1 / 10");
        const double ratio = ds.tau1 / dt;
        shift = std::lround(ratio);
        if (std::abs(ratio - static_cast<double>(shift)) > 1e-6 * ratio)
            throw ResolutionError("output_corr_tvimm: lag step must divide tau1 exactly");
    }

    double slowest = 0.0;
    for (Eigen::Index n = 0; n < md.modes(); ++n) {
        const double r = -md.poles(n).real();
        if (!(r > 0.0))
            throw DomainError("output_corr_tvimm: system is not strictly stable");
        slowest = slowest == 0.0 ? r : std::min(slowest, r);
    }
    const long kernel_len = static_cast<long>(std::ceil(std::log(1.0 / opt.kernel_tolerance) / slowest / dt));
    const long half = static_cast<long>(grid.half);
    const long u_half = half + shift;              // U needed on [-u_half, u_half]
    const long w_half = u_half + kernel_len;       // W needed on [-w_half, w_half]

    // W_0 = R_d, W_1 = R_d * H_1 on [-w_half, w_half].
    const bool coherent = coherence_time(ds.track_width, road) == 0.0;
    const long h_half = coherent ? 0 : static_cast<long>(std::ceil(opt.coherence_span / dt));
    const LagGrid rgrid{dt, static_cast<std::size_t>(w_half + h_half)};
    const LagFunction Rd = roughness_correlation(road, rgrid, opt.phase_step);

    std::vector<double> W0(static_cast<std::size_t>(2 * w_half + 1));
    for (long k = -w_half; k <= w_half; ++k)
        W0[static_cast<std::size_t>(k + w_half)] = Rd.at(k);
    std::vector<double> W1;
    if (coherent) {
        W1 = W0;
    } else {
        const LagFunction H = coherence_ift(ds.track_width, road, LagGrid{dt, static_cast<std::size_t>(h_half)}, opt.phase_step);
        W1 = convolve(Rd.values, -(w_half + h_half), H.values, -h_half, dt, -w_half, static_cast<std::size_t>(2 * w_half + 1));
    }
    const std::vector<cd> W0c(W0.begin(), W0.end()), W1c(W1.begin(), W1.end());

    // U_pn = W_p * e_n on [-u_half, u_half].
    const Eigen::Index n2 = md.modes();
    const std::size_t u_len = static_cast<std::size_t>(2 * u_half + 1);
    std::vector<std::array<std::vector<cd>, 2>> U(static_cast<std::size_t>(n2));
    for (Eigen::Index n = 0; n < n2; ++n) {
        std::vector<cd> e(static_cast<std::size_t>(kernel_len + 1));
        const cd ratio = std::exp(md.poles(n) * dt);
        cd v = 1.0;
        for (auto& x : e) {
            x = v;
            v *= ratio;
        }
        e[0] *= 0.5;
        U[static_cast<std::size_t>(n)][0] = convolve(W0c, -w_half, e, 0, dt, -u_half, u_len);
        U[static_cast<std::size_t>(n)][1] = convolve(W1c, -w_half, e, 0, dt, -u_half, u_len);
    }

    auto u_at = [&](Eigen::Index n, int p, long k) -> cd {
        return U[static_cast<std::size_t>(n)][static_cast<std::size_t>(p)][static_cast<std::size_t>(k + u_half)];
    };

    // R1(tau) = sum_n v_n(tau) psi_n^T, tabulated for every grid lag.
    const Eigen::Index N = md.dofs();
    std::vector<Eigen::MatrixXcd> R1(grid.size());
    for (long j = -half; j <= half; ++j) {
        Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(N, N);
        for (Eigen::Index n = 0; n < n2; ++n) {
            const Eigen::VectorXcd v = c.alpha0.col(n) * u_at(n, 0, j) + c.beta01.col(n) * u_at(n, 0, j + shift) +
                                       c.gamma01.col(n) * u_at(n, 0, j - shift) + c.alpha1.col(n) * u_at(n, 1, j) +
                                       c.beta11.col(n) * u_at(n, 1, j + shift) + c.gamma11.col(n) * u_at(n, 1, j - shift);
            acc += v * md.psi.col(n).transpose();
        }
        R1[static_cast<std::size_t>(j + half)] = std::move(acc);
    }

    MatrixLagFunction out{grid, std::vector<Eigen::MatrixXd>(grid.size())};
    double peak = 0.0, residue = 0.0;
    for (long j = -half; j <= half; ++j) {
        const Eigen::MatrixXcd R = R1[static_cast<std::size_t>(j + half)] + R1[static_cast<std::size_t>(half - j)].transpose();
        peak = std::max(peak, R.real().cwiseAbs().maxCoeff());
        residue = std::max(residue, R.imag().cwiseAbs().maxCoeff());
        out.values[static_cast<std::size_t>(j + half)] = R.real();
    }
    if (residue > 1e-8 * peak)
        throw NumericError("output_corr_tvimm: conjugate modes leave an imaginary residue of " + std::to_string(residue / peak));
    return out;
}

/// Applies q2 = T q1 to every sample: X -> T X T^T.
inline SpectralMatrixFunction map_coordinates(const SpectralMatrixFunction& S, const Eigen::MatrixXd& T)
{
    SpectralMatrixFunction out{S.omega, {}, S.quantity};
    const Eigen::MatrixXcd Tc = T.cast<cd>();
    out.values.reserve(S.values.size());
    for (const auto& X : S.values)
        out.values.push_back(Tc * X * Tc.transpose());
    return out;
}

inline MatrixLagFunction map_coordinates(const MatrixLagFunction& R, const Eigen::MatrixXd& T)
{
    MatrixLagFunction out{R.grid, {}};
    out.values.reserve(R.values.size());
    for (const auto& X : R.values)
        out.values.push_back(T * X * T.transpose());
    return out;
}

/// Both synthesised output descriptions.
struct OutputSpectra {
    SpectralMatrixFunction S_q;
    MatrixLagFunction R_q;
};

struct HalfSpectrumPair {
    int i = 0; ///< 0-based dof indices
    int j = 0;
    double relative_rms = 0.0;
};

struct HalfSpectrumReport {
    std::vector<HalfSpectrumPair> pairs;

    double max_discrepancy() const
    {
        double m = 0.0;
        for (const auto& p : pairs)
            m = std::max(m, p.relative_rms);
        return m;
    }
};

/**
 * Compares, per output pair, the Fourier transform of the positive-lag part
 * of R_q (trapezoid, weight 1/2 at tau = 0) with the first partial-fraction
 * sum sum_n phi_in(w) psi_jn / (i w - lambda_n). The two agree only for
 * uncorrelated white inputs. Frequencies where the road spectrum vanishes
 * are skipped.
 */
inline HalfSpectrumReport half_spectrum_check(const std::vector<double>& omega, const OutputSpectra& spectra,
                                              const ModalDecomposition& md, const TvimmCoefficients& c,
                                              const RoadModel& road, const DelayStructure& ds,
                                              const std::vector<std::pair<int, int>>& pairs)
{
    const MatrixLagFunction& R = spectra.R_q;
    const std::size_t half = R.grid.half;
    const double dt = R.grid.step;
    std::vector<double> num(pairs.size(), 0.0), den(pairs.size(), 0.0);

    for (double w : omega) {
        if (iso8608_psd_temporal(w, road) == 0.0)
            continue;
        std::vector<cd> ft(pairs.size(), cd(0.0));
        const cd rot = std::exp(cd(0.0, -w * dt));
        cd ph = 1.0;
        for (std::size_t k = 0; k <= half; ++k) {
            const Eigen::MatrixXd& X = R.values[half + k];
            const double wt = (k == 0 ? 0.5 : 1.0) * dt;
            for (std::size_t q = 0; q < pairs.size(); ++q)
                ft[q] += wt * X(pairs[q].first, pairs[q].second) * ph;
            ph *= rot;
        }
        const Eigen::MatrixXcd phi = reference_vectors_freq(w, c, road, ds);
        const cd iw(0.0, w);
        for (std::size_t q = 0; q < pairs.size(); ++q) {
            cd first = 0.0;
            for (Eigen::Index n = 0; n < md.modes(); ++n)
                first += phi(pairs[q].first, n) * md.psi(pairs[q].second, n) / (iw - md.poles(n));
            num[q] += std::norm(ft[q] - first);
            den[q] += std::norm(first);
        }
    }

    HalfSpectrumReport rep;
    for (std::size_t q = 0; q < pairs.size(); ++q)
        rep.pairs.push_back({pairs[q].first, pairs[q].second, den[q] > 0.0 ? std::sqrt(num[q] / den[q]) : 0.0});
    return rep;
}

} // namespace roadmodal
