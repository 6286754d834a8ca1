#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "roadmodal/error.hpp"

namespace roadmodal {

/// Uniform lag grid symmetric about zero: tau_j = (j - half) * step.
struct LagGrid {
    double step = 0.0;
    std::size_t half = 0;

    std::size_t size() const { return 2 * half + 1; }
    std::size_t centre() const { return half; }
    double tau(std::size_t j) const { return (static_cast<double>(j) - static_cast<double>(half)) * step; }
    double span() const { return static_cast<double>(half) * step; }

    /// Smallest symmetric grid with the given step reaching at least `span`.
    static LagGrid covering(double step, double span)
    {
        if (!(step > 0.0))
            throw UsageError("lag grid step must be positive");
        return {step, static_cast<std::size_t>(std::ceil(span / step - 1e-9))};
    }

    bool operator==(const LagGrid& o) const { return step == o.step && half == o.half; }
};

struct LagFunction {
    LagGrid grid;
    std::vector<double> values;

    /// Sample at signed offset k from the centre, zero outside the grid.
    double at(long k) const
    {
        const long j = k + static_cast<long>(grid.half);
        if (j < 0 || j >= static_cast<long>(values.size()))
            return 0.0;
        return values[static_cast<std::size_t>(j)];
    }
};

struct MatrixLagFunction {
    LagGrid grid;
    std::vector<Eigen::MatrixXd> values;
};

/**
 * Frequency nodes for band-limited transforms: a uniform comb starting at
 * `lo` with spacing `dw`, closed by a partial cell ending exactly at `hi`.
 * When dw * dt * fft_size = 2 pi the comb maps onto an FFT.
 */
struct BandGrid {
    double lo = 0.0;
    double hi = 0.0;
    double dw = 0.0;
    std::size_t uniform = 0; ///< nodes lo + k dw, k < uniform
    bool closing = false;    ///< extra node at hi

    std::size_t count() const { return uniform + (closing ? 1 : 0); }
    double node(std::size_t k) const { return k < uniform ? lo + static_cast<double>(k) * dw : hi; }

    std::vector<double> nodes() const
    {
        std::vector<double> out(count());
        for (std::size_t k = 0; k < out.size(); ++k)
            out[k] = node(k);
        return out;
    }

    /// Trapezoid weights over [lo, hi].
    std::vector<double> weights() const
    {
        std::vector<double> w(count(), dw);
        w.front() = 0.5 * dw;
        const double last = lo + static_cast<double>(uniform - 1) * dw;
        w[uniform - 1] = 0.5 * dw;
        if (closing) {
            const double tail = hi - last;
            w[uniform - 1] += 0.5 * tail;
            w.back() = 0.5 * tail;
        }
        return w;
    }

    static BandGrid make(double lo, double hi, double dw)
    {
        if (!(hi > lo) || !(dw > 0.0))
            throw UsageError("band grid needs hi > lo and dw > 0");
        BandGrid g;
        g.lo = lo;
        g.hi = hi;
        g.dw = dw;
        g.uniform = static_cast<std::size_t>(std::floor((hi - lo) / dw * (1.0 + 1e-12))) + 1;
        const double last = lo + static_cast<double>(g.uniform - 1) * dw;
        g.closing = hi - last > 1e-12 * hi;
        if (g.uniform < 2)
            throw ResolutionError("frequency band narrower than two grid cells");
        return g;
    }
};

/// Power-of-two FFT length for lag step dt such that the frequency spacing
/// keeps dw * tau_max below `phase_step` and lags up to tau_max do not wrap.
inline std::size_t transform_size(double dt, double tau_max, double phase_step = 0.05)
{
    const double need = std::max(2.0 * std::numbers::pi * tau_max / (phase_step * dt), 4.0 * tau_max / dt + 4.0);
    std::size_t n = 1024;
    while (static_cast<double>(n) < need)
        n *= 2;
    return n;
}

/**
 * Real lag functions from even, Hermitian-extended spectra:
 *
 *   R_c(tau_j) = (1/pi) Re sum_k w_k F(k, c) exp(i omega_k tau_j),
 *
 * i.e. the trapezoid rule for (1/2 pi) times the integral over +-[lo, hi].
 * F has one row per band node and one column per channel; the result has
 * one row per lag. The uniform comb goes through an FFT of length fft_size
 * whose spacing must match band.dw.
 */
inline Eigen::MatrixXd inverse_transform(const BandGrid& band, const Eigen::MatrixXcd& F, const LagGrid& lags, std::size_t fft_size)
{
    using cd = std::complex<double>;
    if (static_cast<std::size_t>(F.rows()) != band.count())
        throw UsageError("inverse_transform: spectrum rows do not match band nodes");
    const double expected = 2.0 * std::numbers::pi / (static_cast<double>(fft_size) * lags.step);
    if (std::abs(band.dw - expected) > 1e-12 * expected)
        throw UsageError("inverse_transform: band spacing incompatible with the FFT length");
    if (2 * lags.half + 1 > fft_size)
        throw AliasingError("inverse_transform: lag grid longer than the transform period");

    const std::vector<double> w = band.weights();
    const std::size_t N = fft_size;
    Eigen::FFT<double> fft;
    fft.SetFlag(Eigen::FFT<double>::Unscaled);

    Eigen::MatrixXd out(static_cast<Eigen::Index>(lags.size()), F.cols());
    std::vector<cd> comb(N), spectrum(N);
    for (Eigen::Index c = 0; c < F.cols(); ++c) {
        std::fill(comb.begin(), comb.end(), cd(0.0));
        for (std::size_t k = 0; k < band.uniform; ++k)
            comb[k % N] += w[k] * F(static_cast<Eigen::Index>(k), c);
        fft.inv(spectrum, comb);

        const cd closing = band.closing ? w.back() * F(static_cast<Eigen::Index>(band.uniform), c) : cd(0.0);
        for (std::size_t j = 0; j < lags.size(); ++j) {
            const long s = static_cast<long>(j) - static_cast<long>(lags.half);
            const double tau = static_cast<double>(s) * lags.step;
            const std::size_t idx = static_cast<std::size_t>((s % static_cast<long>(N) + static_cast<long>(N)) % static_cast<long>(N));
            cd v = std::exp(cd(0.0, band.lo * tau)) * spectrum[idx];
            if (band.closing)
                v += closing * std::exp(cd(0.0, band.hi * tau));
            out(static_cast<Eigen::Index>(j), c) = v.real() / std::numbers::pi;
        }
    }
    return out;
}

/**
 * Discrete linear convolution scaled by the step:
 *
 *   c[k] = dt * sum_j a[j] b[k - j]
 *
 * with a indexed from a0, b from b0 and the output returned for the index
 * range [c0, c0 + nc). Quadrature weights belong in the inputs.
 */
inline std::vector<std::complex<double>> convolve(const std::vector<std::complex<double>>& a, long a0,
                                                  const std::vector<std::complex<double>>& b, long b0, double dt,
                                                  long c0, std::size_t nc)
{
    using cd = std::complex<double>;
    std::vector<cd> out(nc, cd(0.0));
    if (a.empty() || b.empty())
        return out;
    const std::size_t na = a.size();
    const std::size_t nb = b.size();

    if (static_cast<double>(na) * static_cast<double>(nb) < 2.0e5) {
        for (std::size_t k = 0; k < nc; ++k) {
            const long t = c0 + static_cast<long>(k);
            cd acc = 0.0;
            for (std::size_t i = 0; i < na; ++i) {
                const long jb = t - (a0 + static_cast<long>(i)) - b0;
                if (jb >= 0 && jb < static_cast<long>(nb))
                    acc += a[i] * b[static_cast<std::size_t>(jb)];
            }
            out[k] = dt * acc;
        }
        return out;
    }

    std::size_t N = 1;
    while (N < na + nb - 1)
        N *= 2;
    Eigen::FFT<double> fft;
    std::vector<cd> fa(N, cd(0.0)), fb(N, cd(0.0)), Fa, Fb, full;
    std::copy(a.begin(), a.end(), fa.begin());
    std::copy(b.begin(), b.end(), fb.begin());
    fft.fwd(Fa, fa);
    fft.fwd(Fb, fb);
    for (std::size_t k = 0; k < N; ++k)
        Fa[k] *= Fb[k];
    fft.inv(full, Fa);
    // full[m] is the sum over i + j = m, i.e. output index a0 + b0 + m.
    for (std::size_t k = 0; k < nc; ++k) {
        const long m = c0 + static_cast<long>(k) - a0 - b0;
        if (m >= 0 && m < static_cast<long>(na + nb - 1))
            out[k] = dt * full[static_cast<std::size_t>(m)];
    }
    return out;
}

inline std::vector<double> convolve(const std::vector<double>& a, long a0, const std::vector<double>& b, long b0, double dt,
                                    long c0, std::size_t nc)
{
    using cd = std::complex<double>;
    const std::vector<cd> ca(a.begin(), a.end()), cb(b.begin(), b.end());
    const auto c = convolve(ca, a0, cb, b0, dt, c0, nc);
    std::vector<double> out(nc);
    for (std::size_t k = 0; k < nc; ++k)
        out[k] = c[k].real();
    return out;
}

} // namespace roadmodal
