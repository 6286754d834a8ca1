#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "roadmodal/error.hpp"
#include "roadmodal/vehicle_model.hpp"

namespace roadmodal {

using cd = std::complex<double>;

/// First-order form P x' + Q x = u with x = [q; q'].
struct StateSpace {
    Eigen::MatrixXd P;
    Eigen::MatrixXd Q;
    Eigen::MatrixXd A;

    Eigen::Index dofs() const { return P.rows() / 2; }
};

inline StateSpace to_state_space(const Eigen::MatrixXd& M, const Eigen::MatrixXd& C, const Eigen::MatrixXd& K)
{
    const Eigen::Index n = M.rows();
    if (M.cols() != n || C.rows() != n || C.cols() != n || K.rows() != n || K.cols() != n)
        throw UsageError("to_state_space: M, C, K must be square and of equal size");

    const Eigen::FullPivLU<Eigen::MatrixXd> mlu(M);
    if (!mlu.isInvertible())
        throw DecompositionError("to_state_space: mass matrix is singular");

    StateSpace ss;
    ss.P = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    ss.Q = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    ss.P.topLeftCorner(n, n) = C;
    ss.P.topRightCorner(n, n) = M;
    ss.P.bottomLeftCorner(n, n) = M;
    ss.Q.topLeftCorner(n, n) = K;
    ss.Q.bottomRightCorner(n, n) = -M;
    ss.A = -Eigen::FullPivLU<Eigen::MatrixXd>(ss.P).solve(ss.Q);

    const double res = (ss.P * ss.A + ss.Q).norm();
    if (!(res <= 1e-10 * std::max(ss.Q.norm(), 1.0)))
        throw DecompositionError("to_state_space: state matrix residual " + std::to_string(res));
    return ss;
}

inline StateSpace to_state_space(const SystemMatrices& sys)
{
    return to_state_space(sys.M, sys.C, sys.K);
}

/**
 * Complex modal decomposition of a real state-space system.
 *
 * Modes are stored in 2N columns. Column n and n + N are conjugate partners
 * for oscillatory modes, ordered by increasing |lambda|. Real (overdamped)
 * poles are split between the two halves and flagged in `real_pole`.
 */
struct ModalDecomposition {
    Eigen::VectorXcd poles;
    Eigen::MatrixXcd eigvecs;  ///< 2N x 2N, column n = [psi_n; lambda_n psi_n]
    Eigen::MatrixXcd psi;      ///< N x 2N
    Eigen::VectorXcd modal_a;
    Eigen::VectorXcd modal_b;
    std::vector<bool> real_pole;

    Eigen::Index dofs() const { return psi.rows(); }
    Eigen::Index modes() const { return poles.size(); }
};

namespace detail {

inline bool close_rel(cd a, cd b, double tol)
{
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// Null-space basis of (A - lambda I) of the requested dimension.
inline Eigen::MatrixXcd eigenspace(const Eigen::MatrixXd& A, cd lambda, Eigen::Index dim)
{
    Eigen::MatrixXcd B = A.cast<cd>();
    B.diagonal().array() -= lambda;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B, Eigen::ComputeFullV);
    return svd.matrixV().rightCols(dim);
}

inline cd bilinear(const Eigen::VectorXcd& v, const Eigen::MatrixXd& P, const Eigen::VectorXcd& w)
{
    return (v.transpose() * P.cast<cd>() * w)(0, 0);
}

// Basis of one eigenspace made orthogonal in the unconjugated form v^T P w.
// Pivoting on |v^T P v| avoids nearly isotropic directions; when every
// candidate is isotropic a pairwise sum is tried instead.
inline std::vector<Eigen::VectorXcd> p_orthogonalise(const Eigen::MatrixXcd& basis, const Eigen::MatrixXd& P,
                                                     std::size_t count, cd where)
{
    std::vector<Eigen::VectorXcd> pool;
    for (Eigen::Index c = 0; c < basis.cols(); ++c)
        pool.push_back(basis.col(c).normalized());
    const double pnorm = P.norm();
    auto quality = [&](const Eigen::VectorXcd& v) { return std::abs(bilinear(v, P, v)) / v.squaredNorm(); };

    std::vector<Eigen::VectorXcd> done;
    while (!pool.empty()) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < pool.size(); ++k)
            if (quality(pool[k]) > quality(pool[best]))
                best = k;
        if (quality(pool[best]) <= 1e-8 * pnorm && pool.size() > 1) {
            // All isotropic: v_i + v_j has self-product 2 v_i^T P v_j.
            for (std::size_t k = 1; k < pool.size(); ++k) {
                Eigen::VectorXcd s = pool[0] + pool[k];
                if (quality(s) > 1e-8 * pnorm) {
                    pool[0] = s.normalized();
                    best = 0;
                    break;
                }
            }
        }
        Eigen::VectorXcd v = pool[best];
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
        if (quality(v) <= 1e-10 * pnorm) {
            std::ostringstream os;
            os << "cannot build a P-orthogonal basis for the " << count << "-fold pole cluster at " << where.real()
               << (where.imag() < 0 ? "" : "+") << where.imag() << "i";
            throw DegeneracyError(os.str());
        }
        const cd self = bilinear(v, P, v);
        for (auto& w : pool) {
            w -= (bilinear(v, P, w) / self) * v;
            if (w.norm() > 0.0)
                w.normalize();
        }
        done.push_back(v);
    }
    return done;
}

// Scale so that the largest psi component equals exactly one.
inline void normalise_mode(Eigen::VectorXcd& v, Eigen::Index n)
{
    double peak = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
        peak = std::max(peak, std::abs(v(k)));
    Eigen::Index pivot = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (std::abs(v(k)) >= (1.0 - 1e-9) * peak) {
            pivot = k;
            break;
        }
    }
    if (peak == 0.0)
        throw DecompositionError("modal vector has a vanishing displacement block");
    v /= v(pivot);
}

// Groups consecutive entries of a sorted pole list into clusters.
inline std::vector<std::vector<std::size_t>> clusters(const std::vector<cd>& sorted, double tol)
{
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        if (!out.empty() && close_rel(sorted[out.back().front()], sorted[k], tol))
            out.back().push_back(k);
        else
            out.push_back({k});
    }
    return out;
}

} // namespace detail

inline ModalDecomposition modal_decompose(const StateSpace& ss)
{
    const Eigen::Index N = ss.dofs();
    const Eigen::Index n2 = 2 * N;
    const double anorm = ss.A.norm();

    Eigen::EigenSolver<Eigen::MatrixXd> es(ss.A, false);
    if (es.info() != Eigen::Success)
        throw DecompositionError("eigenvalue solve did not converge");
    const Eigen::VectorXcd ev = es.eigenvalues();

    std::vector<cd> upper, lower, real;
    for (Eigen::Index k = 0; k < n2; ++k) {
        const cd l = ev(k);
        const double tol = 1e-9 * std::max(std::abs(l), 1e-300);
        if (l.imag() > tol)
            upper.push_back(l);
        else if (l.imag() < -tol)
            lower.push_back(l);
        else
            real.emplace_back(l.real(), 0.0);
    }

    // Every upper pole needs a lower partner.
    if (upper.size() != lower.size())
        throw DegeneracyError("pole set is not closed under conjugation");
    {
        std::vector<bool> used(lower.size(), false);
        for (const cd& l : upper) {
            std::size_t best = lower.size();
            double dist = 0.0;
            for (std::size_t j = 0; j < lower.size(); ++j) {
                if (used[j])
                    continue;
                const double d = std::abs(std::conj(l) - lower[j]);
                if (best == lower.size() || d < dist) {
                    best = j;
                    dist = d;
                }
            }
            if (best == lower.size() || dist > 1e-6 * std::abs(l)) {
                std::ostringstream os;
                os << "conjugate pairing failed near pole " << l.real() << (l.imag() < 0 ? "" : "+") << l.imag() << "i";
                throw DegeneracyError(os.str());
            }
            used[best] = true;
        }
    }

    auto by_magnitude = [](cd a, cd b) {
        if (std::abs(a) != std::abs(b))
            return std::abs(a) < std::abs(b);
        if (a.imag() != b.imag())
            return a.imag() < b.imag();
        return a.real() < b.real();
    };
    std::sort(upper.begin(), upper.end(), by_magnitude);
    std::sort(real.begin(), real.end(), by_magnitude);

    const double cluster_tol = 1e-6;
    // Eigenvectors cluster by cluster; within a cluster the basis is made
    // orthogonal in the (unconjugated) P bilinear form.
    auto build = [&](const std::vector<cd>& list) {
        std::vector<cd> lam(list.size());
        std::vector<Eigen::VectorXcd> vecs(list.size());
        for (const auto& cl : detail::clusters(list, cluster_tol)) {
            cd centre = 0.0;
            for (std::size_t k : cl)
                centre += list[k];
            centre /= static_cast<double>(cl.size());
            if (cl.size() == 1)
                centre = list[cl.front()];
            const Eigen::MatrixXcd basis = detail::eigenspace(ss.A, centre, static_cast<Eigen::Index>(cl.size()));
            const std::vector<Eigen::VectorXcd> done = detail::p_orthogonalise(basis, ss.P, cl.size(), centre);
            for (std::size_t k = 0; k < cl.size(); ++k) {
                lam[cl[k]] = cl.size() == 1 ? list[cl[k]] : centre;
                vecs[cl[k]] = done[k];
            }
        }
        return std::pair{lam, vecs};
    };

    auto [ulam, uvec] = build(upper);
    auto [rlam, rvec] = build(real);

    ModalDecomposition md;
    md.poles.resize(n2);
    md.eigvecs.resize(n2, n2);
    md.real_pole.assign(static_cast<std::size_t>(n2), false);

    const Eigen::Index nu = static_cast<Eigen::Index>(ulam.size());
    const Eigen::Index nr = static_cast<Eigen::Index>(rlam.size());
    const Eigen::Index rhalf = nr / 2;
    auto place = [&](Eigen::Index col, cd l, const Eigen::VectorXcd& v, bool is_real) {
        md.poles(col) = l;
        md.eigvecs.col(col) = v;
        md.real_pole[static_cast<std::size_t>(col)] = is_real;
    };
    for (Eigen::Index k = 0; k < nu; ++k) {
        place(k, ulam[k], uvec[k], false);
        place(k + N, std::conj(ulam[k]), uvec[k].conjugate(), false);
    }
    for (Eigen::Index k = 0; k < nr; ++k) {
        const Eigen::Index col = k < rhalf ? nu + k : N + nu + (k - rhalf);
        Eigen::VectorXcd v = rvec[k].real().cast<cd>();
        if (v.norm() < 1e-8 * rvec[k].norm())
            v = rvec[k].imag().cast<cd>();
        place(col, rlam[k], v, true);
    }

    for (Eigen::Index k = 0; k < n2; ++k) {
        Eigen::VectorXcd v = md.eigvecs.col(k);
        detail::normalise_mode(v, N);
        md.eigvecs.col(k) = v;

        const cd l = md.poles(k);
        const double vn = v.norm();
        const double res = (ss.A.cast<cd>() * v - l * v).norm();
        if (!(res <= 1e-8 * anorm * vn))
            throw DecompositionError("eigen residual " + std::to_string(res / (anorm * vn)) + " exceeds tolerance");
        const double structure = (v.tail(N) - l * v.head(N)).norm();
        if (!(structure <= 1e-8 * std::max(v.tail(N).norm(), 1.0)))
            throw DecompositionError("eigenvector lacks the [psi; lambda psi] structure");
    }

    md.psi = md.eigvecs.topRows(N);
    const Eigen::MatrixXcd Pc = ss.P.cast<cd>();
    const Eigen::MatrixXcd Qc = ss.Q.cast<cd>();
    const Eigen::MatrixXcd VPV = md.eigvecs.transpose() * Pc * md.eigvecs;
    md.modal_a = VPV.diagonal();
    md.modal_b = (md.eigvecs.transpose() * Qc * md.eigvecs).diagonal();

    const double diag_max = md.modal_a.cwiseAbs().maxCoeff();
    double off_max = 0.0;
    for (Eigen::Index i = 0; i < n2; ++i)
        for (Eigen::Index j = 0; j < n2; ++j)
            if (i != j)
                off_max = std::max(off_max, std::abs(VPV(i, j)));
    if (!(off_max <= 1e-8 * diag_max))
        throw DecompositionError("modal vectors are not P-orthogonal (non-symmetric system matrices?)");

    for (Eigen::Index k = 0; k < n2; ++k) {
        const cd expect = -md.poles(k) * md.modal_a(k);
        if (std::abs(md.modal_b(k) - expect) > 1e-8 * std::max(std::abs(expect), diag_max * 1e-8))
            throw DecompositionError("modal b does not equal -lambda * modal a");
    }
    return md;
}

/// Natural frequency and damping ratio of one pole.
struct ModalParameters {
    double frequency_hz = 0.0;
    double damping_ratio = 0.0;
    std::string label;

    double omega() const { return 2.0 * std::numbers::pi * frequency_hz; }
};

inline ModalParameters poles_to_modal(cd lambda)
{
    const double mag = std::abs(lambda);
    if (lambda.real() > 0.0)
        throw DomainError("poles_to_modal: unstable pole");
    if (std::abs(lambda.imag()) <= 1e-12 * mag)
        throw ClassificationError("poles_to_modal: real (overdamped) pole " + std::to_string(lambda.real()));
    ModalParameters mp;
    mp.frequency_hz = mag / (2.0 * std::numbers::pi);
    mp.damping_ratio = -lambda.real() / mag;
    return mp;
}

/// Inverse of poles_to_modal, upper half-plane member.
inline cd modal_to_pole(double frequency_hz, double damping_ratio)
{
    const double w = 2.0 * std::numbers::pi * frequency_hz;
    return {-damping_ratio * w, w * std::sqrt(1.0 - damping_ratio * damping_ratio)};
}

/**
 * Names a CG-set mode shape after its dominant motion.
 *
 * Body coordinates are compared as corner displacements (roll times half
 * the track, pitch times half the wheelbase), so the geometry is needed.
 * Wheel-dominated shapes are split into hop and roll by the relative phase
 * of the two wheels on the dominant axle. Dominance ratios under 1.1
 * produce "Mixed".
 */
inline std::string classify_mode(const Eigen::VectorXcd& psi, CoordinateSet coords, const VehicleParams& geom)
{
    if (coords != CoordinateSet::cg)
        throw UsageError("classify_mode expects CG-set modal vectors");
    if (psi.size() != 7)
        throw UsageError("classify_mode expects a 7-component vector");

    constexpr double ratio = 1.1;
    const std::array<double, 3> body{
        std::abs(psi(0)),
        std::abs(psi(1)) * 0.5 * geom.W1,
        std::abs(psi(2)) * 0.5 * geom.wheelbase(),
    };
    const double front = std::max(std::abs(psi(3)), std::abs(psi(4)));
    const double rear = std::max(std::abs(psi(5)), std::abs(psi(6)));
    const double body_max = *std::max_element(body.begin(), body.end());
    const double wheel_max = std::max(front, rear);

    if (body_max == 0.0 && wheel_max == 0.0)
        return "Mixed";

    if (body_max >= wheel_max) {
        if (body_max < ratio * wheel_max)
            return "Mixed";
        std::array<std::size_t, 3> idx{0, 1, 2};
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return body[a] > body[b]; });
        if (body[idx[0]] < ratio * body[idx[1]])
            return "Mixed";
        static const std::array<const char*, 3> names{"Heave", "Roll", "Pitch"};
        return names[idx[0]];
    }

    if (wheel_max < ratio * body_max)
        return "Mixed";
    const bool is_front = front >= rear;
    if (std::max(front, rear) < ratio * std::min(front, rear))
        return "Mixed";
    const Eigen::Index r = is_front ? 3 : 5;
    const double phase = (psi(r) * std::conj(psi(r + 1))).real();
    const std::string axle = is_front ? "Front axle " : "Rear axle ";
    return axle + (phase >= 0.0 ? "hop" : "roll");
}

/// g(t) = sum over all 2N modes of psi psi^T e^{lambda t} / m_a, t >= 0.
inline std::vector<Eigen::MatrixXd> impulse_response_matrix(const ModalDecomposition& md, const std::vector<double>& t_grid)
{
    const Eigen::Index N = md.dofs();
    std::vector<Eigen::MatrixXcd> residues(static_cast<std::size_t>(md.modes()));
    for (Eigen::Index n = 0; n < md.modes(); ++n)
        residues[static_cast<std::size_t>(n)] = md.psi.col(n) * md.psi.col(n).transpose() / md.modal_a(n);

    std::vector<Eigen::MatrixXd> out;
    out.reserve(t_grid.size());
    for (double t : t_grid) {
        if (t < 0.0)
            throw DomainError("impulse_response_matrix: negative time " + std::to_string(t));
        Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(N, N);
        double scale = 0.0;
        for (Eigen::Index n = 0; n < md.modes(); ++n) {
            const cd e = std::exp(md.poles(n) * t);
            g += residues[static_cast<std::size_t>(n)] * e;
            scale += residues[static_cast<std::size_t>(n)].cwiseAbs().maxCoeff() * std::abs(e);
        }
        if (g.imag().cwiseAbs().maxCoeff() > 1e-10 * scale)
            throw NumericError("impulse_response_matrix: conjugate modes do not cancel");
        out.push_back(g.real());
    }
    return out;
}

/// Oscillatory modes of the first half, paired with their labels.
inline std::vector<ModalParameters> modal_table(const ModalDecomposition& md, const VehicleParams& geom, CoordinateSet coords = CoordinateSet::cg)
{
    std::vector<ModalParameters> out;
    for (Eigen::Index n = 0; n < md.dofs(); ++n) {
        if (md.real_pole[static_cast<std::size_t>(n)])
            continue;
        ModalParameters mp = poles_to_modal(md.poles(n));
        mp.label = md.dofs() == 7 && coords == CoordinateSet::cg ? classify_mode(md.psi.col(n), coords, geom) : "Mixed";
        out.push_back(mp);
    }
    return out;
}

} // namespace roadmodal
