#pragma once

#include <array>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "roadmodal/error.hpp"

namespace roadmodal {

/**
 * Physical constants of the seven-dof full-car model, strict SI units.
 *
 * Wheels are numbered 1..4 as right-front, left-front, right-rear, left-rear.
 */
struct VehicleParams {
    double W1 = 1.490;   ///< trackwidth (m)
    double L1f = 1.064;  ///< CG to front axle (m)
    double L1r = 1.596;  ///< CG to rear axle (m)
    double ms = 1150.0;  ///< sprung mass (kg)
    double jsx = 530.0;  ///< roll inertia (kg m^2)
    double jsy = 1630.0; ///< pitch inertia (kg m^2)
    double kf = 15750.0;
    double kr = 14000.0;
    double cf = 1475.0;
    double cr = 1310.0;
    double mu1 = 57.5;
    double mu2 = 57.5;
    double mu3 = 57.5;
    double mu4 = 57.5;
    double kft = 140000.0;
    double krt = 140000.0;
    double cft = 150.0;
    double crt = 150.0;

    /// Reference mid-size passenger car. Stiffness and damping entries are
    /// tabulated in kN/m and kN s/m and converted here.
    static VehicleParams reference_car()
    {
        VehicleParams p;
        p.kf = 15.75e3;
        p.kr = 14.00e3;
        p.cf = 1.475e3;
        p.cr = 1.310e3;
        p.kft = 140.0e3;
        p.krt = 140.0e3;
        p.cft = 0.150e3;
        p.crt = 0.150e3;
        return p;
    }

    double wheelbase() const { return L1f + L1r; }

    std::array<double, 4> unsprung_masses() const { return {mu1, mu2, mu3, mu4}; }
    std::array<double, 4> tyre_stiffness() const { return {kft, kft, krt, krt}; }
    std::array<double, 4> tyre_damping() const { return {cft, cft, crt, crt}; }

    /// Every violated invariant, empty when valid. Geometry problems are
    /// reported separately by geometry_violations().
    std::vector<std::string> violations() const
    {
        std::vector<std::string> out;
        auto positive = [&](double v, const char* name) {
            if (!(v > 0.0) || !std::isfinite(v))
                out.push_back(std::string(name) + " must be strictly positive");
        };
        auto nonneg = [&](double v, const char* name) {
            if (!(v >= 0.0) || !std::isfinite(v))
                out.push_back(std::string(name) + " must be non-negative");
        };
        positive(ms, "ms");
        positive(jsx, "jsx");
        positive(jsy, "jsy");
        positive(mu1, "mu1");
        positive(mu2, "mu2");
        positive(mu3, "mu3");
        positive(mu4, "mu4");
        positive(kf, "kf");
        positive(kr, "kr");
        positive(kft, "kft");
        positive(krt, "krt");
        nonneg(cf, "cf");
        nonneg(cr, "cr");
        nonneg(cft, "cft");
        nonneg(crt, "crt");
        return out;
    }

    std::vector<std::string> geometry_violations() const
    {
        std::vector<std::string> out;
        if (!(W1 > 0.0) || !std::isfinite(W1))
            out.emplace_back("W1 must be strictly positive");
        if (!(L1f + L1r > 0.0) || !std::isfinite(L1f + L1r))
            out.emplace_back("L1f + L1r must be strictly positive");
        return out;
    }

    void validate() const
    {
        if (auto g = geometry_violations(); !g.empty())
            throw GeometryError("degenerate geometry: " + g.front());
        if (auto v = violations(); !v.empty()) {
            std::string msg = "invalid vehicle parameters:";
            for (const auto& s : v)
                msg += " " + s + ";";
            throw ParameterError(msg);
        }
    }
};

enum class CoordinateSet { cg, corner };

inline std::string_view to_string(CoordinateSet c)
{
    return c == CoordinateSet::cg ? "cg" : "corner";
}

inline CoordinateSet parse_coordinate_set(std::string_view s)
{
    if (s == "cg")
        return CoordinateSet::cg;
    if (s == "corner")
        return CoordinateSet::corner;
    throw UsageError("unknown coordinate set '" + std::string(s) + "' (expected cg or corner)");
}

/// Short labels of the seven generalized coordinates.
inline const std::array<std::string_view, 7>& dof_labels(CoordinateSet c)
{
    static const std::array<std::string_view, 7> cg{"zs", "phis", "thetas", "zu1", "zu2", "zu3", "zu4"};
    static const std::array<std::string_view, 7> corner{"zs1", "zs2", "zs3", "zu1", "zu2", "zu3", "zu4"};
    return c == CoordinateSet::cg ? cg : corner;
}

struct SystemMatrices {
    Eigen::MatrixXd M;
    Eigen::MatrixXd C;
    Eigen::MatrixXd K;
    CoordinateSet coords = CoordinateSet::cg;

    Eigen::Index dofs() const { return M.rows(); }
};

/// Maps CG-set coordinates to corner-set coordinates, q2 = T q1.
inline Eigen::MatrixXd transformation_matrix(const VehicleParams& p)
{
    if (auto g = p.geometry_violations(); !g.empty())
        throw GeometryError("degenerate geometry: " + g.front());
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(7, 7);
    const double w = 0.5 * p.W1;
    T.block<3, 3>(0, 0) << 1.0, -w, -p.L1f,
                           1.0,  w, -p.L1f,
                           1.0, -w,  p.L1r;
    return T;
}

namespace detail {

// Shared layout of C1 and K1: suspension elements couple body and wheels,
// tyre elements act on the wheel diagonal only.
inline Eigen::MatrixXd assemble_cg(const VehicleParams& p, double sf, double sr, double tf, double tr)
{
    const double w = 0.5 * p.W1;
    const double a = p.L1f;
    const double b = p.L1r;
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(7, 7);

    X(0, 0) = 2.0 * (sf + sr);
    X(0, 2) = X(2, 0) = 2.0 * (sr * b - sf * a);
    X(1, 1) = 0.5 * (sf + sr) * p.W1 * p.W1;
    X(2, 2) = 2.0 * (sf * a * a + sr * b * b);

    // Body-wheel coupling rows: right wheels sit at -w, left at +w.
    const std::array<double, 4> s{sf, sf, sr, sr};
    const std::array<double, 4> side{-w, w, -w, w};
    const std::array<double, 4> lever{-a, -a, b, b};
    for (int k = 0; k < 4; ++k) {
        const int j = 3 + k;
        X(0, j) = X(j, 0) = -s[k];
        X(1, j) = X(j, 1) = -s[k] * side[k];
        X(2, j) = X(j, 2) = -s[k] * lever[k];
    }
    X(3, 3) = sf + tf;
    X(4, 4) = sf + tf;
    X(5, 5) = sr + tr;
    X(6, 6) = sr + tr;
    return X;
}

} // namespace detail

inline SystemMatrices build_system_matrices(const VehicleParams& p, CoordinateSet coords)
{
    p.validate();

    SystemMatrices s;
    s.coords = CoordinateSet::cg;
    s.M = Eigen::MatrixXd::Zero(7, 7);
    s.M.diagonal() << p.ms, p.jsx, p.jsy, p.mu1, p.mu2, p.mu3, p.mu4;
    s.C = detail::assemble_cg(p, p.cf, p.cr, p.cft, p.crt);
    s.K = detail::assemble_cg(p, p.kf, p.kr, p.kft, p.krt);

    if (coords == CoordinateSet::corner) {
        const Eigen::MatrixXd T = transformation_matrix(p);
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(T.transpose());
        // X2 = X1 T^-1, i.e. solve T^T X2^T = X1^T.
        auto right_divide = [&](const Eigen::MatrixXd& X) -> Eigen::MatrixXd {
            return lu.solve(X.transpose()).transpose();
        };
        s.M = right_divide(s.M);
        s.C = right_divide(s.C);
        s.K = right_divide(s.K);
        s.coords = CoordinateSet::corner;
    }
    return s;
}

} // namespace roadmodal
