// Standard deviations of body heave, pitch and front wheel travel against
// speed on a class C road, from the zero-lag modal correlation. Prints CSV.

#include <cmath>
#include <cstdio>

#include "roadmodal/roadmodal.hpp"

int main()
{
    using namespace roadmodal;
    const auto p = VehicleParams::reference_car();
    const auto md = modal_decompose(to_state_space(build_system_matrices(p, CoordinateSet::cg)));
    const auto coeffs = compute_coefficients(md, p);
    std::printf("speed_m_s,axle_delay_s,sigma_zs_m,sigma_thetas_rad,sigma_zu1_m\n");
    for (double v = 10.0; v <= 30.0 + 1e-9; v += 2.5) {
        RoadModel road = RoadModel::iso_class('C', v);
        const auto ds = delay_structure(p, v);
        const LagGrid lags{ds.tau1 / 16.0, 0};
        const auto R = output_corr_tvimm(lags, md, coeffs, road, ds);
        const auto& R0 = R.values.front();
        std::printf("%.1f,%.5f,%.6e,%.6e,%.6e\n", v, ds.tau1, std::sqrt(R0(0, 0)), std::sqrt(R0(2, 2)), std::sqrt(R0(3, 3)));
    }
}
