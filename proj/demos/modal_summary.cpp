// Prints the modal table of the reference car, with the dominant motion of
// each mode and the pole in both forms.

#include <cstdio>

#include "roadmodal/roadmodal.hpp"

int main()
{
    using namespace roadmodal;
    const auto p = VehicleParams::reference_car();
    const auto md = modal_decompose(to_state_space(build_system_matrices(p, CoordinateSet::cg)));
    std::printf("%-4s %-18s %10s %10s %24s\n", "mode", "label", "f (Hz)", "zeta (%)", "pole (1/s)");
    int k = 1;
    for (Eigen::Index n = 0; n < md.dofs(); ++n) {
        const auto mp = poles_to_modal(md.poles(n));
        const std::string label = classify_mode(md.psi.col(n), CoordinateSet::cg, p);
        std::printf("%-4d %-18s %10.4f %10.3f %11.4f %+11.4fi\n", k++, label.c_str(), mp.frequency_hz, 100.0 * mp.damping_ratio,
                    md.poles(n).real(), md.poles(n).imag());
    }
}
