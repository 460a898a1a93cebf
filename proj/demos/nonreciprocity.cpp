#include <cstdio>

#include "cmm/cmm.hpp"

using namespace cmm;

int main() {
    std::printf("drive-level bistability, K0 = 0.1 eta_b omega_b\n");
    for (auto dir : {DriveDirection::Clockwise, DriveDirection::Counterclockwise}) {
        const SystemParams p = presets::with_kerr_ratio(0.1, dir);
        const auto rep = bistability(reduced_coefficients(p.scaled(p.omega_b)));
        std::printf("  %-4s delta_F = %+.1f  three roots for %.2f < epsilon_d < %.2f (omega_b units)\n",
                    dir == DriveDirection::Clockwise ? "cw" : "ccw", p.delta_F / p.omega_b,
                    rep.turning_drives.back(), rep.turning_drives.front());
    }

    std::printf("\ncavity-mechanics log-negativity at delta_a = -1, delta_m~ = 1, T = 10 mK\n");
    std::printf("  %8s %8s %8s %8s\n", "delta_K", "dF=+0.1", "dF=0", "dF=-0.1");
    const Bath bath;
    for (double dk : {0.1, 0.0, -0.1}) {
        std::printf("  %+8.1f", dk);
        for (double df : {0.1, 0.0, -0.1}) {
            EffectiveParams e = figures::caption_base();
            e.delta_K = dk;
            e.delta_F = df;
            e.occupations = bath.occupations();
            std::printf(" %8.4f", entanglement_of(e, {}).E_N);
        }
        std::printf("\n");
    }
    return 0;
}
