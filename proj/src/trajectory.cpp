#include "ecoevo/trajectory.hpp"

namespace ecoevo {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::clonal_birth: return "clonal_birth";
        case EventKind::mutant_birth: return "mutant_birth";
        case EventKind::death: return "death";
    }
    return "?";
}

void renormalize(Trajectory& traj) {
    if (traj.renormalized) throw AlreadyRenormalized("trajectory is already renormalized");
    const double k = traj.K;
    const double k2 = k * k;
    for (auto& row : traj.histogram)
        for (double& v : row) v /= k;
    for (double& v : traj.mass) v /= k;
    for (double& v : traj.drift1) v /= k;
    for (double& v : traj.bracket1) v /= k2;
    for (double& v : traj.pair_term) v /= k;
    for (double& v : traj.base_term) v /= k;
    for (auto& p : traj.probes) {
        for (double& v : p.value) v /= k;
        for (double& v : p.drift) v /= k;
        for (double& v : p.bracket) v /= k2;
    }
    traj.renormalized = true;
}

}  // namespace ecoevo
