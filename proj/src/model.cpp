#include "ecoevo/model.hpp"

#include <cmath>

namespace ecoevo {

const char* to_string(ScalingMode mode) {
    switch (mode) {
        case ScalingMode::none: return "none";
        case ScalingMode::capacity: return "capacity";
        case ScalingMode::accel_gauss: return "accel-gauss";
        case ScalingMode::accel_rare: return "accel-rare";
        case ScalingMode::tss_rare: return "tss-rare";
    }
    return "?";
}

ScalingMode scaling_mode_from_string(const std::string& s) {
    if (s == "none") return ScalingMode::none;
    if (s == "capacity") return ScalingMode::capacity;
    if (s == "accel-gauss") return ScalingMode::accel_gauss;
    if (s == "accel-rare") return ScalingMode::accel_rare;
    if (s == "tss-rare") return ScalingMode::tss_rare;
    throw ConfigError("unknown scaling mode '" + s + "'");
}

AppliedModel::AppliedModel(const ModelSpec& model, const ScalingSpec& scaling)
    : model_(&model), scaling_(scaling), mutation_(model.mutation) {
    if (scaling_.K < 1.0) throw ConfigError("carrying capacity K must be >= 1");
    switch (scaling_.mode) {
        case ScalingMode::none:
            if (scaling_.K != 1.0) throw ConfigError("scaling mode 'none' fixes K = 1");
            break;
        case ScalingMode::capacity:
            kernel_scale_ = 1.0 / scaling_.K;
            break;
        case ScalingMode::accel_gauss:
            kernel_scale_ = 1.0 / scaling_.K;
            accel_ = std::pow(scaling_.K, scaling_.eta);
            mutation_ = model.mutation.with_sigma_scaled(std::pow(scaling_.K, -0.5 * scaling_.eta));
            break;
        case ScalingMode::accel_rare:
            kernel_scale_ = 1.0 / scaling_.K;
            accel_ = std::pow(scaling_.K, scaling_.eta);
            mu_scale_ = std::pow(scaling_.K, -scaling_.eta);
            break;
        case ScalingMode::tss_rare:
            kernel_scale_ = 1.0 / scaling_.K;
            mu_scale_ = scaling_.u_K;
            break;
    }

    // Envelope of the per-candidate acceptance bands.  With I individuals the
    // death band needs d <= cbar (I+1); the two birth bands together need
    // b * max(C, 1) <= cbar (I+1).  Death grows at most linearly in I through
    // the scaled competition sum, so
    //   cbar = max(base-and-birth part, linear-in-I coefficient)
    // dominates both for every I >= 0.
    const Envelopes& e = model.env;
    const double cmax = std::max(mutation_.envelope_c(), 1.0);
    const double accel_part = accel_ * e.turnover_max * (1.0 + cmax);
    const double flat = accel_part + e.death_base + e.birth_max * cmax;
    const double linear = e.death_slope * model.U->bound() * kernel_scale_;
    cbar_ = std::max(flat, linear);
}

}  // namespace ecoevo
