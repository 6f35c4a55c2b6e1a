#pragma once

#include <string>
#include <vector>

#include "jpa/model.hpp"

namespace jpa {

/// Knobs of the synthetic scene generator. The generator stands in for a
/// detector network: it renders per-joint confidence maps around ground
/// truth poses, with distractor persons attenuated rather than removed and
/// bounded uniform noise on top.
struct SynthConfig {
    int width = 320;
    int height = 320;
    int persons_min = 1;
    int persons_max = 1;
    double overlap = 0.0;        // 0 = well separated, 1 = stacked
    double sigma = 2.0;          // peak width in pixels
    double attenuation = 0.7;    // peak scale of non-primary persons
    double noise_amplitude = 0.0;
    double dropout = 0.0;        // per-joint occlusion probability
    double region_margin = 1.3;  // region box scale around the person
    double region_jitter = 4.0;  // region center jitter in pixels
    double height_min = 130.0;   // person height range in pixels
    double height_max = 170.0;
    std::uint64_t seed = 1;

    void check() const;  // throws ConfigError
};

/// Named parameter sets selectable from the CLI. Unknown names throw
/// ConfigError.
SynthConfig preset_config(const std::string& name);

/// Renders one scene: poses, regions, and all score maps, fully determined
/// by (cfg, index). The scene stores its derived seed and render parameters
/// so maps can be re-rendered identically when a serialized scene omits
/// them.
Scene generate_scene(const SynthConfig& cfg, int index = 0);

/// Fills scene.maps from persons, regions, render parameters, and the
/// scene seed. Idempotent; used by generate_scene and by the scene loader.
void render_scene_maps(Scene& scene);

/// Up to n local maxima of the map, strongest first, greedily suppressing
/// maxima closer than nms_radius to one already taken. Deterministic
/// stand-in for stochastic candidate sampling; n = 1 degenerates to the
/// argmax choice.
std::vector<Detection> sample_candidates(const ScoreMap& map, int n, double nms_radius);

/// Baseline pose: per joint the global argmax of its map (ties to the
/// smallest row-major index), translated by the region origin. Always
/// produces all 14 joints.
PersonPose argmax_baseline(const RegionMaps& maps, const Box& region = Box{});

}  // namespace jpa
