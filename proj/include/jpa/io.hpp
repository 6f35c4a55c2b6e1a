#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "jpa/affinity.hpp"
#include "jpa/association.hpp"
#include "jpa/global_model.hpp"
#include "jpa/model.hpp"

namespace jpa {

using Json = nlohmann::ordered_json;

/// Every file format carries "format": "<name>/<major>". Readers accept
/// exactly the major version they were built for and reject the rest.
void check_format(const Json& j, const std::string& name, int major = 1);

Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

/// Scene files ("jpa-scene/1"): ground truth, regions, render parameters,
/// and optionally the rendered maps. When maps are omitted the loader
/// re-renders them from the stored seed, which reproduces them exactly.
Json scene_to_json(const Scene& scene, bool include_maps = false);
Scene scene_from_json(const Json& j);
void write_scene(const Scene& scene, const std::string& path, bool include_maps = false);
Scene read_scene(const std::string& path);

/// Scene files in a directory, in filename order.
std::vector<std::string> list_scene_files(const std::string& dir);
std::vector<Scene> read_scene_dir(const std::string& dir);

/// Pairwise model files ("jpa-model/1"). Loading verifies the stored
/// feature-schema hash against this build's schema.
Json model_to_json(const PairwiseModel& model);
PairwiseModel model_from_json(const Json& j);
void write_model(const PairwiseModel& model, const std::string& path);
PairwiseModel read_model(const std::string& path);

/// Association instances ("jpa-instance/1"), replayable in bug reports.
Json instance_to_json(const AssociationInstance& inst);
AssociationInstance instance_from_json(const Json& j);

/// Global instances ("jpa-global-instance/1").
Json global_instance_to_json(const GlobalInstance& inst);
GlobalInstance global_instance_from_json(const Json& j);

/// Predictions ("jpa-pred/1"): per scene, one pose per region, plus the
/// solve settings that produced them. Timing lives in a separate stats
/// file so predictions are byte-reproducible.
struct Predictions {
    std::string mode = "ljpa";
    double tau = 0.2;
    int n_candidates = 5;
    double nms_radius = 1.5;
    std::uint64_t seed = 1;
    int skipped_regions = 0;
    std::vector<std::vector<PersonPose>> poses;  // poses[scene][region]
};

Json predictions_to_json(const Predictions& pred);
Predictions predictions_from_json(const Json& j);
void write_predictions(const Predictions& pred, const std::string& path);
Predictions read_predictions(const std::string& path);

}  // namespace jpa
