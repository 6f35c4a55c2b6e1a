#include "jpa/io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "jpa/features.hpp"
#include "jpa/synth.hpp"

namespace jpa {

namespace {

Json vec_to_json(const Vec& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Vec vec_from_json(const Json& j) {
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[Eigen::Index(i)] = j[i].get<double>();
    return v;
}

Json point_to_json(const Point2& p) { return Json::array({p.x(), p.y()}); }

Point2 point_from_json(const Json& j) {
    if (!j.is_array() || j.size() != 2) throw DataError("point must be a [u, v] pair");
    return Point2(j[0].get<double>(), j[1].get<double>());
}

Json box_to_json(const Box& b) {
    return Json{{"x0", b.x0}, {"y0", b.y0}, {"width", b.width}, {"height", b.height}};
}

Box box_from_json(const Json& j) {
    Box b;
    b.x0 = j.at("x0").get<double>();
    b.y0 = j.at("y0").get<double>();
    b.width = j.at("width").get<double>();
    b.height = j.at("height").get<double>();
    return b;
}

[[noreturn]] void rethrow_as_data_error(const std::string& what, const std::string& context) {
    throw DataError(context + ": " + what);
}

std::string hash_to_hex(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::uint64_t hash_from_hex(const std::string& s) {
    if (s.size() != 16) throw DataError("schema hash must be 16 hex digits");
    return std::stoull(s, nullptr, 16);
}

}  // namespace

void check_format(const Json& j, const std::string& name, int major) {
    if (!j.is_object() || !j.contains("format") || !j["format"].is_string())
        throw DataError("missing format field, expected " + name + "/" + std::to_string(major));
    const std::string fmt = j["format"].get<std::string>();
    const auto slash = fmt.rfind('/');
    if (slash == std::string::npos)
        throw DataError("malformed format string \"" + fmt + "\"");
    const std::string got_name = fmt.substr(0, slash);
    int got_major = -1;
    try {
        got_major = std::stoi(fmt.substr(slash + 1));
    } catch (const std::exception&) {
        throw DataError("malformed format version in \"" + fmt + "\"");
    }
    if (got_name != name)
        throw DataError("expected a " + name + " file, got \"" + fmt + "\"");
    if (got_major != major)
        throw DataError("unsupported " + name + " version " + std::to_string(got_major) +
                        ", this build reads version " + std::to_string(major));
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        rethrow_as_data_error(e.what(), "failed to parse " + path);
    }
}

void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw ConfigError("write failed for " + path);
}

Json scene_to_json(const Scene& scene, bool include_maps) {
    Json j;
    j["format"] = "jpa-scene/1";
    j["width"] = scene.width;
    j["height"] = scene.height;
    j["seed"] = scene.seed;
    j["render"] = Json{{"sigma", scene.render.sigma},
                       {"attenuation", scene.render.attenuation},
                       {"noise_amplitude", scene.render.noise_amplitude}};
    Json persons = Json::array();
    for (const GroundTruthPerson& p : scene.persons) {
        Json joints = Json::array();
        Json visible = Json::array();
        for (int k = 0; k < kJointCount; ++k) {
            joints.push_back(point_to_json(p.joints[k]));
            visible.push_back(p.visible[k]);
        }
        persons.push_back(Json{{"joints", joints}, {"visible", visible}});
    }
    j["persons"] = persons;
    Json regions = Json::array();
    for (const Box& b : scene.regions) regions.push_back(box_to_json(b));
    j["regions"] = regions;
    if (include_maps) {
        Json maps = Json::array();
        for (const RegionMaps& rm : scene.maps) {
            Json region_entry;
            region_entry["rows"] = rm[0].values.rows();
            region_entry["cols"] = rm[0].values.cols();
            Json channels = Json::array();
            for (const ScoreMap& m : rm) {
                Json flat = Json::array();
                for (Eigen::Index r = 0; r < m.values.rows(); ++r)
                    for (Eigen::Index c = 0; c < m.values.cols(); ++c)
                        flat.push_back(m.values(r, c));
                channels.push_back(std::move(flat));
            }
            region_entry["channels"] = std::move(channels);
            maps.push_back(std::move(region_entry));
        }
        j["maps"] = std::move(maps);
    }
    return j;
}

Scene scene_from_json(const Json& j) {
    check_format(j, "jpa-scene");
    try {
        Scene scene;
        scene.width = j.at("width").get<int>();
        scene.height = j.at("height").get<int>();
        scene.seed = j.at("seed").get<std::uint64_t>();
        const Json& render = j.at("render");
        scene.render.sigma = render.at("sigma").get<double>();
        scene.render.attenuation = render.at("attenuation").get<double>();
        scene.render.noise_amplitude = render.at("noise_amplitude").get<double>();
        if (scene.width <= 0 || scene.height <= 0)
            throw DataError("scene dimensions must be positive");
        for (const Json& pj : j.at("persons")) {
            GroundTruthPerson p;
            const Json& joints = pj.at("joints");
            const Json& visible = pj.at("visible");
            if (joints.size() != kJointCount || visible.size() != kJointCount)
                throw DataError("person must have exactly " + std::to_string(kJointCount) +
                                " joints");
            for (int k = 0; k < kJointCount; ++k) {
                p.joints[k] = point_from_json(joints[k]);
                p.visible[k] = visible[k].get<bool>();
            }
            scene.persons.push_back(p);
        }
        for (const Json& bj : j.at("regions")) scene.regions.push_back(box_from_json(bj));
        if (scene.regions.size() != scene.persons.size())
            throw DataError("scene must have one region per person");
        if (j.contains("maps")) {
            const Json& maps = j.at("maps");
            if (maps.size() != scene.regions.size())
                throw DataError("stored maps must cover every region");
            for (std::size_t i = 0; i < maps.size(); ++i) {
                const Json& entry = maps[i];
                const int rows = entry.at("rows").get<int>();
                const int cols = entry.at("cols").get<int>();
                const Json& channels = entry.at("channels");
                if (channels.size() != kChannelCount)
                    throw DataError("region maps must have " + std::to_string(kChannelCount) +
                                    " channels");
                RegionMaps rm;
                for (int ch = 0; ch < kChannelCount; ++ch) {
                    const Json& flat = channels[ch];
                    if (int(flat.size()) != rows * cols)
                        throw DataError("map size mismatch in stored scene");
                    ScoreMap m;
                    m.channel = ch;
                    m.values.resize(rows, cols);
                    for (int r = 0; r < rows; ++r)
                        for (int c = 0; c < cols; ++c)
                            m.values(r, c) = flat[std::size_t(r) * cols + c].get<double>();
                    rm[ch] = std::move(m);
                }
                scene.maps.push_back(std::move(rm));
            }
        } else {
            render_scene_maps(scene);
        }
        return scene;
    } catch (const nlohmann::json::exception& e) {
        rethrow_as_data_error(e.what(), "bad scene file");
    }
}

void write_scene(const Scene& scene, const std::string& path, bool include_maps) {
    save_json_file(path, scene_to_json(scene, include_maps));
}

Scene read_scene(const std::string& path) { return scene_from_json(load_json_file(path)); }

std::vector<std::string> list_scene_files(const std::string& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        const std::string name = entry.path().filename().string();
        if (name.rfind("scene_", 0) == 0 && name.size() > 5 &&
            name.substr(name.size() - 5) == ".json")
            files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("no scene files (scene_*.json) in " + dir);
    return files;
}

std::vector<Scene> read_scene_dir(const std::string& dir) {
    std::vector<Scene> scenes;
    for (const std::string& path : list_scene_files(dir)) scenes.push_back(read_scene(path));
    return scenes;
}

Json model_to_json(const PairwiseModel& model) {
    Json j;
    j["format"] = "jpa-model/1";
    j["schema_hash"] = hash_to_hex(model.schema_hash);
    Json pairs = Json::array();
    for (std::size_t idx = 0; idx < model.models.size(); ++idx) {
        if (!model.models[idx]) {
            pairs.push_back(nullptr);
            continue;
        }
        const PairModel& pm = *model.models[idx];
        Json pj;
        pj["same_type"] = pm.same_type;
        pj["mean"] = vec_to_json(pm.mean);
        pj["stddev"] = vec_to_json(pm.stddev);
        pj["platt"] = Json{{"a", pm.platt.a}, {"b", pm.platt.b}};
        pj["positives"] = pm.positives;
        pj["negatives"] = pm.negatives;
        pj["holdout_accuracy"] = pm.holdout_accuracy;
        if (std::holds_alternative<LogisticModel>(pm.classifier)) {
            const LogisticModel& lm = std::get<LogisticModel>(pm.classifier);
            pj["kind"] = "logistic";
            pj["weights"] = vec_to_json(lm.weights);
            pj["bias"] = lm.bias;
        } else {
            const RbfSvmModel& sm = std::get<RbfSvmModel>(pm.classifier);
            pj["kind"] = "rbf_svm";
            pj["gamma"] = sm.gamma;
            pj["bias"] = sm.bias;
            pj["coeff"] = vec_to_json(sm.coeff);
            Json support = Json::array();
            for (Eigen::Index r = 0; r < sm.support.rows(); ++r) {
                Json row = Json::array();
                for (Eigen::Index c = 0; c < sm.support.cols(); ++c)
                    row.push_back(sm.support(r, c));
                support.push_back(std::move(row));
            }
            pj["support"] = std::move(support);
        }
        pairs.push_back(std::move(pj));
    }
    j["pairs"] = std::move(pairs);
    return j;
}

PairwiseModel model_from_json(const Json& j) {
    check_format(j, "jpa-model");
    try {
        PairwiseModel model;
        model.schema_hash = hash_from_hex(j.at("schema_hash").get<std::string>());
        if (model.schema_hash != feature_schema_hash())
            throw DataError(
                "model was trained with a different feature schema; retrain with this build");
        const Json& pairs = j.at("pairs");
        if (pairs.size() != kTypePairCount)
            throw DataError("model must have " + std::to_string(kTypePairCount) +
                            " pair entries");
        model.models.resize(kTypePairCount);
        for (std::size_t idx = 0; idx < kTypePairCount; ++idx) {
            const Json& pj = pairs[idx];
            if (pj.is_null()) continue;
            PairModel pm;
            pm.same_type = pj.at("same_type").get<bool>();
            pm.mean = vec_from_json(pj.at("mean"));
            pm.stddev = vec_from_json(pj.at("stddev"));
            pm.platt.a = pj.at("platt").at("a").get<double>();
            pm.platt.b = pj.at("platt").at("b").get<double>();
            pm.positives = pj.at("positives").get<int>();
            pm.negatives = pj.at("negatives").get<int>();
            pm.holdout_accuracy = pj.at("holdout_accuracy").get<double>();
            const std::string kind = pj.at("kind").get<std::string>();
            if (kind == "logistic") {
                LogisticModel lm;
                lm.weights = vec_from_json(pj.at("weights"));
                lm.bias = pj.at("bias").get<double>();
                pm.classifier = std::move(lm);
            } else if (kind == "rbf_svm") {
                RbfSvmModel sm;
                sm.gamma = pj.at("gamma").get<double>();
                sm.bias = pj.at("bias").get<double>();
                sm.coeff = vec_from_json(pj.at("coeff"));
                const Json& support = pj.at("support");
                sm.support.resize(Eigen::Index(support.size()), pm.mean.size());
                for (std::size_t r = 0; r < support.size(); ++r) {
                    const Vec row = vec_from_json(support[r]);
                    if (row.size() != sm.support.cols())
                        throw DataError("support vector width mismatch");
                    sm.support.row(Eigen::Index(r)) = row;
                }
                pm.classifier = std::move(sm);
            } else {
                throw DataError("unknown classifier kind \"" + kind + "\"");
            }
            model.models[idx] = std::move(pm);
        }
        return model;
    } catch (const nlohmann::json::exception& e) {
        rethrow_as_data_error(e.what(), "bad model file");
    }
}

void write_model(const PairwiseModel& model, const std::string& path) {
    save_json_file(path, model_to_json(model));
}

PairwiseModel read_model(const std::string& path) {
    return model_from_json(load_json_file(path));
}

Json instance_to_json(const AssociationInstance& inst) {
    Json j;
    j["format"] = "jpa-instance/1";
    Json dets = Json::array();
    for (const Detection& d : inst.detections) {
        dets.push_back(Json{{"id", d.id},
                            {"joint", std::string(joint_name(d.joint))},
                            {"location", point_to_json(d.location)},
                            {"confidence", d.confidence}});
    }
    j["detections"] = std::move(dets);
    j["unary"] = vec_to_json(inst.unary);
    Json pw = Json::array();
    const int n = inst.size();
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) pw.push_back(inst.pairwise(a, b));
    j["pairwise"] = std::move(pw);
    return j;
}

AssociationInstance instance_from_json(const Json& j) {
    check_format(j, "jpa-instance");
    try {
        AssociationInstance inst;
        for (const Json& dj : j.at("detections")) {
            Detection d;
            d.id = dj.at("id").get<int>();
            d.joint = joint_from_name(dj.at("joint").get<std::string>());
            d.location = point_from_json(dj.at("location"));
            d.confidence = dj.at("confidence").get<double>();
            inst.detections.push_back(d);
        }
        const int n = int(inst.detections.size());
        inst.unary = vec_from_json(j.at("unary"));
        const Json& pw = j.at("pairwise");
        if (int(pw.size()) != n * (n - 1) / 2)
            throw DataError("pairwise cost count does not match detection count");
        inst.pairwise = PairTable<double>(n);
        std::size_t k = 0;
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) inst.pairwise(a, b) = pw[k++].get<double>();
        inst.check();
        return inst;
    } catch (const nlohmann::json::exception& e) {
        rethrow_as_data_error(e.what(), "bad instance file");
    }
}

Json global_instance_to_json(const GlobalInstance& inst) {
    Json j;
    j["format"] = "jpa-global-instance/1";
    j["num_proposals"] = inst.num_proposals;
    j["num_classes"] = inst.num_classes;
    Json locs = Json::array();
    for (const Point2& p : inst.locations) locs.push_back(point_to_json(p));
    j["locations"] = std::move(locs);
    Json unary = Json::array();
    for (Eigen::Index r = 0; r < inst.unary.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < inst.unary.cols(); ++c) row.push_back(inst.unary(r, c));
        unary.push_back(std::move(row));
    }
    j["unary"] = std::move(unary);
    Json pw = Json::array();
    for (int a = 0; a < inst.num_proposals; ++a) {
        for (int b = a + 1; b < inst.num_proposals; ++b) {
            const Mat& block = inst.pairwise(a, b);
            Json flat = Json::array();
            for (Eigen::Index r = 0; r < block.rows(); ++r)
                for (Eigen::Index c = 0; c < block.cols(); ++c) flat.push_back(block(r, c));
            pw.push_back(std::move(flat));
        }
    }
    j["pairwise"] = std::move(pw);
    j["single_person"] = inst.single_person;
    return j;
}

GlobalInstance global_instance_from_json(const Json& j) {
    check_format(j, "jpa-global-instance");
    try {
        GlobalInstance inst;
        inst.num_proposals = j.at("num_proposals").get<int>();
        inst.num_classes = j.at("num_classes").get<int>();
        for (const Json& pj : j.at("locations")) inst.locations.push_back(point_from_json(pj));
        const Json& unary = j.at("unary");
        if (int(unary.size()) != inst.num_proposals)
            throw DataError("unary row count does not match proposal count");
        inst.unary.resize(inst.num_proposals, inst.num_classes);
        for (int r = 0; r < inst.num_proposals; ++r) {
            if (int(unary[r].size()) != inst.num_classes)
                throw DataError("unary column count does not match class count");
            for (int c = 0; c < inst.num_classes; ++c)
                inst.unary(r, c) = unary[r][std::size_t(c)].get<double>();
        }
        const Json& pw = j.at("pairwise");
        const int n = inst.num_proposals;
        if (int(pw.size()) != n * (n - 1) / 2)
            throw DataError("pairwise block count does not match proposal count");
        inst.pairwise = PairTable<Mat>(n, Mat());
        std::size_t k = 0;
        for (int a = 0; a < n; ++a) {
            for (int b = a + 1; b < n; ++b) {
                const Json& flat = pw[k++];
                if (int(flat.size()) != inst.num_classes * inst.num_classes)
                    throw DataError("pairwise block size mismatch");
                Mat block(inst.num_classes, inst.num_classes);
                for (int r = 0; r < inst.num_classes; ++r)
                    for (int c = 0; c < inst.num_classes; ++c)
                        block(r, c) = flat[std::size_t(r) * inst.num_classes + c].get<double>();
                inst.pairwise(a, b) = std::move(block);
            }
        }
        inst.single_person = j.at("single_person").get<bool>();
        inst.check();
        return inst;
    } catch (const nlohmann::json::exception& e) {
        rethrow_as_data_error(e.what(), "bad global instance file");
    }
}

Json predictions_to_json(const Predictions& pred) {
    Json j;
    j["format"] = "jpa-pred/1";
    j["mode"] = pred.mode;
    j["tau"] = pred.tau;
    j["n_candidates"] = pred.n_candidates;
    j["nms_radius"] = pred.nms_radius;
    j["seed"] = pred.seed;
    j["skipped_regions"] = pred.skipped_regions;
    Json scenes = Json::array();
    for (const std::vector<PersonPose>& scene_poses : pred.poses) {
        Json poses = Json::array();
        for (const PersonPose& pose : scene_poses) {
            Json joints = Json::array();
            for (int k = 0; k < kJointCount; ++k) {
                if (pose.joints[k]) {
                    const PoseJoint& pj = *pose.joints[k];
                    joints.push_back(
                        Json::array({pj.location.x(), pj.location.y(), pj.confidence}));
                } else {
                    joints.push_back(nullptr);
                }
            }
            poses.push_back(std::move(joints));
        }
        scenes.push_back(Json{{"poses", std::move(poses)}});
    }
    j["scenes"] = std::move(scenes);
    return j;
}

Predictions predictions_from_json(const Json& j) {
    check_format(j, "jpa-pred");
    try {
        Predictions pred;
        pred.mode = j.at("mode").get<std::string>();
        pred.tau = j.at("tau").get<double>();
        pred.n_candidates = j.at("n_candidates").get<int>();
        pred.nms_radius = j.at("nms_radius").get<double>();
        pred.seed = j.at("seed").get<std::uint64_t>();
        pred.skipped_regions = j.at("skipped_regions").get<int>();
        for (const Json& sj : j.at("scenes")) {
            std::vector<PersonPose> scene_poses;
            for (const Json& posej : sj.at("poses")) {
                if (posej.size() != kJointCount)
                    throw DataError("pose must have one entry per joint type");
                PersonPose pose;
                for (int k = 0; k < kJointCount; ++k) {
                    const Json& e = posej[k];
                    if (e.is_null()) continue;
                    if (!e.is_array() || e.size() != 3)
                        throw DataError("pose joint must be [u, v, confidence]");
                    pose.set(JointId(k), Point2(e[0].get<double>(), e[1].get<double>()),
                             e[2].get<double>());
                }
                scene_poses.push_back(pose);
            }
            pred.poses.push_back(std::move(scene_poses));
        }
        return pred;
    } catch (const nlohmann::json::exception& e) {
        rethrow_as_data_error(e.what(), "bad predictions file");
    }
}

void write_predictions(const Predictions& pred, const std::string& path) {
    save_json_file(path, predictions_to_json(pred));
}

Predictions read_predictions(const std::string& path) {
    return predictions_from_json(load_json_file(path));
}

}  // namespace jpa
