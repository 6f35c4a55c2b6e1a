#include "jpa/synth.hpp"

#include <algorithm>
#include <cmath>

#include "jpa/rng.hpp"

namespace jpa {

void SynthConfig::check() const {
    if (width <= 0 || height <= 0) throw ConfigError("image size must be positive");
    if (persons_min < 1 || persons_max < persons_min)
        throw ConfigError("person count range is invalid");
    if (sigma <= 0.0) throw ConfigError("sigma must be positive");
    if (overlap < 0.0) throw ConfigError("overlap must be non-negative");
    if (attenuation < 0.0 || attenuation > 1.0)
        throw ConfigError("attenuation must lie in [0,1]");
    if (noise_amplitude < 0.0) throw ConfigError("noise amplitude must be non-negative");
    if (dropout < 0.0 || dropout > 1.0) throw ConfigError("dropout must lie in [0,1]");
    if (region_margin <= 1.0) throw ConfigError("region margin must exceed 1");
    if (region_jitter < 0.0) throw ConfigError("region jitter must be non-negative");
    if (height_min <= 0.0 || height_max < height_min)
        throw ConfigError("person height range is invalid");
}

SynthConfig preset_config(const std::string& name) {
    SynthConfig cfg;
    if (name == "clean") {
        cfg.persons_min = 1;
        cfg.persons_max = 1;
        cfg.overlap = 0.0;
        cfg.attenuation = 0.6;
        cfg.noise_amplitude = 0.02;
        cfg.dropout = 0.0;
    } else if (name == "occluded") {
        // Attenuation + noise exceeds 1 on purpose: distractor peaks can
        // clip to exactly 1.0 and tie with true peaks, the regime where an
        // unconditional argmax pays for answering every joint. The narrow
        // sigma matters too: a peak pixel can sit up to half a pixel off
        // the true joint, so peak values spread down to exp(-0.25/sigma^2)
        // ~ 0.78 and a confidence gate near 1 discards genuine joints.
        cfg.persons_min = 2;
        cfg.persons_max = 3;
        cfg.overlap = 0.55;
        cfg.sigma = 1.0;
        cfg.attenuation = 0.9;
        cfg.noise_amplitude = 0.18;
        cfg.dropout = 0.25;
    } else if (name == "crowded") {
        cfg.width = 384;
        cfg.height = 384;
        cfg.persons_min = 3;
        cfg.persons_max = 4;
        cfg.overlap = 0.62;
        cfg.attenuation = 0.92;
        cfg.noise_amplitude = 0.2;
        cfg.dropout = 0.28;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected clean, occluded, crowded)");
    }
    return cfg;
}

namespace {

/// Joint offsets from the hip center in units of person height; the
/// vertical axis points down, so up is negative.
constexpr std::array<std::array<double, 2>, kJointCount> kSkeleton = {{
    {0.00, -0.50},   // head
    {0.00, -0.38},   // neck
    {-0.12, -0.36},  // r_shoulder
    {0.12, -0.36},   // l_shoulder
    {-0.16, -0.22},  // r_elbow
    {0.16, -0.22},   // l_elbow
    {-0.18, -0.08},  // r_wrist
    {0.18, -0.08},   // l_wrist
    {-0.07, 0.00},   // r_hip
    {0.07, 0.00},    // l_hip
    {-0.08, 0.22},   // r_knee
    {0.08, 0.22},    // l_knee
    {-0.09, 0.45},   // r_ankle
    {0.09, 0.45},    // l_ankle
}};

constexpr double kJointJitter = 0.03;  // of person height, per axis

GroundTruthPerson make_person(const Point2& hip_center, double height, double dropout,
                              std::mt19937_64& rng) {
    GroundTruthPerson person;
    for (int j = 0; j < kJointCount; ++j) {
        const double ju = uniform(rng, -kJointJitter, kJointJitter) * height;
        const double jv = uniform(rng, -kJointJitter, kJointJitter) * height;
        person.joints[j] = hip_center + Point2(kSkeleton[j][0] * height + ju,
                                               kSkeleton[j][1] * height + jv);
    }
    for (int j = 0; j < kJointCount; ++j) person.visible[j] = uniform01(rng) >= dropout;
    return person;
}

Box person_region(const GroundTruthPerson& person, const SynthConfig& cfg,
                  std::mt19937_64& rng) {
    const Box tight = person.bounding_box();
    const double cx = tight.x0 + 0.5 * tight.width + uniform(rng, -cfg.region_jitter, cfg.region_jitter);
    const double cy = tight.y0 + 0.5 * tight.height + uniform(rng, -cfg.region_jitter, cfg.region_jitter);
    const double hw = 0.5 * tight.width * cfg.region_margin;
    const double hh = 0.5 * tight.height * cfg.region_margin;
    int x0 = static_cast<int>(std::floor(cx - hw));
    int y0 = static_cast<int>(std::floor(cy - hh));
    int x1 = static_cast<int>(std::ceil(cx + hw));
    int y1 = static_cast<int>(std::ceil(cy + hh));
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, cfg.width);
    y1 = std::min(y1, cfg.height);
    Box region;
    region.x0 = x0;
    region.y0 = y0;
    region.width = std::max(1, x1 - x0);
    region.height = std::max(1, y1 - y0);
    return region;
}

}  // namespace

void render_scene_maps(Scene& scene) {
    const double sigma = scene.render.sigma;
    const double inv = 1.0 / (2.0 * sigma * sigma);
    const int window = static_cast<int>(std::ceil(5.0 * sigma));
    scene.maps.assign(scene.regions.size(), RegionMaps{});
    for (std::size_t r = 0; r < scene.regions.size(); ++r) {
        const Box& box = scene.regions[r];
        for (int ch = 0; ch < kChannelCount; ++ch) {
            scene.maps[r][ch].channel = ch;
            scene.maps[r][ch].values = Mat::Zero(box.height, box.width);
        }
        for (int j = 0; j < kJointCount; ++j) {
            Mat& map = scene.maps[r][j].values;
            for (std::size_t p = 0; p < scene.persons.size(); ++p) {
                if (!scene.persons[p].visible[j]) continue;
                const double scale = p == r ? 1.0 : scene.render.attenuation;
                const Point2 peak = scene.persons[p].joints[j] -
                                    Point2(static_cast<double>(box.x0), static_cast<double>(box.y0));
                const int u0 = std::max(0, static_cast<int>(std::floor(peak.x())) - window);
                const int u1 = std::min(box.width - 1, static_cast<int>(std::ceil(peak.x())) + window);
                const int v0 = std::max(0, static_cast<int>(std::floor(peak.y())) - window);
                const int v1 = std::min(box.height - 1, static_cast<int>(std::ceil(peak.y())) + window);
                for (int v = v0; v <= v1; ++v) {
                    for (int u = u0; u <= u1; ++u) {
                        const double du = u - peak.x();
                        const double dv = v - peak.y();
                        const double val = scale * std::exp(-(du * du + dv * dv) * inv);
                        map(v, u) = std::max(map(v, u), val);
                    }
                }
            }
            if (scene.render.noise_amplitude > 0.0) {
                std::mt19937_64 noise(mix_seed(scene.seed, 0x100 + r * kChannelCount + j));
                for (int v = 0; v < box.height; ++v)
                    for (int u = 0; u < box.width; ++u)
                        map(v, u) = std::min(
                            1.0, map(v, u) + scene.render.noise_amplitude * uniform01(noise));
            } else {
                map = map.cwiseMin(1.0);
            }
        }
        // Background: confidence that no joint is present.
        Mat& bg = scene.maps[r][kBackgroundChannel].values;
        bg = Mat::Constant(box.height, box.width, 1.0);
        for (int j = 0; j < kJointCount; ++j)
            bg = bg.cwiseMin((1.0 - scene.maps[r][j].values.array()).matrix());
    }
}

Scene generate_scene(const SynthConfig& cfg, int index) {
    cfg.check();
    Scene scene;
    scene.width = cfg.width;
    scene.height = cfg.height;
    scene.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(index));
    scene.render.sigma = cfg.sigma;
    scene.render.attenuation = cfg.attenuation;
    scene.render.noise_amplitude = cfg.noise_amplitude;

    std::mt19937_64 rng(mix_seed(scene.seed, 1));
    const int n_persons = uniform_int(rng, cfg.persons_min, cfg.persons_max);

    // The first person anchors a cluster near the image center; the others
    // land at a distance shrunk by the overlap factor.
    const double h0 = uniform(rng, cfg.height_min, cfg.height_max);
    const Point2 center(cfg.width * uniform(rng, 0.45, 0.55),
                        cfg.height * uniform(rng, 0.48, 0.56));
    auto clamp_center = [&](Point2 c, double height) {
        const double side = 0.25 * height;
        const double top = 0.56 * height;
        const double bottom = 0.50 * height;
        c.x() = std::clamp(c.x(), side + 4.0, cfg.width - side - 4.0);
        c.y() = std::clamp(c.y(), top + 4.0, cfg.height - bottom - 4.0);
        return c;
    };
    scene.persons.push_back(make_person(clamp_center(center, h0), h0, cfg.dropout, rng));
    for (int p = 1; p < n_persons; ++p) {
        const double height = uniform(rng, cfg.height_min, cfg.height_max);
        const double spread = std::max(0.10, 1.0 - cfg.overlap);
        const double radius = h0 * spread * uniform(rng, 0.8, 1.2);
        const double angle = uniform(rng, 0.0, 2.0 * M_PI);
        const Point2 c = center + radius * Point2(std::cos(angle), std::sin(angle));
        scene.persons.push_back(make_person(clamp_center(c, height), height, cfg.dropout, rng));
    }
    for (const GroundTruthPerson& person : scene.persons)
        scene.regions.push_back(person_region(person, cfg, rng));

    render_scene_maps(scene);
    return scene;
}

std::vector<Detection> sample_candidates(const ScoreMap& map, int n, double nms_radius) {
    if (n < 1) throw ConfigError("candidate count must be at least 1");
    const Mat& m = map.values;
    const int h = static_cast<int>(m.rows());
    const int w = static_cast<int>(m.cols());

    struct Peak {
        double value;
        int v, u;
    };
    std::vector<Peak> peaks;
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const double val = m(v, u);
            if (val <= 0.0) continue;
            bool ge_all = true, gt_any = false;
            for (int dv = -1; dv <= 1 && ge_all; ++dv) {
                for (int du = -1; du <= 1; ++du) {
                    if (dv == 0 && du == 0) continue;
                    const int nv = v + dv, nu = u + du;
                    if (nv < 0 || nu < 0 || nv >= h || nu >= w) continue;
                    if (m(nv, nu) > val) {
                        ge_all = false;
                        break;
                    }
                    if (m(nv, nu) < val) gt_any = true;
                }
            }
            if (ge_all && gt_any) peaks.push_back({val, v, u});
        }
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) {
        if (a.value != b.value) return a.value > b.value;
        if (a.v != b.v) return a.v < b.v;
        return a.u < b.u;
    });

    std::vector<Detection> out;
    for (const Peak& peak : peaks) {
        if (static_cast<int>(out.size()) >= n) break;
        bool clear = true;
        for (const Detection& taken : out) {
            const double du = taken.location.x() - peak.u;
            const double dv = taken.location.y() - peak.v;
            if (std::sqrt(du * du + dv * dv) < nms_radius) {
                clear = false;
                break;
            }
        }
        if (!clear) continue;
        Detection det;
        det.id = static_cast<int>(out.size());
        det.joint = map.channel < kJointCount ? joint_from_index(map.channel) : JointId::head;
        det.location = Point2(peak.u, peak.v);
        det.confidence = peak.value;
        out.push_back(det);
    }
    return out;
}

PersonPose argmax_baseline(const RegionMaps& maps, const Box& region) {
    PersonPose pose;
    for (int j = 0; j < kJointCount; ++j) {
        const Mat& m = maps[j].values;
        int best_v = 0, best_u = 0;
        double best = -1.0;
        for (int v = 0; v < m.rows(); ++v)
            for (int u = 0; u < m.cols(); ++u)
                if (m(v, u) > best) {
                    best = m(v, u);
                    best_v = v;
                    best_u = u;
                }
        // The pose invariant wants positive confidence even on a silent map.
        pose.set(joint_from_index(j),
                 Point2(best_u + region.x0, best_v + region.y0),
                 std::max(best, 1e-12));
    }
    return pose;
}

}  // namespace jpa
