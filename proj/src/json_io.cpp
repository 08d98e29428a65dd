#include "lanemb/json_io.hpp"

namespace lanemb {

using nlohmann::json;

void to_json(json& j, const LossConfig& c) {
    j = json{{"prob_threshold", c.prob_threshold},
             {"delta_margin", c.delta_margin},
             {"delta_push", c.delta_push},
             {"w_e", c.w_e},
             {"w_b", c.w_b},
             {"w_d", c.w_d},
             {"w_s", c.w_s}};
}

void from_json(const json& j, LossConfig& c) {
    c = LossConfig{};
    if (j.contains("prob_threshold")) j.at("prob_threshold").get_to(c.prob_threshold);
    if (j.contains("delta_margin")) j.at("delta_margin").get_to(c.delta_margin);
    if (j.contains("delta_push")) j.at("delta_push").get_to(c.delta_push);
    if (j.contains("w_e")) j.at("w_e").get_to(c.w_e);
    if (j.contains("w_b")) j.at("w_b").get_to(c.w_b);
    if (j.contains("w_d")) j.at("w_d").get_to(c.w_d);
    if (j.contains("w_s")) j.at("w_s").get_to(c.w_s);
    c.validate();
}

void to_json(json& j, const LossReport& r) {
    j = json{{"total", r.total},
             {"L_e", r.loss_embedding},
             {"L_b", r.loss_bandwidth},
             {"L_d", r.loss_push},
             {"L_s", r.loss_seed},
             {"grad_inf_offsets", r.grad_inf_offsets},
             {"grad_inf_sigma", r.grad_inf_sigma},
             {"grad_inf_seed", r.grad_inf_seed}};
}

void to_json(json& j, const FitConfig& c) {
    j = json{{"step_size", c.step_size},
             {"momentum", c.momentum},
             {"max_steps", c.max_steps},
             {"stop_tolerance", c.stop_tolerance},
             {"rng_seed", c.rng_seed},
             {"loss", c.loss}};
}

void from_json(const json& j, FitConfig& c) {
    c = FitConfig{};
    if (j.contains("step_size")) j.at("step_size").get_to(c.step_size);
    if (j.contains("momentum")) j.at("momentum").get_to(c.momentum);
    if (j.contains("max_steps")) j.at("max_steps").get_to(c.max_steps);
    if (j.contains("stop_tolerance")) j.at("stop_tolerance").get_to(c.stop_tolerance);
    if (j.contains("rng_seed")) j.at("rng_seed").get_to(c.rng_seed);
    if (j.contains("loss")) j.at("loss").get_to(c.loss);
    c.validate();
}

void to_json(json& j, const SynthConfig& c) {
    j = json{{"height", c.height},
             {"width", c.width},
             {"num_lanes", c.num_lanes},
             {"thickness", c.thickness},
             {"curvature_range", {c.curv_min, c.curv_max}},
             {"rng_seed", c.rng_seed},
             {"row_stride", c.row_stride}};
}

void from_json(const json& j, SynthConfig& c) {
    c = SynthConfig{};
    if (j.contains("height")) j.at("height").get_to(c.height);
    if (j.contains("width")) j.at("width").get_to(c.width);
    if (j.contains("num_lanes")) j.at("num_lanes").get_to(c.num_lanes);
    if (j.contains("thickness")) j.at("thickness").get_to(c.thickness);
    if (j.contains("curvature_range")) {
        auto r = j.at("curvature_range");
        c.curv_min = r.at(0).get<double>();
        c.curv_max = r.at(1).get<double>();
    }
    if (j.contains("rng_seed")) j.at("rng_seed").get_to(c.rng_seed);
    if (j.contains("row_stride")) j.at("row_stride").get_to(c.row_stride);
    c.validate();
}

void to_json(json& j, const ClusterParams& p) {
    j = json{{"seed_threshold", p.seed_threshold},
             {"prob_threshold", p.prob_threshold},
             {"max_instances", p.max_instances},
             {"min_pixels", p.min_pixels}};
}

void from_json(const json& j, ClusterParams& p) {
    p = ClusterParams{};
    if (j.contains("seed_threshold")) j.at("seed_threshold").get_to(p.seed_threshold);
    if (j.contains("prob_threshold")) j.at("prob_threshold").get_to(p.prob_threshold);
    if (j.contains("max_instances")) j.at("max_instances").get_to(p.max_instances);
    if (j.contains("min_pixels")) j.at("min_pixels").get_to(p.min_pixels);
    p.validate();
}

void to_json(json& j, const DbscanParams& p) {
    j = json{{"eps", p.eps}, {"min_pts", p.min_pts}};
}

void from_json(const json& j, DbscanParams& p) {
    p = DbscanParams{};
    if (j.contains("eps")) j.at("eps").get_to(p.eps);
    if (j.contains("min_pts")) j.at("min_pts").get_to(p.min_pts);
    p.validate();
}

void to_json(json& j, const EvalParams& p) {
    j = json{{"point_tolerance", p.point_tolerance},
             {"lane_accept_threshold", p.lane_accept_threshold},
             {"iou_threshold", p.iou_threshold}};
}

void from_json(const json& j, EvalParams& p) {
    p = EvalParams{};
    if (j.contains("point_tolerance")) j.at("point_tolerance").get_to(p.point_tolerance);
    if (j.contains("lane_accept_threshold"))
        j.at("lane_accept_threshold").get_to(p.lane_accept_threshold);
    if (j.contains("iou_threshold")) j.at("iou_threshold").get_to(p.iou_threshold);
}

void to_json(json& j, const TuSimpleResult& r) {
    j = json{{"accuracy", r.accuracy}, {"fp_rate", r.fp_rate}, {"fn_rate", r.fn_rate}};
}

void to_json(json& j, const QualityResult& r) {
    j = json{{"mean_instance_iou", r.mean_iou},
             {"precision", r.precision},
             {"recall", r.recall}};
}

void to_json(json& j, const TimingReport& r) {
    j = json{{"fast_ms", r.fast_ms},
             {"dbscan_ms", r.dbscan_ms},
             {"speedup_ratio", r.speedup_ratio},
             {"runs", r.runs},
             {"warmups", r.warmups}};
}

json scene_sidecar(const LaneScene& scene) {
    json lanes = json::array();
    for (size_t k = 0; k < scene.lanes.size(); ++k) {
        json pts = json::array();
        for (const auto& [row, x] : scene.lanes[k]) pts.push_back({{"row", row}, {"x", x}});
        lanes.push_back({{"id", k + 1},
                         {"coefficients", {scene.curves[k].a, scene.curves[k].b, scene.curves[k].c}},
                         {"centerline", pts}});
    }
    return json{{"config", scene.cfg}, {"lanes", lanes}};
}

std::vector<LanePoints> lanes_from_sidecar(const json& j) {
    std::vector<LanePoints> out;
    for (const auto& lane : j.at("lanes")) {
        LanePoints pts;
        for (const auto& p : lane.at("centerline"))
            pts[p.at("row").get<int>()] = p.at("x").get<double>();
        out.push_back(std::move(pts));
    }
    return out;
}

}  // namespace lanemb
