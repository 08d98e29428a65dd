// Command-line front end: synth / fit / cluster / eval / bench / render.
//
// Exit codes: 0 success, 2 usage or input error, 3 numeric failure,
// 4 benchmark sanity failure.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "lanemb/cluster.hpp"
#include "lanemb/core.hpp"
#include "lanemb/json_io.hpp"
#include "lanemb/metrics.hpp"
#include "lanemb/optimize.hpp"
#include "lanemb/render.hpp"
#include "lanemb/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lanemb;

namespace {

constexpr const char* kVersion = "lanemb 0.1.0";

json read_json(const fs::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path.string());
    json j;
    is >> j;
    return j;
}

void write_json(const fs::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string());
    os << j.dump(2) << "\n";
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct ManifestWriter {
    std::string command;
    json config = json::object();
    std::vector<std::string> inputs, outputs;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    void write(const fs::path& dir) const {
        double elapsed = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - start)
                             .count();
        write_json(dir / "manifest.json", json{{"command", command},
                                               {"config", config},
                                               {"inputs", inputs},
                                               {"outputs", outputs},
                                               {"elapsed_ms", elapsed},
                                               {"version", kVersion}});
    }
};

int cmd_synth(const std::string& config_path, const std::string& out_dir) {
    ManifestWriter mf{"synth"};
    SynthConfig cfg = read_json(config_path).get<SynthConfig>();
    mf.config = cfg;
    mf.inputs = {config_path};

    LaneScene scene = generate_scene(cfg);
    fs::create_directories(out_dir);
    fs::path lel = fs::path(out_dir) / "scene.lel";
    fs::path sidecar = fs::path(out_dir) / "scene.json";
    save_lel1(lel, scene.labeling);
    write_json(sidecar, scene_sidecar(scene));
    mf.outputs = {lel.string(), sidecar.string()};
    mf.write(out_dir);
    return 0;
}

int cmd_fit(const std::string& scene_dir, const std::string& config_path,
            const std::string& out_dir) {
    ManifestWriter mf{"fit"};
    FitConfig cfg = config_path.empty() ? FitConfig{}
                                        : read_json(config_path).get<FitConfig>();
    mf.config = cfg;
    fs::path lel = fs::path(scene_dir) / "scene.lel";
    mf.inputs = {lel.string()};
    if (!config_path.empty()) mf.inputs.push_back(config_path);

    InstanceLabeling labeling = load_lel1(lel);
    auto [state, trajectory] = fit(labeling, cfg);

    fs::create_directories(out_dir);
    fs::path off = fs::path(out_dir) / "offsets.lef";
    fs::path sig = fs::path(out_dir) / "sigma_logit.lef";
    fs::path sed = fs::path(out_dir) / "seed_logit.lef";
    save_lef1(off, state.offsets_raw);
    save_lef1(sig, state.sigma_logit);
    save_lef1(sed, state.seed_logit);

    json cfg_json = cfg;
    write_json(fs::path(out_dir) / "checkpoint.json",
               json{{"steps", trajectory.size()},
                    {"config_hash", fnv1a(cfg_json.dump())},
                    {"final_total", trajectory.empty() ? 0.0 : trajectory.back().total}});

    std::ofstream traj(fs::path(out_dir) / "trajectory.jsonl");
    for (const auto& rep : trajectory) traj << json(rep).dump() << "\n";

    mf.outputs = {off.string(), sig.string(), sed.string(),
                  (fs::path(out_dir) / "checkpoint.json").string(),
                  (fs::path(out_dir) / "trajectory.jsonl").string()};
    mf.write(out_dir);
    return 0;
}

struct CheckpointFields {
    EmbeddingField embedding;
    FieldF32 sigma;
    FieldF32 seed;
};

CheckpointFields load_checkpoint(const fs::path& dir) {
    FieldState st;
    st.offsets_raw = load_lef1(dir / "offsets.lef");
    st.sigma_logit = load_lef1(dir / "sigma_logit.lef");
    st.seed_logit = load_lef1(dir / "seed_logit.lef");
    auto coords = make_coordinate_maps(st.offsets_raw.height, st.offsets_raw.width);
    return {spatial_embedding(st.offsets_raw, coords), st.sigma(), st.seed()};
}

int cmd_cluster(const std::string& checkpoint_dir, const std::string& scene_dir,
                const std::string& config_path, const std::string& method,
                const std::string& out_dir) {
    ManifestWriter mf{"cluster"};
    if (method != "fast" && method != "dbscan")
        throw CLI::ValidationError("--method must be fast or dbscan");

    json cfg = config_path.empty() ? json::object() : read_json(config_path);
    ClusterParams params = cfg.get<ClusterParams>();
    DbscanParams dbp = cfg.get<DbscanParams>();
    mf.config = json{{"method", method}, {"cluster", params}, {"dbscan", dbp}};

    fs::path lel = fs::path(scene_dir) / "scene.lel";
    InstanceLabeling gt = load_lel1(lel);
    Mask fg = foreground_mask(gt);
    CheckpointFields ck = load_checkpoint(checkpoint_dir);
    mf.inputs = {lel.string(), checkpoint_dir};

    InstanceLabeling pred = method == "fast"
                                ? fast_cluster(ck.embedding, ck.sigma, ck.seed, fg, params)
                                : dbscan(ck.embedding, fg, dbp);

    fs::create_directories(out_dir);
    fs::path out = fs::path(out_dir) / "pred.lel";
    save_lel1(out, pred);
    mf.outputs = {out.string()};
    mf.write(out_dir);
    return 0;
}

int cmd_eval(const std::string& pred_path, const std::string& scene_dir,
             const std::string& config_path) {
    InstanceLabeling pred = load_lel1(pred_path);
    InstanceLabeling gt = load_lel1(fs::path(scene_dir) / "scene.lel");
    json sidecar = read_json(fs::path(scene_dir) / "scene.json");
    SynthConfig scfg = sidecar.at("config").get<SynthConfig>();

    EvalParams params;
    params.point_tolerance = EvalParams::scaled_tolerance(gt.width);
    if (!config_path.empty()) params = read_json(config_path).get<EvalParams>();

    auto pred_lanes = extract_pred_lanes(pred, scfg.row_stride);
    auto gt_lanes = lanes_from_sidecar(sidecar);
    TuSimpleResult ts = tusimple_eval(pred_lanes, gt_lanes, params);
    QualityResult q = clustering_quality(pred, gt, params);

    std::cout << json{{"accuracy", ts.accuracy},
                      {"fp_rate", ts.fp_rate},
                      {"fn_rate", ts.fn_rate},
                      {"mean_instance_iou", q.mean_iou},
                      {"instance_precision", q.precision},
                      {"instance_recall", q.recall},
                      {"params", params}}
                     .dump(2)
              << "\n";
    return 0;
}

int cmd_bench(const std::string& sizes_arg, const std::string& config_path,
              uint64_t seed) {
    json cfg = config_path.empty() ? json::object() : read_json(config_path);
    ClusterParams params = cfg.get<ClusterParams>();
    DbscanParams dbp = cfg.get<DbscanParams>();
    int num_lanes = cfg.value("num_lanes", 5);

    json out = json::array();
    std::stringstream ss(sizes_arg);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto xpos = tok.find('x');
        if (xpos == std::string::npos)
            throw CLI::ValidationError("--sizes entries must look like 256x128");
        SynthConfig scfg;
        scfg.height = std::stoi(tok.substr(0, xpos));
        scfg.width = std::stoi(tok.substr(xpos + 1));
        scfg.num_lanes = num_lanes;
        scfg.rng_seed = seed;
        LaneScene scene = generate_scene(scfg);
        std::vector<BenchInput> batch;
        batch.push_back(ideal_fields(scene));
        TimingReport rep = bench_clustering(batch, params, dbp);
        json r = rep;
        r["size"] = tok;
        out.push_back(r);
    }
    std::cout << out.dump(2) << "\n";
    return 0;
}

int cmd_render(const std::string& scene_dir, const std::string& checkpoint_dir,
               const std::string& labeling_path, const std::string& mode,
               const std::string& out_path) {
    if (mode != "labeling" && mode != "embedding")
        throw CLI::ValidationError("--mode must be labeling or embedding");
    InstanceLabeling lab = labeling_path.empty()
                               ? load_lel1(fs::path(scene_dir) / "scene.lel")
                               : load_lel1(labeling_path);
    if (mode == "labeling") {
        render_labeling(lab, out_path);
    } else {
        if (checkpoint_dir.empty())
            throw CLI::ValidationError("--mode embedding requires --checkpoint");
        CheckpointFields ck = load_checkpoint(checkpoint_dir);
        render_embedding(ck.embedding, lab, out_path);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spatial-embedding lane instance toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir, scene_dir, checkpoint_dir, pred_path;
    std::string labeling_path, method = "fast", mode = "labeling", sizes = "256x128";
    uint64_t seed = 0;

    auto* synth = app.add_subcommand("synth", "Generate a synthetic lane scene");
    synth->add_option("--config", config_path, "SynthConfig JSON")->required();
    synth->add_option("--out", out_dir, "Output directory")->required();

    auto* fitc = app.add_subcommand("fit", "Fit fields to a scene's labeling");
    fitc->add_option("--scene", scene_dir, "Scene directory")->required();
    fitc->add_option("--config", config_path, "FitConfig JSON");
    fitc->add_option("--out", out_dir, "Output directory")->required();

    auto* clus = app.add_subcommand("cluster", "Cluster a fitted checkpoint");
    clus->add_option("--checkpoint", checkpoint_dir, "Checkpoint directory")->required();
    clus->add_option("--scene", scene_dir, "Scene directory")->required();
    clus->add_option("--config", config_path, "Cluster params JSON");
    clus->add_option("--method", method, "fast | dbscan");
    clus->add_option("--out", out_dir, "Output directory")->required();

    auto* eval = app.add_subcommand("eval", "Evaluate a predicted labeling");
    eval->add_option("--pred", pred_path, "Predicted LEL1 file")->required();
    eval->add_option("--scene", scene_dir, "Scene directory")->required();
    eval->add_option("--config", config_path, "EvalParams JSON");

    auto* bench = app.add_subcommand("bench", "Time fast clustering vs DBSCAN");
    bench->add_option("--sizes", sizes, "Comma-separated HxW sizes");
    bench->add_option("--config", config_path, "Cluster/DBSCAN params JSON");
    bench->add_option("--seed", seed, "Scene generator seed");

    auto* rend = app.add_subcommand("render", "Render a labeling or embedding to PPM");
    rend->add_option("--scene", scene_dir, "Scene directory");
    rend->add_option("--checkpoint", checkpoint_dir, "Checkpoint directory");
    rend->add_option("--labeling", labeling_path, "LEL1 file to render");
    rend->add_option("--mode", mode, "labeling | embedding");
    rend->add_option("--out", out_dir, "Output PPM path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(config_path, out_dir);
        if (fitc->parsed()) return cmd_fit(scene_dir, config_path, out_dir);
        if (clus->parsed())
            return cmd_cluster(checkpoint_dir, scene_dir, config_path, method, out_dir);
        if (eval->parsed()) return cmd_eval(pred_path, scene_dir, config_path);
        if (bench->parsed()) return cmd_bench(sizes, config_path, seed);
        if (rend->parsed())
            return cmd_render(scene_dir, checkpoint_dir, labeling_path, mode, out_dir);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::string what = e.what();
        if (what.find("bench_clustering: methods disagree") != std::string::npos) {
            std::cerr << "error: " << what << "\n";
            return 4;
        }
        if (what.find("non-finite") != std::string::npos) {
            std::cerr << "error: " << what << "\n";
            return 3;
        }
        std::cerr << "error: " << what << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
