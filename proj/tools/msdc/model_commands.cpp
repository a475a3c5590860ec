#include <cstdio>
#include <regex>

#include "commands.hpp"
#include "files.hpp"
#include "msdc/color.hpp"
#include "msdc/error.hpp"
#include "msdc/flow.hpp"
#include "msdc/msi_io.hpp"
#include "msdc/pipeline/evaluate.hpp"
#include "msdc/pipeline/model.hpp"
#include "msdc/pipeline/trainer.hpp"
#include "msdc/png_io.hpp"

namespace msdc::cli {

using namespace msdc::pipeline;

namespace {

struct RunConfig {
    std::vector<fs::path> train_data;
    fs::path color_matrix;
    ModelConfig model;
    TrainConfig stage1, stage2;
    int checkpoint_every = 0;

    json to_json() const
    {
        auto stage = [](const TrainConfig& t) {
            return json{{"iterations", t.iterations},
                        {"batch_size", t.batch_size},
                        {"patch_size", t.patch_size},
                        {"lr", t.lr}};
        };
        json data = json::array();
        for (const auto& p : train_data)
            data.push_back(p.string());
        return {{"train_data", data},
                {"color_matrix", color_matrix.string()},
                {"model", json::parse(model.to_json())},
                {"stage1", stage(stage1)},
                {"stage2", stage(stage2)},
                {"seed", stage1.seed},
                {"checkpoint_every", checkpoint_every}};
    }
};

TrainConfig parse_stage(const json& j, int stage, const std::string& where)
{
    check_keys(j, {"iterations", "batch_size", "patch_size", "lr"}, where);
    TrainConfig t;
    t.stage = stage;
    t.iterations = j.value("iterations", t.iterations);
    t.batch_size = j.value("batch_size", t.batch_size);
    t.patch_size = j.value("patch_size", t.patch_size);
    t.lr = j.value("lr", t.lr);
    return t;
}

RunConfig parse_run_config(const fs::path& path)
{
    const json j = read_json(path);
    const std::string where = path.string();
    check_keys(j,
               {"train_data", "color_matrix", "model", "stage1", "stage2", "seed",
                "checkpoint_every"},
               where);
    const fs::path base = fs::absolute(path).parent_path();
    RunConfig c;
    try {
        for (const auto& d : j.at("train_data"))
            c.train_data.push_back(resolve(base, d.get<std::string>()).lexically_normal());
        c.color_matrix = resolve(base, j.at("color_matrix").get<std::string>()).lexically_normal();
        // Unspecified model keys keep their defaults; unknown ones are rejected
        // by ModelConfig::from_json.
        json model = json::parse(ModelConfig{}.to_json());
        if (j.contains("model")) {
            if (!j.at("model").is_object())
                throw ConfigError(where + ": model must be an object");
            for (const auto& [k, v] : j.at("model").items())
                model[k] = v;
        }
        c.model = ModelConfig::from_json(model.dump());
        c.stage1 = parse_stage(j.value("stage1", json::object()), 1, where + " stage1");
        c.stage2 = parse_stage(j.value("stage2", json::object()), 2, where + " stage2");
        const std::uint64_t seed = j.value("seed", std::uint64_t{1});
        c.stage1.seed = c.stage2.seed = seed;
        c.stage1.scenario = c.stage2.scenario = c.model.scenario;
        c.checkpoint_every = j.value("checkpoint_every", 0);
    } catch (const json::exception& e) {
        throw ConfigError(where + ": " + e.what());
    }
    if (c.train_data.empty())
        throw ConfigError(where + ": train_data must list at least one quadruplet directory");
    if (c.checkpoint_every < 0)
        throw ConfigError(where + ": checkpoint_every must be >= 0");
    c.stage1.validate(c.model.net.levels);
    c.stage2.validate(c.model.net.levels);
    return c;
}

fs::path checkpoint_name(const fs::path& run, int stage, int iter)
{
    return run / "checkpoints" /
           ("stage" + std::to_string(stage) + "_iter" + std::to_string(iter) + ".ckpt");
}

fs::path latest_checkpoint(const fs::path& run)
{
    const fs::path dir = run / "checkpoints";
    if (!fs::is_directory(dir))
        throw IoError("no checkpoints directory in " + run.string());
    static const std::regex name(R"(stage([12])_iter(\d+)\.ckpt)");
    std::pair<int, long long> best{0, -1};
    fs::path found;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::smatch m;
        const std::string file = e.path().filename().string();
        if (!std::regex_match(file, m, name))
            continue;
        const std::pair<int, long long> key{std::stoi(m[1]), std::stoll(m[2])};
        if (key > best) {
            best = key;
            found = e.path();
        }
    }
    if (found.empty())
        throw IoError("no checkpoints in " + dir.string());
    return found;
}

}  // namespace

int run_train(const TrainArgs& a)
{
    const RunConfig cfg = parse_run_config(a.config);
    std::vector<DatasetQuadruplet> data;
    for (const auto& d : cfg.train_data)
        data.push_back(load_quadruplet(d));
    const ColorMatrix cm = load_color_matrix(cfg.color_matrix);

    const fs::path run = a.out;
    fs::create_directories(run / "checkpoints");
    fs::create_directories(run / "logs");
    write_json(run / "config.json", cfg.to_json());
    save_color_matrix(run / "color_matrix.json", cm);

    ModelBundle<float> m(cfg.model);
    m.color_matrix = cm;
    std::string log;
    for (const TrainConfig* t : {&cfg.stage1, &cfg.stage2}) {
        const int stage = t->stage;
        auto on_iter = [&](const IterationLog& l) {
            json line{{"stage", stage}, {"iter", l.iter}, {"loss", l.loss}};
            if (stage == 1) {
                line["ms_loss"] = l.ms_loss;
                line["rgb_loss"] = l.rgb_loss;
            }
            log += line.dump() + "\n";
            if (cfg.checkpoint_every > 0 && l.iter % cfg.checkpoint_every == 0 &&
                l.iter != t->iterations)
                save_model(checkpoint_name(run, stage, l.iter), m, stage, l.iter);
        };
        if (stage == 1)
            train_stage1(m, data, *t, on_iter);
        else
            train_stage2(m, data, *t, on_iter);
        save_model(checkpoint_name(run, stage, t->iterations), m, stage, t->iterations);
        write_file_atomic(run / "logs" / "metrics.jsonl", log);
        std::printf("stage %d: %d iterations\n", stage, t->iterations);
    }
    std::printf("run written to %s\n", run.string().c_str());
    return 0;
}

int run_infer(const InferArgs& a)
{
    fs::path ckpt = a.checkpoint;
    fs::path cm_path = a.color_matrix;
    if (!a.run.empty()) {
        if (ckpt.empty())
            ckpt = latest_checkpoint(a.run);
        if (cm_path.empty())
            cm_path = fs::path(a.run) / "color_matrix.json";
    }
    if (ckpt.empty() || cm_path.empty())
        throw ConfigError("infer: pass --run, or both --checkpoint and --color-matrix");
    if (!fs::exists(ckpt))
        throw IoError("infer: checkpoint " + ckpt.string() + " does not exist");

    ModelBundle<float> m = load_model(ckpt);
    m.color_matrix = load_color_matrix(cm_path);
    const DatasetQuadruplet q = load_quadruplet(a.data);
    const SpectralImage pred = reconstruct(q, m);
    write_msi(a.out, pred);
    fs::path preview = a.preview.empty() ? fs::path(a.out).replace_extension(".png")
                                         : fs::path(a.preview);
    write_png(preview, to_srgb_preview(ms_to_proxy_rgb(pred, *m.color_matrix), std::nullopt));
    std::printf("wrote %s and %s\n", a.out.c_str(), preview.string().c_str());
    return 0;
}

int run_eval(const EvalArgs& a)
{
    if (a.gt.empty() == a.data.empty())
        throw ConfigError("eval: pass exactly one of --gt and --data");
    const SpectralImage pred = read_msi(a.pred);
    const SpectralImage gt = a.gt.empty() ? load_quadruplet(a.data).ms_target : read_msi(a.gt);
    const MetricsReport r = evaluate(pred, gt);
    const std::string text = r.to_json();
    if (!a.out.empty())
        write_file_atomic(a.out, text + "\n");
    std::printf("%s\n", text.c_str());
    return 0;
}

int run_flow(const FlowArgs& a)
{
    const SpectralImage src = read_msi(a.src);
    const SpectralImage dst = read_msi(a.dst);
    if (dst.channels() != 3)
        throw DimensionError("flow: --dst must be a 3-channel RGB image");
    FlowField flow;
    if (src.channels() == 16) {
        if (a.color_matrix.empty())
            throw ConfigError("flow: a 16-channel --src needs --color-matrix");
        flow = cross_spectral_flow(src, dst, load_color_matrix(a.color_matrix));
    } else if (src.channels() == 3) {
        flow = estimate_flow(to_srgb_preview(src, std::nullopt), to_srgb_preview(dst, std::nullopt));
    } else {
        throw DimensionError("flow: --src must have 3 or 16 channels");
    }
    write_msi(a.out, flow.to_image());
    const fs::path png = a.png.empty() ? fs::path(a.out).replace_extension(".png") : fs::path(a.png);
    write_png(png, flow_to_color(flow));
    double mean_u = 0.0, mean_v = 0.0;
    for (std::size_t i = 0; i < flow.u.size(); ++i) {
        mean_u += flow.u[i];
        mean_v += flow.v[i];
    }
    const double n = double(flow.u.size());
    std::printf("mean u %.4f v %.4f; wrote %s and %s\n", mean_u / n, mean_v / n, a.out.c_str(),
                png.string().c_str());
    return 0;
}

}  // namespace msdc::cli
