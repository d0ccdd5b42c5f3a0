#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>
#include <vector>

#include "boundarykit/augment.hpp"
#include "boundarykit/edges.hpp"
#include "boundarykit/errors.hpp"
#include "boundarykit/metrics.hpp"
#include "boundarykit/png_io.hpp"
#include "boundarykit/selfcheck.hpp"
#include "boundarykit/tensor_io.hpp"
#include "boundarykit/viz.hpp"
#include "boundarykit/warp.hpp"
#include "run_config.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bk;
using cli::RunConfig;

namespace {

struct Logger {
    int level = 2; // 0 error, 1 warn, 2 info, 3 debug

    static int parse_level(const std::string& name) {
        if (name == "error") return 0;
        if (name == "warn") return 1;
        if (name == "info") return 2;
        return 3;
    }
    void info(const std::string& msg) const {
        if (level >= 2) std::cerr << "[info] " << msg << "\n";
    }
    void debug(const std::string& msg) const {
        if (level >= 3) std::cerr << "[debug] " << msg << "\n";
    }
};

Logger logger;

std::string resolve_out(const RunConfig& cfg, const std::string& path) {
    fs::path p(path);
    if (!p.is_absolute() && cfg.output_dir != ".") p = fs::path(cfg.output_dir) / p;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    return p.string();
}

void write_json_atomic(const std::string& path, const json& doc) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc);
        if (!out) throw DataError("report: cannot open '" + path + "' for writing");
        out << doc.dump(2) << "\n";
        if (!out) {
            std::remove(tmp.c_str());
            throw DataError("report: write failed for '" + path + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw DataError("report: rename failed for '" + path + "': " + ec.message());
    }
}

int effective_threads(const RunConfig& cfg) {
    if (const char* env = std::getenv("BOUNDARYKIT_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    if (cfg.threads > 0) return cfg.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? int(hw) : 1;
}

EdgeExtractionConfig edge_config(const RunConfig& cfg) {
    EdgeExtractionConfig e;
    e.method = cfg.edges_method == "canny" ? EdgeMethod::Canny
                                           : EdgeMethod::NeighborDifference;
    e.canny_sigma = cfg.edges_sigma;
    e.canny_low = cfg.edges_low;
    e.canny_high = cfg.edges_high;
    e.validate();
    return e;
}

WarpConfig warp_config(const RunConfig& cfg) {
    return {cfg.warp_border == "zeros" ? BorderMode::Zeros : BorderMode::Clamp};
}

AugmentConfig augment_config(const RunConfig& cfg) {
    AugmentConfig a;
    a.pasteable_classes = cfg.augment_classes;
    a.erode_side = cfg.erode_side;
    a.min_surviving_pixels = cfg.min_surviving_pixels;
    a.subset_size = cfg.subset_size;
    a.seed = cfg.seed;
    a.validate();
    return a;
}

TrimapSpec trimap_spec(const RunConfig& cfg) {
    TrimapSpec s;
    s.bandwidths = cfg.eval_bands;
    s.metric = cfg.eval_metric == "chebyshev" ? DistanceMetric::Chebyshev
                                              : DistanceMetric::Euclidean;
    s.convention = cfg.eval_convention == "total-width" ? BandConvention::TotalWidth
                                                        : BandConvention::PerSide;
    s.validate();
    return s;
}

// Pairs files of identical names across the two directories.
std::vector<std::pair<std::string, std::string>> pair_directories(const std::string& pred_dir,
                                                                  const std::string& gt_dir) {
    auto list_pngs = [](const std::string& dir) {
        if (!fs::is_directory(dir))
            throw DataError("eval: '" + dir + "' is not a directory");
        std::set<std::string> names;
        for (const auto& entry : fs::directory_iterator(dir))
            if (entry.is_regular_file() && entry.path().extension() == ".png")
                names.insert(entry.path().filename().string());
        return names;
    };
    const std::set<std::string> preds = list_pngs(pred_dir);
    const std::set<std::string> gts = list_pngs(gt_dir);
    if (preds.empty()) throw DataError("eval: no .png files in '" + pred_dir + "'");
    for (const std::string& n : preds)
        if (!gts.count(n))
            throw DataError("eval: '" + gt_dir + "' lacks ground truth for '" + n + "'");
    for (const std::string& n : gts)
        if (!preds.count(n))
            throw DataError("eval: '" + pred_dir + "' lacks a prediction for '" + n + "'");

    std::vector<std::pair<std::string, std::string>> pairs;
    for (const std::string& n : preds)
        pairs.emplace_back((fs::path(pred_dir) / n).string(), (fs::path(gt_dir) / n).string());
    return pairs;
}

json miou_to_json(const MiouResult& r) {
    json per_class = json::array();
    for (std::size_t c = 0; c < r.per_class.size(); ++c) {
        json entry{{"class", c}, {"present", bool(r.present[c])}};
        if (r.present[c])
            entry["iou"] = r.per_class[c];
        else
            entry["iou"] = nullptr;
        per_class.push_back(std::move(entry));
    }
    return json{{"mean_iou", r.mean}, {"per_class", std::move(per_class)}};
}

// ---- subcommand runners ----------------------------------------------------

void run_edges_extract(const RunConfig& cfg, const std::string& labels_path,
                       const std::string& out_path) {
    const LabelMap labels = read_label_png(labels_path, cfg.num_classes);
    const BinaryMask edges = extract_semantic_edges(labels, edge_config(cfg));
    write_mask_png(edges, resolve_out(cfg, out_path));
    logger.info("edges: " + std::to_string(edges.count_true()) + " edge pixels -> " +
                out_path);
}

void run_warp_apply(const RunConfig& cfg, const std::string& features_path,
                    const std::string& disp_path, const std::string& out_path) {
    const FeatureMap features = read_feature_map(features_path);
    const DisplacementField disp = read_displacement_field(disp_path);
    const FeatureMap out = warp(features, disp, warp_config(cfg));
    write_tensor(out, resolve_out(cfg, out_path));
    logger.info("warp: wrote " + out_path);
}

int run_warp_gradcheck(const RunConfig& cfg, double eps, double tol) {
    const GradcheckSummary s = bk::run_warp_gradcheck(cfg.seed ? cfg.seed : 2024, eps, tol);
    std::printf("gradcheck: %d instances, worst rel err d_features %.3e, d_disp %.3e, "
                "adjoint gap %.3e (tol %.1e)\n",
                s.instances, s.worst_rel_features, s.worst_rel_disp, s.worst_adjoint, tol);
    return s.passed ? 0 : 1;
}

json synthesize_record(const RunConfig& cfg, std::uint64_t seed,
                       const cli::ManifestRecord& rec, const std::string& out_img,
                       const std::string& out_labels) {
    const RgbImage timg = read_rgb_png(rec.target_image);
    const LabelMap tpseudo = read_label_png(rec.target_pseudo, cfg.num_classes);
    const RgbImage dimg = read_rgb_png(rec.dest_image);
    const LabelMap dlabels = read_label_png(rec.dest_labels, cfg.num_classes);

    AugmentConfig acfg = augment_config(cfg);
    acfg.seed = seed;
    auto [img, labels, report] = synthesize_pair(timg, tpseudo, dimg, dlabels, acfg);
    try {
        write_rgb_png(img, out_img);
        write_label_png(labels, out_labels);
    } catch (...) {
        // no partial record outputs
        std::remove(out_img.c_str());
        std::remove(out_labels.c_str());
        throw;
    }

    json chosen = json::array();
    for (const auto& [cls, pixels] : report.chosen)
        chosen.push_back(json{{"class", cls}, {"pixels", pixels}});
    return json{{"seed", seed},
                {"erode_side", acfg.erode_side},
                {"chosen", std::move(chosen)},
                {"pasted_pixels", report.pasted_pixels},
                {"out_image", out_img},
                {"out_labels", out_labels}};
}

void run_augment_paste(const RunConfig& cfg, const cli::ManifestRecord& rec,
                       const std::string& out_img, const std::string& out_labels,
                       const std::string& report_path) {
    const json record = synthesize_record(cfg, cfg.seed, rec, resolve_out(cfg, out_img),
                                          resolve_out(cfg, out_labels));
    if (!report_path.empty()) write_json_atomic(resolve_out(cfg, report_path), record);
    logger.info("augment: pasted " + record.at("pasted_pixels").dump() + " pixels");
}

void run_augment_batch(const RunConfig& cfg, const std::string& manifest_path,
                       const std::string& out_dir_arg, const std::string& report_path) {
    const std::vector<cli::ManifestRecord> records = cli::load_manifest(manifest_path);
    const std::string out_dir = resolve_out(cfg, out_dir_arg);
    fs::create_directories(out_dir);

    const int threads = std::max(1, std::min<int>(effective_threads(cfg),
                                                  int(records.size())));
    logger.info("augment batch: " + std::to_string(records.size()) + " records on " +
                std::to_string(threads) + " threads");

    std::vector<json> outputs(records.size());
    std::atomic<std::size_t> next{0};
    std::mutex failure_mutex;
    std::exception_ptr failure;

    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= records.size()) break;
            try {
                const cli::ManifestRecord& rec = records[i];
                const std::string img_path =
                    (fs::path(out_dir) / (rec.stem + ".png")).string();
                const std::string lab_path =
                    (fs::path(out_dir) / (rec.stem + "_labels.png")).string();
                // per-record seed keeps batches deterministic under any schedule
                json entry = synthesize_record(cfg, cfg.seed ^ std::uint64_t(i), rec,
                                               img_path, lab_path);
                entry["stem"] = rec.stem;
                outputs[i] = std::move(entry);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    json report{{"seed", cfg.seed}, {"records", json::array()}};
    for (json& entry : outputs) report["records"].push_back(std::move(entry));
    if (report_path.empty())
        write_json_atomic((fs::path(out_dir) / "report.json").string(), report);
    else
        write_json_atomic(resolve_out(cfg, report_path), report);
}

void run_eval_miou(const RunConfig& cfg, const std::string& pred_dir,
                   const std::string& gt_dir, const std::string& report_path) {
    const auto pairs = pair_directories(pred_dir, gt_dir);
    ConfusionMatrix cm(cfg.eval_classes);
    for (const auto& [pred_path, gt_path] : pairs) {
        const LabelMap pred = read_label_png(pred_path, cfg.eval_classes);
        const LabelMap gt = read_label_png(gt_path, cfg.eval_classes);
        accumulate(cm, pred, gt, nullptr);
    }

    std::optional<std::set<int>> subset;
    if (cfg.eval_subset) subset.emplace(cfg.eval_subset->begin(), cfg.eval_subset->end());
    const MiouResult r = miou(cm, subset);

    json doc = miou_to_json(r);
    doc["images"] = pairs.size();
    doc["num_classes"] = cfg.eval_classes;
    doc["pixels"] = cm.total();
    if (cfg.eval_subset) doc["subset"] = *cfg.eval_subset;
    if (!report_path.empty()) write_json_atomic(resolve_out(cfg, report_path), doc);
    std::printf("mIoU over %zu images: %.4f\n", pairs.size(), r.mean);
}

void run_eval_trimap(const RunConfig& cfg, const std::string& pred_dir,
                     const std::string& gt_dir, const std::string& report_path) {
    const auto pairs = pair_directories(pred_dir, gt_dir);
    std::vector<LabelMap> preds, gts;
    for (const auto& [pred_path, gt_path] : pairs) {
        preds.push_back(read_label_png(pred_path, cfg.eval_classes));
        gts.push_back(read_label_png(gt_path, cfg.eval_classes));
    }
    const TrimapTable table = trimap_miou(preds, gts, trimap_spec(cfg));

    json bands = json::array();
    for (const TrimapBandResult& band : table.bands) {
        json entry = miou_to_json(band.result);
        entry["bandwidth"] = band.bandwidth;
        entry["pixels"] = band.evaluated_pixels;
        bands.push_back(std::move(entry));
        std::printf("band %2d: mIoU %.4f\n", band.bandwidth, band.result.mean);
    }
    json global = miou_to_json(table.global);
    global["pixels"] = table.global_pixels;
    std::printf("global : mIoU %.4f\n", table.global.mean);

    json doc{{"images", pairs.size()},
             {"num_classes", cfg.eval_classes},
             {"metric", cfg.eval_metric},
             {"convention", cfg.eval_convention},
             {"global", std::move(global)},
             {"bands", std::move(bands)}};
    if (!report_path.empty()) write_json_atomic(resolve_out(cfg, report_path), doc);
}

void run_viz_flow(const RunConfig& cfg, const std::string& disp_path,
                  const std::string& out_path, double max_mag) {
    const DisplacementField disp = read_displacement_field(disp_path);
    FlowColorSpec spec;
    spec.max_magnitude = max_mag;
    write_rgb_png(flow_to_rgb(disp, spec), resolve_out(cfg, out_path));
}

Palette load_palette(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("palette: cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("palette '" + path + "': " + e.what());
    }
    if (!doc.is_object()) throw ValidationError("palette: expected an object");
    Palette pal;
    for (const auto& [key, value] : doc.items()) {
        int cls = 0;
        try {
            cls = std::stoi(key);
        } catch (...) {
            throw ValidationError("palette: non-integer class key '" + key + "'");
        }
        if (!value.is_array() || value.size() != 3)
            throw ValidationError("palette: class " + key + " needs [r,g,b]");
        pal[cls] = {std::uint8_t(value[0].get<int>()), std::uint8_t(value[1].get<int>()),
                    std::uint8_t(value[2].get<int>())};
    }
    return pal;
}

void run_viz_labels(const RunConfig& cfg, const std::string& labels_path,
                    const std::string& out_path, const std::string& palette_path) {
    const LabelMap labels = read_label_png(labels_path, cfg.num_classes);
    const Palette pal =
        palette_path.empty() ? street_scene_palette() : load_palette(palette_path);
    write_rgb_png(colorize_labels(labels, pal), resolve_out(cfg, out_path));
}

int run_selfcheck_cmd() {
    const std::vector<CheckResult> results = run_selfcheck();
    for (const CheckResult& r : results)
        std::printf("[%s] %-26s %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str());
    if (!all_passed(results)) {
        std::printf("selfcheck: FAILED\n");
        return 1;
    }
    std::printf("selfcheck: all %zu checks passed\n", results.size());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundarykit — boundary-aware segmentation toolkit"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand; inherited on creation

    // global options, usable before any subcommand
    std::string config_path;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string log_level = "info";
    std::string output_dir = ".";
    int num_classes = 256;
    app.add_option("--config", config_path, "JSON config file");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--threads", threads, "worker threads (0 = all cores)");
    app.add_option("--log-level", log_level, "error|warn|info|debug");
    app.add_option("--output-dir", output_dir, "directory for relative output paths");
    app.add_option("--num-classes", num_classes, "label range accepted when reading PNGs");

    int exit_code = 0;
    auto make_config = [&]() {
        RunConfig cfg = config_path.empty() ? RunConfig{} : cli::load_config(config_path);
        if (app.count("--seed")) cfg.seed = seed;
        if (app.count("--threads")) cfg.threads = threads;
        if (app.count("--log-level")) cfg.log_level = log_level;
        if (app.count("--output-dir")) cfg.output_dir = output_dir;
        if (app.count("--num-classes")) cfg.num_classes = num_classes;
        return cfg;
    };

    // edges
    CLI::App* edges = app.add_subcommand("edges", "semantic edge extraction");
    edges->require_subcommand(1);
    {
        CLI::App* sub = edges->add_subcommand("extract", "label map -> edge mask PNG");
        auto opts = std::make_shared<std::map<std::string, std::string>>();
        auto sigma = std::make_shared<double>(1.0);
        auto low = std::make_shared<double>(0.1);
        auto high = std::make_shared<double>(0.2);
        sub->add_option("--labels", (*opts)["labels"], "input label PNG")->required();
        sub->add_option("--out", (*opts)["out"], "output edge PNG")->required();
        sub->add_option("--method", (*opts)["method"], "neighbor|canny");
        sub->add_option("--sigma", *sigma, "Gaussian std for canny");
        sub->add_option("--low", *low, "low hysteresis threshold");
        sub->add_option("--high", *high, "high hysteresis threshold");
        sub->callback([&, sub, opts, sigma, low, high]() {
            RunConfig cfg = make_config();
            if (sub->count("--method")) cfg.edges_method = (*opts)["method"];
            if (sub->count("--sigma")) cfg.edges_sigma = *sigma;
            if (sub->count("--low")) cfg.edges_low = *low;
            if (sub->count("--high")) cfg.edges_high = *high;
            cfg.validate();
            logger.level = Logger::parse_level(cfg.log_level);
            run_edges_extract(cfg, (*opts)["labels"], (*opts)["out"]);
        });
    }

    // warp
    CLI::App* warp_cmd = app.add_subcommand("warp", "displacement-field warping");
    warp_cmd->require_subcommand(1);
    {
        CLI::App* sub = warp_cmd->add_subcommand("apply", "warp a feature tensor");
        auto opts = std::make_shared<std::map<std::string, std::string>>();
        sub->add_option("--features", (*opts)["features"], "input BWTF tensor")->required();
        sub->add_option("--disp", (*opts)["disp"], "displacement BWTF tensor")->required();
        sub->add_option("--out", (*opts)["out"], "output BWTF tensor")->required();
        sub->add_option("--border", (*opts)["border"], "clamp|zeros");
        sub->callback([&, sub, opts]() {
            RunConfig cfg = make_config();
            if (sub->count("--border")) cfg.warp_border = (*opts)["border"];
            cfg.validate();
            logger.level = Logger::parse_level(cfg.log_level);
            run_warp_apply(cfg, (*opts)["features"], (*opts)["disp"], (*opts)["out"]);
        });

        CLI::App* gc = warp_cmd->add_subcommand("gradcheck",
                                                "verify analytic gradients numerically");
        auto eps = std::make_shared<double>(1e-3);
        auto tol = std::make_shared<double>(1e-3);
        gc->add_option("--eps", *eps, "finite-difference step");
        gc->add_option("--tol", *tol, "relative-error tolerance");
        gc->callback([&, eps, tol]() {
            RunConfig cfg = make_config();
            cfg.validate();
            logger.level = Logger::parse_level(cfg.log_level);
            exit_code = run_warp_gradcheck(cfg, *eps, *tol);
        });
    }

    // augment
    CLI::App* augment = app.add_subcommand("augment", "erosion copy-paste synthesis");
    augment->require_subcommand(1);
    struct AugmentArgs {
        cli::ManifestRecord rec;
        std::string out_img, out_labels, report;
        std::string manifest, out_dir;
        std::vector<int> classes;
        int erode_side = 5;
        int min_pixels = 1;
        int subset_size = 0;
    };
    auto aug = std::make_shared<AugmentArgs>();
    {
        CLI::App* sub = augment->add_subcommand("paste", "synthesize one training pair");
        sub->add_option("--target-img", aug->rec.target_image)->required();
        sub->add_option("--target-pseudo", aug->rec.target_pseudo)->required();
        sub->add_option("--dest-img", aug->rec.dest_image)->required();
        sub->add_option("--dest-labels", aug->rec.dest_labels)->required();
        sub->add_option("--out-img", aug->out_img)->required();
        sub->add_option("--out-labels", aug->out_labels)->required();
        sub->add_option("--report", aug->report, "report JSON path");
        sub->add_option("--classes", aug->classes, "pasteable class indices")->delimiter(',');
        sub->add_option("--erode-side", aug->erode_side, "odd structuring-element side");
        sub->add_option("--min-pixels", aug->min_pixels, "minimum surviving pixels");
        sub->add_option("--subset-size", aug->subset_size, "fixed subset size");
        sub->callback([&, sub]() {
            RunConfig cfg = make_config();
            if (sub->count("--classes")) cfg.augment_classes = aug->classes;
            if (sub->count("--erode-side")) cfg.erode_side = aug->erode_side;
            if (sub->count("--min-pixels")) cfg.min_surviving_pixels = aug->min_pixels;
            if (sub->count("--subset-size")) cfg.subset_size = aug->subset_size;
            cfg.validate();
            logger.level = Logger::parse_level(cfg.log_level);
            run_augment_paste(cfg, aug->rec, aug->out_img, aug->out_labels, aug->report);
        });

        CLI::App* batch = augment->add_subcommand("batch", "process a manifest of pairs");
        batch->add_option("--manifest", aug->manifest, "TSV manifest")->required();
        batch->add_option("--out-dir", aug->out_dir, "output directory")->required();
        batch->add_option("--report", aug->report, "combined report JSON path");
        batch->add_option("--classes", aug->classes, "pasteable class indices")->delimiter(',');
        batch->add_option("--erode-side", aug->erode_side, "odd structuring-element side");
        batch->add_option("--min-pixels", aug->min_pixels, "minimum surviving pixels");
        batch->add_option("--subset-size", aug->subset_size, "fixed subset size");
        batch->callback([&, batch]() {
            RunConfig cfg = make_config();
            if (batch->count("--classes")) cfg.augment_classes = aug->classes;
            if (batch->count("--erode-side")) cfg.erode_side = aug->erode_side;
            if (batch->count("--min-pixels")) cfg.min_surviving_pixels = aug->min_pixels;
            if (batch->count("--subset-size")) cfg.subset_size = aug->subset_size;
            cfg.validate();
            logger.level = Logger::parse_level(cfg.log_level);
            run_augment_batch(cfg, aug->manifest, aug->out_dir, aug->report);
        });
    }

    // eval
    CLI::App* eval_cmd = app.add_subcommand("eval", "segmentation metrics");
    eval_cmd->require_subcommand(1);
    struct EvalArgs {
        std::string pred, gt, report;
        int classes = 19;
        std::vector<int> subset;
        std::vector<int> bands;
        std::string metric, convention;
    };
    auto ev = std::make_shared<EvalArgs>();
    {
        CLI::App* sub = eval_cmd->add_subcommand("miou", "per-class IoU and mean");
        sub->add_option("--pred", ev->pred, "prediction directory")->required();
        sub->add_option("--gt", ev->gt, "ground-truth directory")->required();
        sub->add_option("--classes", ev->classes, "class count");
        sub->add_option("--subset", ev->subset, "classes included in the mean")->delimiter(',');
        sub->add_option("--out", ev->report, "report JSON path");
        sub->callback([&, sub]() {
            RunConfig cfg = make_config();
            if (sub->count("--classes")) cfg.eval_classes = ev->classes;
            if (sub->count("--subset")) cfg.eval_subset = ev->subset;
            cfg.validate();
            logger.level = Logger::parse_level(cfg.log_level);
            run_eval_miou(cfg, ev->pred, ev->gt, ev->report);
        });

        CLI::App* tri = eval_cmd->add_subcommand("trimap", "mIoU in boundary bands");
        tri->add_option("--pred", ev->pred, "prediction directory")->required();
        tri->add_option("--gt", ev->gt, "ground-truth directory")->required();
        tri->add_option("--classes", ev->classes, "class count");
        tri->add_option("--bands", ev->bands, "bandwidths in pixels")->delimiter(',');
        tri->add_option("--metric", ev->metric, "euclidean|chebyshev");
        tri->add_option("--convention", ev->convention, "per-side|total-width");
        tri->add_option("--out", ev->report, "report JSON path");
        tri->callback([&, tri]() {
            RunConfig cfg = make_config();
            if (tri->count("--classes")) cfg.eval_classes = ev->classes;
            if (tri->count("--bands")) cfg.eval_bands = ev->bands;
            if (tri->count("--metric")) cfg.eval_metric = ev->metric;
            if (tri->count("--convention")) cfg.eval_convention = ev->convention;
            cfg.validate();
            logger.level = Logger::parse_level(cfg.log_level);
            run_eval_trimap(cfg, ev->pred, ev->gt, ev->report);
        });
    }

    // viz
    CLI::App* viz = app.add_subcommand("viz", "inspection images");
    viz->require_subcommand(1);
    struct VizArgs {
        std::string disp, labels, out, palette;
        double max_mag = 0.0;
    };
    auto vz = std::make_shared<VizArgs>();
    {
        CLI::App* flow = viz->add_subcommand("flow", "displacement field -> color PNG");
        flow->add_option("--disp", vz->disp, "displacement BWTF tensor")->required();
        flow->add_option("--out", vz->out, "output PNG")->required();
        flow->add_option("--max-mag", vz->max_mag, "magnitude of full saturation");
        flow->callback([&]() {
            RunConfig cfg = make_config();
            cfg.validate();
            logger.level = Logger::parse_level(cfg.log_level);
            run_viz_flow(cfg, vz->disp, vz->out, vz->max_mag);
        });

        CLI::App* labels = viz->add_subcommand("labels", "label map -> color PNG");
        labels->add_option("--labels", vz->labels, "input label PNG")->required();
        labels->add_option("--out", vz->out, "output PNG")->required();
        labels->add_option("--palette", vz->palette, "palette JSON (class -> [r,g,b])");
        labels->callback([&]() {
            RunConfig cfg = make_config();
            cfg.validate();
            logger.level = Logger::parse_level(cfg.log_level);
            run_viz_labels(cfg, vz->labels, vz->out, vz->palette);
        });
    }

    // selfcheck
    CLI::App* selfcheck = app.add_subcommand("selfcheck", "run the embedded test suite");
    selfcheck->callback([&]() {
        RunConfig cfg = make_config();
        cfg.validate();
        logger.level = Logger::parse_level(cfg.log_level);
        exit_code = run_selfcheck_cmd();
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // --help exits 0, bad usage is a validation error
    } catch (const ValidationError& e) {
        std::cerr << "[error] " << e.what() << "\n";
        return 1;
    } catch (const DataError& e) {
        std::cerr << "[error] " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "[error] " << e.what() << "\n";
        return 2;
    }
    return exit_code;
}
