#include "run_config.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <set>

#include "boundarykit/errors.hpp"

namespace bk::cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad_key(const std::string& section, const std::string& key,
                          const char* what) {
    throw ValidationError("config: " + std::string(what) + " key '" +
                          (section.empty() ? key : section + "." + key) + "'");
}

void check_keys(const json& obj, const std::string& section,
                const std::set<std::string>& known) {
    if (!obj.is_object())
        throw ValidationError("config: section '" + section + "' must be an object");
    for (const auto& [key, value] : obj.items())
        if (!known.count(key)) bad_key(section, key, "unknown");
}

template <typename T>
void fetch(const json& obj, const std::string& section, const std::string& key, T& dst) {
    if (!obj.contains(key)) return;
    try {
        dst = obj.at(key).get<T>();
    } catch (const json::exception&) {
        bad_key(section, key, "wrong type for");
    }
}

void fetch_optional_int(const json& obj, const std::string& section, const std::string& key,
                        std::optional<int>& dst) {
    if (!obj.contains(key)) return;
    if (obj.at(key).is_null()) {
        dst.reset();
        return;
    }
    try {
        dst = obj.at(key).get<int>();
    } catch (const json::exception&) {
        bad_key(section, key, "wrong type for");
    }
}

void apply_document(RunConfig& cfg, const json& doc) {
    check_keys(doc, "", {"global", "edges", "warp", "augment", "losses", "eval"});

    if (doc.contains("global")) {
        const json& g = doc.at("global");
        check_keys(g, "global", {"seed", "threads", "log_level", "output_dir",
                                 "num_classes"});
        fetch(g, "global", "seed", cfg.seed);
        fetch(g, "global", "threads", cfg.threads);
        fetch(g, "global", "log_level", cfg.log_level);
        fetch(g, "global", "output_dir", cfg.output_dir);
        fetch(g, "global", "num_classes", cfg.num_classes);
    }
    if (doc.contains("edges")) {
        const json& e = doc.at("edges");
        check_keys(e, "edges", {"method", "sigma", "low", "high"});
        fetch(e, "edges", "method", cfg.edges_method);
        fetch(e, "edges", "sigma", cfg.edges_sigma);
        fetch(e, "edges", "low", cfg.edges_low);
        fetch(e, "edges", "high", cfg.edges_high);
    }
    if (doc.contains("warp")) {
        const json& w = doc.at("warp");
        check_keys(w, "warp", {"border"});
        fetch(w, "warp", "border", cfg.warp_border);
    }
    if (doc.contains("augment")) {
        const json& a = doc.at("augment");
        check_keys(a, "augment", {"classes", "erode_side", "min_surviving_pixels",
                                  "subset_size"});
        fetch(a, "augment", "classes", cfg.augment_classes);
        fetch(a, "augment", "erode_side", cfg.erode_side);
        fetch(a, "augment", "min_surviving_pixels", cfg.min_surviving_pixels);
        fetch_optional_int(a, "augment", "subset_size", cfg.subset_size);
    }
    if (doc.contains("losses")) {
        const json& l = doc.at("losses");
        check_keys(l, "losses", {"lambda_edge", "reduction", "probability_floor"});
        fetch(l, "losses", "lambda_edge", cfg.lambda_edge);
        fetch(l, "losses", "reduction", cfg.loss_reduction);
        fetch(l, "losses", "probability_floor", cfg.probability_floor);
    }
    if (doc.contains("eval")) {
        const json& e = doc.at("eval");
        check_keys(e, "eval", {"classes", "bands", "metric", "convention", "subset"});
        fetch(e, "eval", "classes", cfg.eval_classes);
        fetch(e, "eval", "bands", cfg.eval_bands);
        fetch(e, "eval", "metric", cfg.eval_metric);
        fetch(e, "eval", "convention", cfg.eval_convention);
        if (e.contains("subset")) {
            std::vector<int> subset;
            fetch(e, "eval", "subset", subset);
            cfg.eval_subset = std::move(subset);
        }
    }
}

void require_choice(const std::string& value, std::initializer_list<const char*> allowed,
                    const char* name) {
    for (const char* a : allowed)
        if (value == a) return;
    std::string msg = "config: '" + value + "' is not a valid " + name + " (expected";
    for (const char* a : allowed) msg += std::string(" ") + a;
    throw ValidationError(msg + ")");
}

} // namespace

void RunConfig::validate() const {
    require_choice(log_level, {"error", "warn", "info", "debug"}, "log level");
    require_choice(edges_method, {"neighbor", "canny"}, "edge method");
    require_choice(warp_border, {"clamp", "zeros"}, "border mode");
    require_choice(loss_reduction, {"mean", "sum"}, "reduction");
    require_choice(eval_metric, {"euclidean", "chebyshev"}, "distance metric");
    require_choice(eval_convention, {"per-side", "total-width"}, "band convention");

    if (threads < 0) throw ValidationError("config: threads must be >= 0");
    if (num_classes < 1 || num_classes > 256)
        throw ValidationError("config: num_classes must be in [1,256]");
    if (eval_classes < 1 || eval_classes > 256)
        throw ValidationError("config: eval.classes must be in [1,256]");
    if (erode_side < 1 || erode_side % 2 == 0)
        throw ValidationError("config: erode_side must be odd and >= 1");
    if (!(edges_sigma > 0.0))
        throw ValidationError("config: edges.sigma must be > 0");
    if (!(edges_low < edges_high) || edges_low <= 0.0)
        throw ValidationError("config: edges thresholds need 0 < low < high");
    if (lambda_edge < 0.0)
        throw ValidationError("config: lambda_edge must be >= 0");
    if (!(probability_floor > 0.0 && probability_floor < 0.5))
        throw ValidationError("config: probability_floor must lie in (0, 0.5)");
    if (eval_bands.empty())
        throw ValidationError("config: eval.bands must be nonempty");
    for (std::size_t i = 0; i < eval_bands.size(); ++i) {
        if (eval_bands[i] <= 0)
            throw ValidationError("config: eval.bands must be strictly positive");
        if (i > 0 && eval_bands[i] <= eval_bands[i - 1])
            throw ValidationError("config: eval.bands must be sorted ascending");
    }
    if (min_surviving_pixels < 0)
        throw ValidationError("config: min_surviving_pixels must be >= 0");
    if (subset_size && *subset_size < 1)
        throw ValidationError("config: subset_size must be >= 1 when set");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("config: cannot open '" + path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("config '" + path + "': " + e.what());
    }
    RunConfig cfg;
    apply_document(cfg, doc);
    cfg.validate();
    return cfg;
}

std::vector<ManifestRecord> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("manifest: cannot open '" + path + "'");

    std::vector<ManifestRecord> records;
    std::set<std::string> stems;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> fields;
        std::size_t start = 0;
        while (true) {
            const std::size_t tab = line.find('\t', start);
            fields.push_back(line.substr(start, tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (fields.size() != 5)
            throw DataError("manifest '" + path + "' line " + std::to_string(lineno) +
                            ": expected 5 tab-separated fields, got " +
                            std::to_string(fields.size()));

        ManifestRecord rec{fields[0], fields[1], fields[2], fields[3], fields[4]};
        for (const std::string* f :
             {&rec.target_image, &rec.target_pseudo, &rec.dest_image, &rec.dest_labels})
            if (!std::filesystem::exists(*f))
                throw DataError("manifest '" + path + "' line " + std::to_string(lineno) +
                                ": missing file '" + *f + "'");
        if (rec.stem.empty() || !stems.insert(rec.stem).second)
            throw DataError("manifest '" + path + "' line " + std::to_string(lineno) +
                            ": empty or duplicate stem '" + rec.stem + "'");
        records.push_back(std::move(rec));
    }
    if (records.empty()) throw DataError("manifest '" + path + "': no records");
    return records;
}

} // namespace bk::cli
