#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bk::cli {

// Effective settings for one invocation: built from defaults, then an
// optional JSON config file, then explicit command-line flags.
struct RunConfig {
    // global
    std::uint64_t seed = 0;
    int threads = 0; // 0 = all hardware threads
    std::string log_level = "info";
    std::string output_dir = ".";
    int num_classes = 256; // label range accepted outside eval

    // edges
    std::string edges_method = "neighbor";
    double edges_sigma = 1.0;
    double edges_low = 0.1;
    double edges_high = 0.2;

    // warp
    std::string warp_border = "clamp";

    // augment
    std::vector<int> augment_classes = {5, 6, 7, 11, 12, 13, 14, 15, 16, 17, 18};
    int erode_side = 5;
    int min_surviving_pixels = 1;
    std::optional<int> subset_size;

    // losses
    double lambda_edge = 0.1;
    std::string loss_reduction = "mean";
    double probability_floor = 1e-7;

    // eval
    int eval_classes = 19;
    std::vector<int> eval_bands = {4, 8, 16, 20};
    std::string eval_metric = "euclidean";
    std::string eval_convention = "per-side";
    std::optional<std::vector<int>> eval_subset;

    void validate() const; // throws bk::ValidationError
};

/// Parses the JSON config document onto the defaults. Unknown keys and type
/// mismatches raise ValidationError naming the key; a missing or unreadable
/// file raises DataError.
RunConfig load_config(const std::string& path);

/// One line per record, tab-separated:
/// target_image <TAB> target_pseudo <TAB> dest_image <TAB> dest_labels <TAB> stem
struct ManifestRecord {
    std::string target_image;
    std::string target_pseudo;
    std::string dest_image;
    std::string dest_labels;
    std::string stem;
};

/// Reads and validates a manifest: every referenced file must exist and the
/// output stems must be unique.
std::vector<ManifestRecord> load_manifest(const std::string& path);

} // namespace bk::cli
