#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "clra/metrics.hpp"
#include "clra/pipeline.hpp"

namespace clra {

// Complete echo of one command invocation: every knob that influences the
// output, sufficient to reproduce the run.
struct RunConfig {
    std::string command;
    std::string input;
    std::string mask;              // empty = no mask supplied
    std::string method = "cluster";
    int patch_size = 8;
    int stride = 0;                // 0 means the default floor(patch_size / 2)
    int clusters = 8;
    double alpha = 0.95;
    std::uint64_t seed = 0;
    double cf_threshold = 0.15;
    double iou_threshold = -1.0;   // negative = derive via Otsu on the reference
    std::vector<double> cf_targets;
    std::string out;
    std::string report_path;
    unsigned workers = 1;
    bool ssim_sliding = false;
    bool kmeans_plus_plus = false;
};

// One row of the fixed tabular schema shared by the evaluate and compare
// commands. NaN marks a value that is undefined for the row (for example
// cf_target when no target was requested).
struct MetricsRow {
    std::string method;
    double cf_target;
    double cf_achieved;
    bool matched = true;
    RegionMetrics metrics;

    MetricsRow();
};

// Fixed column list: method, cf_target, cf_achieved, matched, region, mse,
// psnr, ssim, iou, rel_err, epi. No trailing newline.
std::string csv_header();

// One data line in the schema above; doubles use shortest round-trip
// formatting, non-finite values the tokens inf/-inf/nan. No trailing newline.
std::string csv_row(const MetricsRow& row);

// Strict JSON has no literals for non-finite doubles; map them to the
// strings "inf", "-inf", "nan" and keep finite values numeric.
nlohmann::json json_number(double value);

nlohmann::json to_json(const RunConfig& config);
nlohmann::json to_json(const ClusterSummary& summary);
nlohmann::json to_json(const RegionMetrics& metrics);
nlohmann::json to_json(const CompressionReport& report);
nlohmann::json to_json(const MetricsRow& row);

// Full metric set between a reference and a reconstruction over one region.
// IoU compares the foreground masks obtained by thresholding each image at
// tau (negative tau = Otsu on the reference), both intersected with the
// region. A metric that is undefined on this region (empty, single pixel,
// zero reference, no edges) is reported as NaN instead of aborting the row;
// shape mismatches still throw.
RegionMetrics compute_region_metrics(const Matrix& reference,
                                     const Matrix& reconstruction,
                                     const RegionMask& region,
                                     const std::string& region_name,
                                     double max_value,
                                     double tau = -1.0,
                                     bool sliding_ssim = false);

}  // namespace clra
