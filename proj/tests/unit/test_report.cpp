#include <doctest.h>

#include <cmath>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "clra/errors.hpp"
#include "clra/metrics.hpp"
#include "clra/report.hpp"
#include "support/fixtures.hpp"

using clra::Matrix;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

}  // namespace

TEST_CASE("csv_header: fixed column schema") {
    CHECK(clra::csv_header() ==
          "method,cf_target,cf_achieved,matched,region,"
          "mse,psnr,ssim,iou,rel_err,epi");
    CHECK(split_csv(clra::csv_header()).size() == 11);
}

TEST_CASE("csv_row: cell-for-cell layout with round-trip doubles") {
    clra::MetricsRow row;
    row.method = "cluster";
    row.cf_target = 6.0;
    row.cf_achieved = 6.25;
    row.matched = true;
    row.metrics.region = "roi";
    row.metrics.mse = 0.1;
    row.metrics.psnr = 58.13;
    row.metrics.ssim = 0.9991;
    row.metrics.iou = 1.0;
    row.metrics.rel_err = 0.003;
    row.metrics.epi = 0.75;

    const auto cells = split_csv(clra::csv_row(row));
    REQUIRE(cells.size() == 11);
    CHECK(cells[0] == "cluster");
    CHECK(std::stod(cells[1]) == 6.0);
    CHECK(std::stod(cells[2]) == 6.25);
    CHECK(cells[3] == "true");
    CHECK(cells[4] == "roi");
    CHECK(std::stod(cells[5]) == 0.1);
    CHECK(std::stod(cells[6]) == 58.13);
    CHECK(std::stod(cells[7]) == 0.9991);
    CHECK(std::stod(cells[8]) == 1.0);
    CHECK(std::stod(cells[9]) == 0.003);
    CHECK(std::stod(cells[10]) == 0.75);
}

TEST_CASE("csv_row: non-finite cells use inf/-inf/nan tokens") {
    clra::MetricsRow row;
    row.method = "global";
    row.matched = false;
    row.metrics.region = "full";
    row.metrics.psnr = std::numeric_limits<double>::infinity();
    row.metrics.ssim = -std::numeric_limits<double>::infinity();

    const auto cells = split_csv(clra::csv_row(row));
    REQUIRE(cells.size() == 11);
    CHECK(cells[1] == "nan");   // no cf target requested
    CHECK(cells[3] == "false");
    CHECK(cells[5] == "nan");   // default-constructed metrics are undefined
    CHECK(cells[6] == "inf");
    CHECK(cells[7] == "-inf");
}

TEST_CASE("json_number: finite stays numeric, non-finite becomes a string") {
    CHECK(clra::json_number(2.5).is_number());
    CHECK(clra::json_number(2.5).get<double>() == 2.5);
    CHECK(clra::json_number(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(clra::json_number(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(clra::json_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
    // The serialized form must be strict JSON (no bare nan/inf literals).
    CHECK(clra::json_number(std::numeric_limits<double>::quiet_NaN()).dump() ==
          "\"nan\"");
}

TEST_CASE("to_json(RunConfig): every parameter appears") {
    clra::RunConfig cfg;
    cfg.command = "compare";
    cfg.input = "in.png";
    cfg.mask = "mask.png";
    cfg.method = "both";
    cfg.patch_size = 16;
    cfg.stride = 8;
    cfg.clusters = 12;
    cfg.alpha = 0.9;
    cfg.seed = 42;
    cfg.cf_threshold = 0.15;
    cfg.iou_threshold = 50.0;
    cfg.cf_targets = {6.0, 40.0};
    cfg.out = "out.png";
    cfg.report_path = "report.json";
    cfg.workers = 4;
    cfg.ssim_sliding = true;
    cfg.kmeans_plus_plus = true;

    const auto j = clra::to_json(cfg);
    const std::set<std::string> expected = {
        "command", "input",         "mask",          "method",
        "patch_size", "stride",     "clusters",      "alpha",
        "seed",    "cf_threshold",  "iou_threshold", "cf_targets",
        "out",     "report",        "workers",       "ssim_sliding",
        "kmeans_plus_plus"};
    std::set<std::string> actual;
    for (const auto& item : j.items()) actual.insert(item.key());
    CHECK(actual == expected);
    CHECK(j["command"] == "compare");
    CHECK(j["patch_size"] == 16);
    CHECK(j["seed"] == 42);
    CHECK(j["cf_targets"] == nlohmann::json({6.0, 40.0}));
    CHECK(j["kmeans_plus_plus"] == true);
}

TEST_CASE("to_json(CompressionReport): summary fields round through") {
    clra::CompressionReport report;
    report.method = "cluster";
    report.cf_nominal = 10.5;
    report.cf_effective = 9.25;
    report.ranks = {3, 1, 2};
    clra::ClusterSummary s;
    s.n_patches = 7;
    s.rank = 3;
    s.beta = 0.25;
    s.n_eff = 6;
    s.cf = 4.0;
    s.cf_eff = 3.5;
    report.clusters.push_back(s);
    report.seed = 11;
    report.kmeans_iterations = 5;
    report.kmeans_converged = true;

    const auto j = clra::to_json(report);
    CHECK(j["method"] == "cluster");
    CHECK(j["cf_nominal"].get<double>() == 10.5);
    CHECK(j["cf_effective"].get<double>() == 9.25);
    CHECK(j["ranks"] == nlohmann::json({3, 1, 2}));
    REQUIRE(j["clusters"].size() == 1);
    CHECK(j["clusters"][0]["n_patches"] == 7);
    CHECK(j["clusters"][0]["beta"].get<double>() == 0.25);
    CHECK(j["clusters"][0]["n_eff"] == 6);
    CHECK(j["seed"] == 11);
    CHECK(j["kmeans_converged"] == true);
    // Strict JSON out of the box.
    CHECK_NOTHROW(nlohmann::json::parse(j.dump()));
}

TEST_CASE("compute_region_metrics: identical images score perfectly") {
    clra::Rng rng(71);
    Matrix image = fixtures::textured_disk_image(rng, 64, 64);
    const auto region = clra::full_mask(64, 64);

    const auto m =
        clra::compute_region_metrics(image, image, region, "full", 255.0);
    CHECK(m.region == "full");
    CHECK(m.mse == 0.0);
    CHECK(std::isinf(m.psnr));
    CHECK(m.ssim == doctest::Approx(1.0));
    CHECK(m.iou == 1.0);
    CHECK(m.rel_err == 0.0);
    CHECK(m.epi == doctest::Approx(1.0));
}

TEST_CASE("compute_region_metrics: region restriction changes the values") {
    clra::Rng rng(72);
    Matrix image = fixtures::textured_disk_image(rng, 64, 64);
    Matrix noisy = image;
    // Perturb only the disk interior so roi and complement rows differ.
    const auto roi = fixtures::disk_mask(64, 64);
    for (int i = 0; i < 64; ++i)
        for (int j = 0; j < 64; ++j)
            if (roi(i, j)) noisy(i, j) += 5.0;

    const auto on_roi =
        clra::compute_region_metrics(image, noisy, roi, "roi", 255.0);
    const auto off_roi = clra::compute_region_metrics(
        image, noisy, (!roi).eval(), "complement", 255.0);
    CHECK(on_roi.mse == doctest::Approx(25.0));
    CHECK(off_roi.mse == 0.0);
    CHECK(std::isinf(off_roi.psnr));
    CHECK(on_roi.psnr < 60.0);
}

TEST_CASE("compute_region_metrics: fixed tau drives the IoU masks") {
    Matrix a = Matrix::Zero(8, 8);
    a.block(0, 0, 8, 4).setConstant(100.0);
    Matrix b = Matrix::Zero(8, 8);
    b.block(0, 0, 8, 2).setConstant(100.0);

    const auto region = clra::full_mask(8, 8);
    // Foregrounds above 50: 32 px vs 16 px nested -> IoU = 16/32.
    const auto m =
        clra::compute_region_metrics(a, b, region, "full", 255.0, 50.0);
    CHECK(m.iou == doctest::Approx(0.5));
}

TEST_CASE("compute_region_metrics: degenerate cells become NaN, not errors") {
    // Zero reference: rel_err undefined; flat images: no edges for EPI,
    // IoU masks empty at any positive tau.
    Matrix zero = Matrix::Zero(16, 16);
    const auto region = clra::full_mask(16, 16);
    const auto m =
        clra::compute_region_metrics(zero, zero, region, "full", 255.0, 10.0);
    CHECK(m.mse == 0.0);
    CHECK(std::isnan(m.rel_err));
    CHECK(std::isnan(m.epi));
    CHECK(std::isnan(m.iou));

    // Single-pixel region: SSIM needs two pixels.
    clra::RegionMask one = clra::RegionMask::Constant(16, 16, false);
    one(3, 3) = true;
    Matrix img = Matrix::Constant(16, 16, 7.0);
    const auto single =
        clra::compute_region_metrics(img, img, one, "roi", 255.0, 3.0);
    CHECK(single.mse == 0.0);
    CHECK(std::isnan(single.ssim));
    CHECK(single.iou == 1.0);

    // Shape mismatches are caller bugs and still throw.
    CHECK_THROWS_AS(clra::compute_region_metrics(zero, Matrix::Zero(8, 8),
                                                 region, "full", 255.0),
                    clra::InvalidInput);
}

TEST_CASE("compute_region_metrics: sliding SSIM variant is selectable") {
    clra::Rng rng(73);
    Matrix image = fixtures::random_image(rng, 32, 32);
    Matrix other = fixtures::random_image(rng, 32, 32);
    const auto region = clra::full_mask(32, 32);

    const auto single = clra::compute_region_metrics(image, other, region,
                                                     "full", 255.0, -1.0, false);
    const auto sliding = clra::compute_region_metrics(image, other, region,
                                                      "full", 255.0, -1.0, true);
    CHECK(single.ssim ==
          clra::ssim(image, other, region, 255.0));
    CHECK(sliding.ssim ==
          clra::ssim_sliding(image, other, region, 255.0));
    CHECK(single.ssim != sliding.ssim);
}
