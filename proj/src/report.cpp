#include "clra/report.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

#include "clra/errors.hpp"

namespace clra {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Shortest decimal string that round-trips the exact double.
std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw InvalidInput("format_double: buffer overflow");
    return std::string(buf, end);
}

}  // namespace

MetricsRow::MetricsRow() : cf_target(kNan), cf_achieved(kNan) {
    metrics.mse = kNan;
    metrics.psnr = kNan;
    metrics.ssim = kNan;
    metrics.iou = kNan;
    metrics.rel_err = kNan;
    metrics.epi = kNan;
}

std::string csv_header() {
    return "method,cf_target,cf_achieved,matched,region,"
           "mse,psnr,ssim,iou,rel_err,epi";
}

std::string csv_row(const MetricsRow& row) {
    std::string line;
    line += row.method;
    line += ',';
    line += format_double(row.cf_target);
    line += ',';
    line += format_double(row.cf_achieved);
    line += ',';
    line += row.matched ? "true" : "false";
    line += ',';
    line += row.metrics.region;
    for (double v : {row.metrics.mse, row.metrics.psnr, row.metrics.ssim,
                     row.metrics.iou, row.metrics.rel_err, row.metrics.epi}) {
        line += ',';
        line += format_double(v);
    }
    return line;
}

nlohmann::json json_number(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    return value;
}

nlohmann::json to_json(const RunConfig& config) {
    return {
        {"command", config.command},
        {"input", config.input},
        {"mask", config.mask},
        {"method", config.method},
        {"patch_size", config.patch_size},
        {"stride", config.stride},
        {"clusters", config.clusters},
        {"alpha", json_number(config.alpha)},
        {"seed", config.seed},
        {"cf_threshold", json_number(config.cf_threshold)},
        {"iou_threshold", json_number(config.iou_threshold)},
        {"cf_targets", config.cf_targets},
        {"out", config.out},
        {"report", config.report_path},
        {"workers", config.workers},
        {"ssim_sliding", config.ssim_sliding},
        {"kmeans_plus_plus", config.kmeans_plus_plus},
    };
}

nlohmann::json to_json(const ClusterSummary& summary) {
    return {
        {"n_patches", summary.n_patches},
        {"rank", summary.rank},
        {"beta", json_number(summary.beta)},
        {"n_eff", summary.n_eff},
        {"cf", json_number(summary.cf)},
        {"cf_eff", json_number(summary.cf_eff)},
    };
}

nlohmann::json to_json(const RegionMetrics& metrics) {
    return {
        {"region", metrics.region},
        {"mse", json_number(metrics.mse)},
        {"psnr", json_number(metrics.psnr)},
        {"ssim", json_number(metrics.ssim)},
        {"iou", json_number(metrics.iou)},
        {"rel_err", json_number(metrics.rel_err)},
        {"epi", json_number(metrics.epi)},
    };
}

nlohmann::json to_json(const CompressionReport& report) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : report.clusters) clusters.push_back(to_json(c));
    nlohmann::json regions = nlohmann::json::array();
    for (const auto& r : report.regions) regions.push_back(to_json(r));
    return {
        {"method", report.method},
        {"cf_nominal", json_number(report.cf_nominal)},
        {"cf_effective", json_number(report.cf_effective)},
        {"ranks", report.ranks},
        {"clusters", clusters},
        {"regions", regions},
        {"wall_time_seconds", json_number(report.wall_time_seconds)},
        {"seed", report.seed},
        {"kmeans_iterations", report.kmeans_iterations},
        {"kmeans_converged", report.kmeans_converged},
        {"degenerate_spectrum", report.degenerate_spectrum},
    };
}

nlohmann::json to_json(const MetricsRow& row) {
    nlohmann::json j = to_json(row.metrics);
    j["method"] = row.method;
    j["cf_target"] = json_number(row.cf_target);
    j["cf_achieved"] = json_number(row.cf_achieved);
    j["matched"] = row.matched;
    return j;
}

RegionMetrics compute_region_metrics(const Matrix& reference,
                                     const Matrix& reconstruction,
                                     const RegionMask& region,
                                     const std::string& region_name,
                                     double max_value,
                                     double tau,
                                     bool sliding_ssim) {
    if (reference.rows() != reconstruction.rows() ||
        reference.cols() != reconstruction.cols() ||
        reference.rows() != region.rows() ||
        reference.cols() != region.cols()) {
        throw InvalidInput("compute_region_metrics: shape mismatch");
    }

    RegionMetrics out;
    out.region = region_name;
    // Degenerate regions (empty, flat, single pixel, no edges) make some
    // metrics undefined; record NaN for those cells and keep the rest.
    auto guarded = [](auto&& fn) -> double {
        try {
            return fn();
        } catch (const EmptyRegion&) {
        } catch (const DegenerateRegion&) {
        } catch (const UndefinedIoU&) {
        } catch (const ImageTooSmall&) {
        }
        return kNan;
    };

    out.mse = guarded([&] { return mse(reference, reconstruction, region); });
    out.psnr = guarded(
        [&] { return psnr(reference, reconstruction, region, max_value); });
    out.ssim = guarded([&] {
        return sliding_ssim
                   ? clra::ssim_sliding(reference, reconstruction, region,
                                        max_value)
                   : clra::ssim(reference, reconstruction, region, max_value);
    });
    out.iou = guarded([&] {
        const double t = tau < 0 ? otsu_threshold(reference, max_value) : tau;
        const RegionMask ref_fg = threshold_mask(reference, t) && region;
        const RegionMask rec_fg = threshold_mask(reconstruction, t) && region;
        return iou(ref_fg, rec_fg);
    });
    out.rel_err = guarded(
        [&] { return relative_error(reference, reconstruction, region); });
    out.epi = guarded([&] { return epi(reference, reconstruction, region); });
    return out;
}

}  // namespace clra
