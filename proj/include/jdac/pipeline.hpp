#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "json.hpp"

#include "jdac/engine.hpp"
#include "jdac/metrics.hpp"

namespace jdac {

/// {"output", "iterations_run", "stop_reason", "sigma_history": [[pre, post], ...],
///  "wall_time_seconds", "pre_check"}
nlohmann::json report_to_json(const RestorationReport& r, const std::string& output_path);

/// {"psnr_db", "rmse", "ssim", "ms_ssim", "domain"}; an infinite PSNR is
/// written as the string "inf".
nlohmann::json metrics_to_json(const MetricsReport& m);

/// One end-to-end run described as JSON. Unknown keys are rejected.
///
///   input        path to the volume to restore (required)
///   artifact     artifact spec text, applied before restoring (default "none")
///   noise        noise spec text (default "none")
///   seed         seed for both simulators (default 0)
///   denoiser     operator name (default "gauss")
///   corrector    operator name (default "identity")
///   delta_lr, max_iters, stop_threshold, pre_check   engine settings
///   output       path of the restored rvol (required)
///   corrupted    optional path for the simulated input
///   report       optional path for the restoration report JSON
///   reference    optional clean volume; enables metrics
///   metrics      optional path for {"image": ..., "gradient": ...} JSON
struct PipelineManifest {
    std::filesystem::path input;
    std::string artifact = "none";
    std::string noise = "none";
    std::uint64_t seed = 0;
    std::string denoiser = "gauss";
    std::string corrector = "identity";
    JdacConfig config;
    std::filesystem::path output;
    std::optional<std::filesystem::path> corrupted;
    std::optional<std::filesystem::path> report;
    std::optional<std::filesystem::path> reference;
    std::optional<std::filesystem::path> metrics;
};

PipelineManifest parse_manifest(const nlohmann::json& j);
PipelineManifest load_manifest(const std::filesystem::path& path);

/// corrupt -> restore -> (metrics), writing every requested artifact.
RestorationReport run_pipeline(const PipelineManifest& m);

} // namespace jdac
