#include "jdac/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "jdac/corruption.hpp"
#include "jdac/error.hpp"
#include "jdac/external.hpp"
#include "jdac/io.hpp"

namespace jdac {

nlohmann::json report_to_json(const RestorationReport& r, const std::string& output_path) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto& s : r.sigma_history) history.push_back({s.pre, s.post});
    return {
        {"output", output_path},
        {"iterations_run", r.iterations_run},
        {"stop_reason", std::string(to_string(r.stop_reason))},
        {"sigma_history", history},
        {"wall_time_seconds", r.wall_time_seconds},
        {"pre_check", r.pre_check},
    };
}

nlohmann::json metrics_to_json(const MetricsReport& m) {
    nlohmann::json j;
    if (std::isinf(m.psnr_db)) {
        j["psnr_db"] = "inf";
    } else {
        j["psnr_db"] = m.psnr_db;
    }
    j["rmse"] = m.rmse;
    j["ssim"] = m.ssim;
    j["ms_ssim"] = m.ms_ssim;
    j["domain"] = std::string(to_string(m.domain));
    return j;
}

PipelineManifest parse_manifest(const nlohmann::json& j) {
    if (!j.is_object()) throw ManifestError("manifest must be a JSON object");
    static const std::set<std::string> known{
        "input", "artifact", "noise", "seed", "denoiser", "corrector", "delta_lr", "max_iters",
        "stop_threshold", "pre_check", "output", "corrupted", "report", "reference", "metrics",
    };
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) throw ManifestError("unknown key '" + key + "'");
    }

    PipelineManifest m;
    try {
        if (!j.contains("input")) throw ManifestError("missing required key 'input'");
        if (!j.contains("output")) throw ManifestError("missing required key 'output'");
        m.input = j.at("input").get<std::string>();
        m.output = j.at("output").get<std::string>();
        m.artifact = j.value("artifact", m.artifact);
        m.noise = j.value("noise", m.noise);
        m.seed = j.value("seed", m.seed);
        m.denoiser = j.value("denoiser", m.denoiser);
        m.corrector = j.value("corrector", m.corrector);
        m.config.delta_lr = j.value("delta_lr", m.config.delta_lr);
        m.config.max_iters = j.value("max_iters", m.config.max_iters);
        m.config.stop_threshold = j.value("stop_threshold", m.config.stop_threshold);
        m.config.pre_check = j.value("pre_check", m.config.pre_check);
        for (const char* key : {"corrupted", "report", "reference", "metrics"}) {
            if (!j.contains(key)) continue;
            const std::filesystem::path p = j.at(key).get<std::string>();
            if (std::string_view(key) == "corrupted") m.corrupted = p;
            if (std::string_view(key) == "report") m.report = p;
            if (std::string_view(key) == "reference") m.reference = p;
            if (std::string_view(key) == "metrics") m.metrics = p;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(e.what());
    }

    if (m.metrics && !m.reference) throw ManifestError("'metrics' needs a 'reference' volume");
    // Surface bad specs and settings at parse time rather than mid-run.
    try {
        parse_artifact_spec(m.artifact);
        parse_noise_spec(m.noise);
        validate(m.config);
    } catch (const Error& e) {
        throw ManifestError(e.what());
    }
    return m;
}

PipelineManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("cannot open manifest '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ManifestError(e.what());
    }
    return parse_manifest(j);
}

namespace {

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << "\n";
}

} // namespace

RestorationReport run_pipeline(const PipelineManifest& m) {
    const Volume input = read_volume(m.input);
    const Volume y = corrupt(input, parse_artifact_spec(m.artifact, m.seed), parse_noise_spec(m.noise, m.seed));
    if (m.corrupted) write_rvol(y, *m.corrupted);

    const auto d = make_denoiser(m.denoiser);
    const auto a = make_corrector(m.corrector);
    RestorationReport r = jdac_run(y, *d, *a, m.config);
    write_rvol(r.output, m.output);
    if (m.report) write_json(report_to_json(r, m.output.string()), *m.report);

    if (m.metrics) {
        const Volume ref = read_volume(*m.reference);
        write_json({{"image", metrics_to_json(image_metrics(r.output, ref))},
                    {"gradient", metrics_to_json(gradient_metrics(r.output, ref))}},
                   *m.metrics);
    }
    return r;
}

} // namespace jdac
