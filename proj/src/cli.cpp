#include "jdac/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "CLI11.hpp"

#include "jdac/corruption.hpp"
#include "jdac/engine.hpp"
#include "jdac/error.hpp"
#include "jdac/estimation.hpp"
#include "jdac/external.hpp"
#include "jdac/io.hpp"
#include "jdac/metrics.hpp"
#include "jdac/pipeline.hpp"

namespace jdac {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Dims parse_dims(const std::string& text) {
    std::stringstream ss(text);
    std::array<long, 3> v{};
    char c1 = 0, c2 = 0;
    if (!(ss >> v[0] >> c1 >> v[1] >> c2 >> v[2]) || c1 != ',' || c2 != ',' || !ss.eof() || v[0] < 1 || v[1] < 1 ||
        v[2] < 1) {
        throw UsageError("--dims: expected L,W,H with positive integers, got '" + text + "'");
    }
    return {static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]), static_cast<std::size_t>(v[2])};
}

std::string decimal(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("cannot open '" + path + "' for writing");
    out << text;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Joint denoising and artifact correction for 3D volumes"};
    app.require_subcommand(1);

    // phantom
    auto* phantom = app.add_subcommand("phantom", "Write a synthetic phantom");
    std::string dims_text, kind = "ellipsoids", phantom_out;
    std::uint64_t phantom_seed = 0;
    phantom->add_option("--dims", dims_text, "L,W,H")->required();
    phantom->add_option("--kind", kind, "ellipsoids | checker-smooth | shepp-logan-like");
    phantom->add_option("--seed", phantom_seed);
    phantom->add_option("--out", phantom_out)->required();

    // corrupt
    auto* corrupt_cmd = app.add_subcommand("corrupt", "Apply an artifact, then noise");
    std::string corrupt_in, corrupt_out, artifact_text = "none", noise_text = "none";
    std::uint64_t corrupt_seed = 0;
    corrupt_cmd->add_option("--in", corrupt_in)->required();
    corrupt_cmd->add_option("--artifact", artifact_text, "e.g. gibbs:0.7, motion:default, ghosting:4,0.8,1, spike:1,0.5");
    corrupt_cmd->add_option("--noise", noise_text, "e.g. gaussian:0.10, rician:0.05, speckle:0.2, saltpepper:0.1");
    corrupt_cmd->add_option("--seed", corrupt_seed);
    corrupt_cmd->add_option("--out", corrupt_out)->required();

    // estimate
    auto* estimate = app.add_subcommand("estimate", "Print the gradient-map noise estimate");
    std::string estimate_in;
    bool raw = false;
    estimate->add_option("--in", estimate_in)->required();
    estimate->add_flag("--raw", raw, "print the uncalibrated gradient std");

    // restore
    auto* restore = app.add_subcommand("restore", "Run the iterative restoration");
    std::string restore_in, restore_out, report_path, denoiser_name, corrector_name;
    JdacConfig cfg;
    bool no_pre_check = false;
    double timeout_s = static_cast<double>(kDefaultExternalTimeout.count());
    restore->add_option("--in", restore_in)->required();
    restore->add_option("--denoiser", denoiser_name, "identity | gauss[:w] | external:<cmd>")->required();
    restore->add_option("--corrector", corrector_name, "identity | spike-notch[:z] | external:<cmd>")->required();
    restore->add_option("--delta", cfg.stop_threshold, "early-stop threshold (raw gradient std)");
    restore->add_option("--lr", cfg.delta_lr, "learning rate in (0, 1]");
    restore->add_option("--max-iters", cfg.max_iters);
    restore->add_flag("--no-pre-check", no_pre_check);
    restore->add_option("--timeout", timeout_s, "seconds allowed per external operator call");
    restore->add_option("--out", restore_out)->required();
    restore->add_option("--report", report_path, "write the restoration report as JSON");

    // metrics
    auto* metrics = app.add_subcommand("metrics", "Compare a volume against a reference");
    std::string test_path, ref_path;
    bool gradient_domain = false, as_json = false;
    metrics->add_option("--test", test_path)->required();
    metrics->add_option("--ref", ref_path)->required();
    metrics->add_flag("--gradient", gradient_domain, "evaluate on gradient-magnitude maps");
    metrics->add_flag("--json", as_json);

    // pipeline
    auto* pipeline = app.add_subcommand("pipeline", "Run a JSON manifest end to end");
    std::string manifest_path;
    pipeline->add_option("--manifest", manifest_path)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (*phantom) {
            PhantomKind k;
            try {
                k = parse_phantom_kind(kind);
            } catch (const UnknownPhantomKind&) {
                throw UsageError("--kind: unknown phantom kind '" + kind + "'");
            }
            write_rvol(make_phantom(parse_dims(dims_text), k, phantom_seed), phantom_out);
        } else if (*corrupt_cmd) {
            ArtifactSpec a;
            NoiseSpec n;
            try {
                a = parse_artifact_spec(artifact_text, corrupt_seed);
            } catch (const SpecParseError& e) {
                throw UsageError(std::string("--artifact: ") + e.what());
            }
            try {
                n = parse_noise_spec(noise_text, corrupt_seed);
            } catch (const SpecParseError& e) {
                throw UsageError(std::string("--noise: ") + e.what());
            }
            write_rvol(corrupt(read_volume(corrupt_in), a, n), corrupt_out);
        } else if (*estimate) {
            const NoiseEstimate e = estimate_noise(read_volume(estimate_in));
            out << decimal(raw ? e.raw_std : e.sigma_e) << "\n";
        } else if (*restore) {
            cfg.pre_check = !no_pre_check;
            if (!(cfg.delta_lr > 0.0 && cfg.delta_lr <= 1.0)) throw UsageError("--lr: must lie in (0, 1]");
            if (cfg.max_iters < 1) throw UsageError("--max-iters: must be >= 1");
            if (!(cfg.stop_threshold >= 0.0)) throw UsageError("--delta: must be >= 0");
            if (!(timeout_s > 0.0)) throw UsageError("--timeout: must be > 0");
            const auto timeout =
                std::chrono::milliseconds(static_cast<long long>(timeout_s * 1000.0));
            std::unique_ptr<Denoiser> d;
            std::unique_ptr<Corrector> c;
            try {
                d = make_denoiser(denoiser_name, timeout);
            } catch (const Error& e) {
                throw UsageError(std::string("--denoiser: ") + e.what());
            }
            try {
                c = make_corrector(corrector_name, timeout);
            } catch (const Error& e) {
                throw UsageError(std::string("--corrector: ") + e.what());
            }
            const RestorationReport r = jdac_run(read_volume(restore_in), *d, *c, cfg);
            write_rvol(r.output, restore_out);
            if (!report_path.empty()) write_text(report_to_json(r, restore_out).dump(2) + "\n", report_path);
        } else if (*metrics) {
            const Volume test = read_volume(test_path);
            const Volume ref = read_volume(ref_path);
            const MetricsReport m = gradient_domain ? gradient_metrics(test, ref) : image_metrics(test, ref);
            if (as_json) {
                out << metrics_to_json(m).dump() << "\n";
            } else {
                out << "domain  " << to_string(m.domain) << "\n"
                    << "psnr_db " << (std::isinf(m.psnr_db) ? std::string("inf") : decimal(m.psnr_db)) << "\n"
                    << "rmse    " << decimal(m.rmse) << "\n"
                    << "ssim    " << decimal(m.ssim) << "\n"
                    << "ms_ssim " << decimal(m.ms_ssim) << "\n";
            }
        } else if (*pipeline) {
            run_pipeline(load_manifest(manifest_path));
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitOk;
}

} // namespace jdac
