// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "jdac/corruption.hpp"
#include "jdac/engine.hpp"
#include "jdac/error.hpp"
#include "jdac/estimation.hpp"
#include "jdac/io.hpp"
#include "jdac/metrics.hpp"
#include "jdac/operators.hpp"
#include "oracles.hpp"
#include "tempdir.hpp"

using namespace jdac;

namespace {

const Dims k64{64, 64, 64};

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Calibrated estimate of pure Gaussian noise.
void noise_calibration(Outcome& o) {
    constexpr double kRelTol = 0.05;
    constexpr double kMaxSeconds = 10.0;
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double sigma : {0.05, 0.10, 0.15}) {
        double mean = 0.0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            mean += estimate_noise(add_gaussian(Volume(k64), sigma, seed)).sigma_e / 20.0;
        }
        const double rel = std::abs(mean - sigma) / sigma;
        worst = std::max(worst, rel);
        o.detail << " sigma " << sigma << " -> " << mean << ";";
    }
    const double elapsed = seconds_since(t0);
    o.detail << " worst rel err " << worst << " (tol " << kRelTol << "), " << elapsed << " s (limit " << kMaxSeconds
             << ")";
    o.require(worst <= kRelTol, "relative error");
    o.require(elapsed < kMaxSeconds, "runtime");
}

// 2. Estimate tracks the injected noise level on phantoms.
void estimator_linearity(Outcome& o) {
    constexpr double kRelTol = 0.15;
    double worst = 0.0;
    bool increasing = true;
    for (std::uint64_t p = 0; p < 5; ++p) {
        const Volume clean = make_phantom(k64, PhantomKind::Ellipsoids, p);
        double previous = -1.0;
        for (int step = 0; step <= 6; ++step) {
            const double sigma = 0.025 * step;
            const Volume y = corrupt(clean, ArtifactSpec{}, NoiseSpec{NoiseKind::Gaussian, sigma, 0.0, 100 + p});
            const double est = estimate_noise(y).sigma_e;
            increasing = increasing && est > previous;
            previous = est;
            if (sigma >= 0.05) worst = std::max(worst, std::abs(est - sigma) / sigma);
        }
    }
    o.detail << " strictly increasing: " << (increasing ? "yes" : "no") << "; worst rel err (sigma >= 0.05) " << worst
             << " (tol " << kRelTol << ")";
    o.require(increasing, "monotonicity");
    o.require(worst <= kRelTol, "relative error");
}

// 3. Multiplier equals x - v after every step.
void multiplier_identity(Outcome& o) {
    constexpr double kTol = 1e-12;
    const std::vector<std::pair<std::string, std::pair<std::function<std::unique_ptr<Denoiser>()>,
                                                       std::function<std::unique_ptr<Corrector>()>>>>
        pairs{
            {"identity/identity", {[] { return identity_denoiser(); }, [] { return identity_corrector(); }}},
            {"gauss/identity", {[] { return gaussian_denoiser(); }, [] { return identity_corrector(); }}},
            {"gauss/spike-notch", {[] { return gaussian_denoiser(); }, [] { return spike_notch_corrector(); }}},
        };
    const char* artifacts[] = {"spike:1,0.5", "gibbs:0.6", "ghosting:4,0.8,1"};
    double worst = 0.0;
    int steps = 0;
    std::uint64_t seed = 0;
    for (const auto& [name, makers] : pairs) {
        const auto d = makers.first();
        const auto a = makers.second();
        for (double lr : {0.25, 0.5, 1.0}) {
            ++seed;
            const Volume clean = make_phantom(Dims{40, 40, 40}, PhantomKind::Ellipsoids, seed);
            const Volume y = corrupt(clean, parse_artifact_spec(artifacts[seed % 3], seed),
                                     parse_noise_spec("gaussian:0.1", seed));
            JdacConfig cfg;
            cfg.delta_lr = lr;
            JdacState s = initial_state(y);
            for (int k = 0; k < 4; ++k) {
                s = jdac_step(s, *d, *a, cfg);
                const Volume diff = s.x - s.v;
                double scale = 1.0;
                for (double x : diff.data()) scale = std::max(scale, std::abs(x));
                worst = std::max(worst, test::max_abs_diff(s.u, diff) / scale);
                ++steps;
            }
        }
    }
    o.detail << " " << steps << " steps, worst relative |u - (x - v)| " << worst << " (tol " << kTol << ")";
    o.require(steps == 36, "step count");
    o.require(worst < kTol, "multiplier identity");
}

// 4. Identity operators are a fixed point.
void fixed_point(Outcome& o) {
    constexpr double kTol = 1e-12;
    const Volume y =
        clamp(add_gaussian(make_phantom(k64, PhantomKind::Ellipsoids, 12), 0.1, 12), 0.0, 1.0);
    double worst = 0.0;
    for (double lr : {0.25, 0.5, 1.0}) {
        JdacConfig cfg;
        cfg.delta_lr = lr;
        cfg.max_iters = 4;
        cfg.pre_check = false;
        const RestorationReport r = jdac_run(y, IdentityDenoiser{}, IdentityCorrector{}, cfg);
        worst = std::max(worst, test::max_abs_diff(r.output, y));
        o.require(r.iterations_run == 4, "iterations");
    }
    o.detail << " max |output - input| " << worst << " (tol " << kTol << ")";
    o.require(worst <= kTol, "fixed point");
}

// 5. Early stopping at the default threshold.
void early_stopping(Outcome& o) {
    const Volume clean = make_phantom(k64, PhantomKind::Ellipsoids, 7);
    const double raw = estimate_noise(clean).raw_std;
    const GaussianDenoiser d;
    const SpikeNotchCorrector a;
    JdacConfig on;
    JdacConfig off;
    off.pre_check = false;
    const RestorationReport with_check = jdac_run(clean, d, a, on);
    const RestorationReport without_check = jdac_run(clean, d, a, off);
    const RestorationReport noisy = jdac_run(add_gaussian(clean, 0.10, 7), d, a, on);
    o.detail << " clean raw std " << raw << " (threshold " << kDefaultStopThreshold << "); pre-check run "
             << with_check.iterations_run << " iters (" << to_string(with_check.stop_reason) << "); no pre-check "
             << without_check.iterations_run << " iters; noisy input " << noisy.iterations_run << " iters";
    o.require(raw < kDefaultStopThreshold, "clean phantom below threshold");
    o.require(with_check.iterations_run == 0 && with_check.stop_reason == StopReason::PreCheck, "pre-check stop");
    o.require(without_check.iterations_run <= 1, "no pre-check iterations");
    o.require(noisy.iterations_run >= 1, "noisy run iterates");
}

// 6. Joint restoration improves image and gradient domains.
void joint_restoration(Outcome& o) {
    constexpr int kRuns = 10;
    constexpr int kMinImproved = 9;
    constexpr double kMinMedianGainDb = 3.0;
    constexpr double kMaxSeconds = 300.0;
    const auto t0 = std::chrono::steady_clock::now();
    const GaussianDenoiser d;
    const SpikeNotchCorrector a;
    int improved = 0;
    std::vector<double> gains;
    for (std::uint64_t seed = 0; seed < kRuns; ++seed) {
        const Volume clean = make_phantom(k64, PhantomKind::Ellipsoids, seed);
        const Volume y =
            corrupt(clean, parse_artifact_spec("spike:1,0.5", seed), parse_noise_spec("gaussian:0.10", seed));
        const RestorationReport r = jdac_run(y, d, a);
        const MetricsReport gi = gradient_metrics(y, clean);
        const MetricsReport go = gradient_metrics(r.output, clean);
        const bool better = rmse(r.output, clean) < rmse(y, clean) && go.rmse < gi.rmse;
        improved += better ? 1 : 0;
        gains.push_back(go.psnr_db - gi.psnr_db);
    }
    std::sort(gains.begin(), gains.end());
    const double median = 0.5 * (gains[kRuns / 2 - 1] + gains[kRuns / 2]);
    const double elapsed = seconds_since(t0);
    o.detail << " improved in both domains " << improved << "/" << kRuns << " (need " << kMinImproved
             << "); median gradient PSNR gain " << median << " dB (need " << kMinMedianGainDb << "); " << elapsed
             << " s (limit " << kMaxSeconds << ")";
    o.require(improved >= kMinImproved, "improvement count");
    o.require(median >= kMinMedianGainDb, "median gain");
    o.require(elapsed < kMaxSeconds, "runtime");
}

// 7. Loss identities and brute-force agreement.
void loss_identities(Outcome& o) {
    constexpr double kTol = 1e-12;
    double worst_sum = 0.0, worst_offset = 0.0, worst_oracle = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto [m, m_hat] = test::lcg_pair(Dims{8, 8, 8}, 2 * seed + 1, 2 * seed + 2);
        const LossReport r = loss_total(m, m_hat);
        worst_sum = std::max(worst_sum, std::abs(r.l_a - (r.l_m + r.l_g)));
        worst_sum = std::max(worst_sum, std::abs(r.l_a - (loss_motion(m, m_hat) + loss_gradient(m, m_hat))));
        const double c = 0.1 * static_cast<double>(seed) - 1.0;
        worst_offset = std::max(worst_offset, loss_gradient(m, m + c));
        worst_oracle = std::max(worst_oracle, std::abs(loss_noise(m, m_hat) - oracle::l1_mean(m, m_hat)));
        worst_oracle = std::max(worst_oracle, std::abs(loss_motion(m, m_hat) - oracle::l1_mean(m, m_hat)));
        worst_oracle = std::max(worst_oracle, std::abs(loss_gradient(m, m_hat) - oracle::gradient_l1_mean(m, m_hat)));
    }
    o.detail << " |L_A - (L_m + L_g)| " << worst_sum << "; L_g(m, m + c) " << worst_offset << "; oracle diff "
             << worst_oracle << " (tol " << kTol << ")";
    o.require(worst_sum <= kTol, "L_A identity");
    o.require(worst_offset <= kTol, "gradient offset");
    o.require(worst_oracle <= kTol, "oracle agreement");
}

// 8. Metric and transform oracles.
void metric_oracles(Outcome& o) {
    constexpr double kSsimTol = 1e-9;
    constexpr double kFftTol = 1e-6;
    constexpr double kPsnrTol = 1e-12;
    double ssim_diff = 0.0;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto [a, b] = test::lcg_pair(Dims{16, 16, 16}, 40 + seed, 50 + seed);
        ssim_diff = std::max(ssim_diff, std::abs(ssim3d(a, b) - oracle::ssim(a, b)));
    }
    double psnr_diff = 0.0;
    const Volume clean = make_phantom(Dims{32, 32, 32}, PhantomKind::Ellipsoids, 2);
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const Volume y = add_gaussian(clean, 0.02 * static_cast<double>(seed + 1), seed);
        for (const MetricsReport& r : {image_metrics(y, clean), gradient_metrics(y, clean)}) {
            psnr_diff = std::max(psnr_diff, std::abs(r.psnr_db - 20.0 * std::log10(1.0 / r.rmse)));
        }
    }
    const Volume v = test::lcg_volume(Dims{16, 16, 16}, 77);
    const KSpace k = fft3(v);
    const auto ref = oracle::dft3(v);
    double fft_diff = 0.0;
    for (std::size_t n = 0; n < ref.size(); ++n) fft_diff = std::max(fft_diff, std::abs(k.data[n] - ref[n]));
    o.detail << " ssim vs sliding window " << ssim_diff << " (tol " << kSsimTol << "); psnr identity " << psnr_diff
             << "; fft vs direct DFT " << fft_diff << " (tol " << kFftTol << ")";
    o.require(ssim_diff <= kSsimTol, "ssim oracle");
    o.require(psnr_diff <= kPsnrTol, "psnr identity");
    o.require(fft_diff <= kFftTol, "fft oracle");
}

// 9. Simulators are reproducible; Gibbs severity is monotone.
void corruption_reproducibility(Outcome& o) {
    const Volume clean = make_phantom(k64, PhantomKind::Ellipsoids, 3);
    const char* noises[] = {"gaussian:0.1", "rician:0.1", "speckle:0.2", "saltpepper:0.1"};
    const char* artifacts[] = {"gibbs:0.7", "motion:default", "ghosting:default", "spike:1,0.5"};
    int reproducible = 0, total = 0;
    for (const char* n : noises) {
        const NoiseSpec spec = parse_noise_spec(n, 42);
        reproducible += test::bit_identical(add_noise(clean, spec), add_noise(clean, spec)) ? 1 : 0;
        ++total;
    }
    for (const char* a : artifacts) {
        const ArtifactSpec spec = parse_artifact_spec(a, 42);
        reproducible += test::bit_identical(apply_artifact(clean, spec), apply_artifact(clean, spec)) ? 1 : 0;
        ++total;
    }
    bool monotone = true;
    double previous = 0.0;
    std::ostringstream grid;
    for (int step = 0; step <= 6; ++step) {
        const double e = rmse(apply_gibbs(clean, 0.5 + 0.05 * step), clean);
        monotone = monotone && e >= previous;
        previous = e;
        grid << (step ? "," : "") << e;
    }
    o.detail << " bit-reproducible " << reproducible << "/" << total << "; gibbs rmse over alpha 0.5..0.8: "
             << grid.str();
    o.require(reproducible == total, "reproducibility");
    o.require(monotone, "gibbs monotonicity");
}

// 10. rvol round trips and malformed-header rejection.
void rvol_io(Outcome& o) {
    test::ScratchDir dir;
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<std::size_t> extent(1, 12);
    std::uniform_real_distribution<double> value(-10.0, 10.0);
    std::uniform_real_distribution<double> spacing(0.1, 4.0);
    int lossless = 0;
    for (int n = 0; n < 1000; ++n) {
        const Dims d{extent(rng), extent(rng), extent(rng)};
        Volume v(d, Spacing{static_cast<float>(spacing(rng)), static_cast<float>(spacing(rng)),
                            static_cast<float>(spacing(rng))});
        for (double& x : v.data()) x = static_cast<float>(value(rng));
        v.set_residual(n % 2 == 0);
        const auto path = dir / "v.rvol";
        write_rvol(v, path);
        const Volume r = read_rvol(path);
        const bool same = test::bit_identical(r, v) && r.residual() == v.residual() &&
                          r.spacing().x == v.spacing().x && r.spacing().y == v.spacing().y &&
                          r.spacing().z == v.spacing().z;
        lossless += same ? 1 : 0;
    }

    write_rvol(Volume(Dims{4, 4, 4}, {}, 0.5), dir / "good.rvol");
    const std::string good = test::read_file(dir / "good.rvol");
    auto expect = [&](const std::string& name, const std::string& bytes, auto tag) {
        using Expected = decltype(tag);
        test::write_file(dir / name, bytes);
        try {
            read_rvol(dir / name);
        } catch (const Expected&) {
            return true;
        } catch (...) {
        }
        return false;
    };
    std::string bad_magic = good;
    bad_magic.replace(0, 4, "XXXX");
    std::string bad_version = good;
    bad_version[4] = 2;
    int rejected = 0;
    rejected += expect("truncated.rvol", good.substr(0, good.size() - 4), TruncatedPayload("")) ? 1 : 0;
    rejected += expect("header.rvol", good.substr(0, 20), TruncatedPayload("")) ? 1 : 0;
    rejected += expect("magic.rvol", bad_magic, BadMagic("")) ? 1 : 0;
    rejected += expect("version.rvol", bad_version, VersionUnsupported("")) ? 1 : 0;
    o.detail << " lossless round trips " << lossless << "/1000; malformed files rejected with the named error "
             << rejected << "/4";
    o.require(lossless == 1000, "round trips");
    o.require(rejected == 4, "malformed corpus");
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, void (*)(Outcome&)>> criteria{
        {"noise estimator calibration", noise_calibration},
        {"estimator tracks noise level", estimator_linearity},
        {"multiplier identity", multiplier_identity},
        {"identity fixed point", fixed_point},
        {"early stopping", early_stopping},
        {"joint restoration", joint_restoration},
        {"loss identities", loss_identities},
        {"metric oracles", metric_oracles},
        {"corruption reproducibility", corruption_reproducibility},
        {"rvol i/o", rvol_io},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << " [exception: " << e.what() << "]";
        }
        std::printf("%s %2zu %-28s (%.2f s)%s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    seconds_since(t0), o.detail.str().c_str());
        failed += o.pass ? 0 : 1;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
