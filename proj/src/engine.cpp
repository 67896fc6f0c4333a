#include "jdac/engine.hpp"

#include <chrono>

#include "jdac/error.hpp"

namespace jdac {

void validate(const JdacConfig& cfg) {
    if (!(cfg.delta_lr > 0.0 && cfg.delta_lr <= 1.0)) throw InvalidArgument("learning rate must lie in (0, 1]");
    if (cfg.max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
    if (!(cfg.stop_threshold >= 0.0)) throw InvalidArgument("stop threshold must be >= 0");
    if (!(cfg.calibration > 0.0)) throw InvalidArgument("calibration must be > 0");
}

JdacState initial_state(const Volume& y) {
    JdacState s{y, y, y.like(0.0), 0, {}};
    s.u.set_residual(true);
    return s;
}

JdacState jdac_step(const JdacState& state, const Denoiser& d, const Corrector& a, const JdacConfig& cfg) {
    validate(cfg);
    if (state.k >= cfg.max_iters) throw InvalidArgument("step requested past max_iters");

    const Volume x = lerp(state.x, state.v, cfg.delta_lr);
    const Volume v_tilde = x + state.u;
    const NoiseEstimate pre = estimate_noise(v_tilde, cfg.calibration);
    Volume v_next = denoise_with(d, v_tilde, pre.sigma_e);
    const Volume x_tilde = v_next - state.u;
    Volume x_next = correct_with(a, x_tilde);
    Volume u_next = x_next - v_next;
    u_next.set_residual(true);

    const double post = estimate_noise(x_next, cfg.calibration).raw_std;

    JdacState next{std::move(x_next), std::move(v_next), std::move(u_next), state.k + 1, state.sigma_history};
    next.sigma_history.push_back({pre.raw_std, post});
    return next;
}

std::string_view to_string(StopReason r) {
    switch (r) {
    case StopReason::Threshold: return "threshold";
    case StopReason::MaxIters: return "max_iters";
    case StopReason::PreCheck: return "pre_check";
    }
    return "unknown";
}

RestorationReport jdac_run(const Volume& y, const Denoiser& d, const Corrector& a, const JdacConfig& cfg) {
    validate(cfg);
    const auto start = std::chrono::steady_clock::now();
    RestorationReport report;
    report.pre_check = cfg.pre_check;

    auto finish = [&](const Volume& result, StopReason reason) {
        report.output = cfg.clip_output ? clamp(result, 0.0, 1.0) : result;
        report.output.set_residual(false);
        report.stop_reason = reason;
        report.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        return report;
    };

    if (cfg.pre_check && estimate_noise(y, cfg.calibration).raw_std < cfg.stop_threshold) {
        return finish(y, StopReason::PreCheck);
    }

    JdacState state = initial_state(y);
    while (state.k < cfg.max_iters) {
        state = jdac_step(state, d, a, cfg);
        report.iterations_run = state.k;
        report.sigma_history = state.sigma_history;
        if (state.sigma_history.back().post < cfg.stop_threshold) return finish(state.x, StopReason::Threshold);
    }
    return finish(state.x, StopReason::MaxIters);
}

} // namespace jdac
