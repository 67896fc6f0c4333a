#pragma once

#include <string_view>
#include <vector>

#include "jdac/estimation.hpp"
#include "jdac/operators.hpp"
#include "jdac/volume.hpp"

namespace jdac {

struct JdacConfig {
    double delta_lr = 0.5;                          // blend weight of v into x
    int max_iters = 4;
    double stop_threshold = kDefaultStopThreshold;  // raw gradient-std units
    bool pre_check = true;                          // return early if y is already clean
    double calibration = kDefaultCalibration;       // raw -> sigma_e for the denoiser
    bool clip_output = true;                        // clip the returned volume to [0, 1]
};

void validate(const JdacConfig& cfg);

/// Raw gradient-std estimates logged by one step: `pre` on the denoiser
/// input, `post` on the corrected estimate.
struct SigmaRecord {
    double pre = 0.0;
    double post = 0.0;
};

/// Iteration triple. After every completed step u == x - v exactly.
struct JdacState {
    Volume x; // current estimate
    Volume v; // denoised auxiliary
    Volume u; // residual multiplier
    int k = 0;
    std::vector<SigmaRecord> sigma_history;
};

/// x = v = y, u = 0, k = 0.
JdacState initial_state(const Volume& y);

/// One iteration:
///   x  <- x(1 - lr) + v lr
///   v~ <- x + u
///   v' <- denoise(v~, sigma_e(v~))
///   x~ <- v' - u
///   x' <- correct(x~)
///   u' <- x' - v'
JdacState jdac_step(const JdacState& state, const Denoiser& d, const Corrector& a, const JdacConfig& cfg);

enum class StopReason { Threshold, MaxIters, PreCheck };
std::string_view to_string(StopReason r);

struct RestorationReport {
    Volume output;
    int iterations_run = 0;
    StopReason stop_reason = StopReason::MaxIters;
    std::vector<SigmaRecord> sigma_history;
    double wall_time_seconds = 0.0;
    bool pre_check = true;
};

/// Full restoration loop with early stopping on the raw gradient std of the
/// corrected estimate.
RestorationReport jdac_run(const Volume& y, const Denoiser& d, const Corrector& a, const JdacConfig& cfg = {});

} // namespace jdac
