#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "jdac/operators.hpp"

namespace jdac {

inline constexpr std::chrono::seconds kDefaultExternalTimeout{300};

struct ProcessResult {
    int exit_code = 0;
};

/// Runs `command` through /bin/sh in its own process group. The whole group
/// is killed and Timeout thrown if it outlives `timeout`.
ProcessResult run_process(const std::string& command, std::chrono::milliseconds timeout);

/// File-based plug-in for trained models living outside this process.
///
/// Each call writes the input to <tmp>/in.rvol and invokes
///     command <tmp>/in.rvol <tmp>/out.rvol [sigma_e]
/// then reads <tmp>/out.rvol back. Denoisers also get <tmp>/in.json holding
/// {"sigma_e": ...}, and their output is taken as the raw (noise / sigma^2)
/// prediction, the same convention as every other Denoiser.
class ExternalDenoiser final : public Denoiser {
public:
    explicit ExternalDenoiser(std::string command,
                              std::chrono::milliseconds timeout = kDefaultExternalTimeout);
    std::string name() const override { return "external:" + command_; }
    Volume raw_predict(const Volume& x, double sigma_e) const override;

private:
    std::string command_;
    std::chrono::milliseconds timeout_;
};

class ExternalCorrector final : public Corrector {
public:
    explicit ExternalCorrector(std::string command,
                               std::chrono::milliseconds timeout = kDefaultExternalTimeout);
    std::string name() const override { return "external:" + command_; }
    Volume correct(const Volume& x) const override;

private:
    std::string command_;
    std::chrono::milliseconds timeout_;
};

// ---------------------------------------------------------------------------
// Registry: "identity", "gauss[:width_scale]", "spike-notch[:z]",
// "external:<command>".

std::unique_ptr<Denoiser> make_denoiser(std::string_view spec,
                                        std::chrono::milliseconds timeout = kDefaultExternalTimeout);
std::unique_ptr<Corrector> make_corrector(std::string_view spec,
                                          std::chrono::milliseconds timeout = kDefaultExternalTimeout);

} // namespace jdac
