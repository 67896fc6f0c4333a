#include "jdac/external.hpp"

#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

#include "jdac/error.hpp"
#include "jdac/io.hpp"

namespace jdac {

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

// Scratch directory removed on scope exit.
class TempDir {
public:
    TempDir() {
        std::string pattern = (std::filesystem::temp_directory_path() / "jdac-op-XXXXXX").string();
        if (mkdtemp(pattern.data()) == nullptr) throw IoFailure("cannot create temporary directory");
        path_ = pattern;
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

Volume invoke(const std::string& command, const Volume& x, std::optional<double> sigma_e,
              std::chrono::milliseconds timeout) {
    TempDir dir;
    const auto in = dir.path() / "in.rvol";
    const auto out = dir.path() / "out.rvol";
    write_rvol(x, in);

    std::string cmd = command + " " + shell_quote(in.string()) + " " + shell_quote(out.string());
    if (sigma_e) {
        std::ofstream side(dir.path() / "in.json");
        side << nlohmann::json{{"sigma_e", *sigma_e}}.dump() << "\n";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", *sigma_e);
        cmd += " ";
        cmd += buf;
    }

    const ProcessResult r = run_process(cmd, timeout);
    if (r.exit_code != 0) throw ProcessFailed("external operator '" + command + "'", r.exit_code);
    if (!std::filesystem::exists(out)) {
        throw OperatorContractViolation("external operator '" + command + "' produced no output volume");
    }
    Volume result = read_rvol(out);
    if (result.dims() != x.dims()) {
        throw OperatorContractViolation("external operator '" + command + "' returned " + to_string(result.dims()) +
                                        " for input " + to_string(x.dims()));
    }
    return result;
}

} // namespace

ProcessResult run_process(const std::string& command, std::chrono::milliseconds timeout) {
    const pid_t pid = fork();
    if (pid < 0) throw IoFailure("fork failed");
    if (pid == 0) {
        setpgid(0, 0);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    setpgid(pid, pid);

    const auto deadline = std::chrono::steady_clock::now() + timeout;
    int status = 0;
    while (true) {
        const pid_t done = waitpid(pid, &status, WNOHANG);
        if (done == pid) break;
        if (done < 0) throw IoFailure("waitpid failed");
        if (std::chrono::steady_clock::now() >= deadline) {
            kill(-pid, SIGKILL);
            waitpid(pid, &status, 0);
            throw Timeout("'" + command + "' exceeded " + std::to_string(timeout.count()) + " ms");
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    if (WIFEXITED(status)) return {WEXITSTATUS(status)};
    if (WIFSIGNALED(status)) return {128 + WTERMSIG(status)};
    return {-1};
}

ExternalDenoiser::ExternalDenoiser(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
    if (command_.empty()) throw InvalidArgument("external operator needs a command");
}

Volume ExternalDenoiser::raw_predict(const Volume& x, double sigma_e) const {
    Volume r = invoke(command_, x, sigma_e, timeout_);
    r.set_residual(true);
    return r;
}

ExternalCorrector::ExternalCorrector(std::string command, std::chrono::milliseconds timeout)
    : command_(std::move(command)), timeout_(timeout) {
    if (command_.empty()) throw InvalidArgument("external operator needs a command");
}

Volume ExternalCorrector::correct(const Volume& x) const { return invoke(command_, x, std::nullopt, timeout_); }

// ---------------------------------------------------------------------------

namespace {

std::pair<std::string_view, std::string_view> split_name(std::string_view spec) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string_view::npos) return {spec, {}};
    return {spec.substr(0, colon), spec.substr(colon + 1)};
}

double parse_param(std::string_view text, double fallback, std::string_view spec) {
    if (text.empty()) return fallback;
    std::string s(text);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) throw UnknownOperator("bad parameter in '" + std::string(spec) + "'");
    return v;
}

} // namespace

std::unique_ptr<Denoiser> make_denoiser(std::string_view spec, std::chrono::milliseconds timeout) {
    const auto [name, arg] = split_name(spec);
    if (name == "identity" && arg.empty()) return identity_denoiser();
    if (name == "gauss") return gaussian_denoiser(parse_param(arg, GaussianDenoiser::kDefaultWidthScale, spec));
    if (name == "external" && !arg.empty()) return std::make_unique<ExternalDenoiser>(std::string(arg), timeout);
    throw UnknownOperator("no denoiser named '" + std::string(spec) + "'");
}

std::unique_ptr<Corrector> make_corrector(std::string_view spec, std::chrono::milliseconds timeout) {
    const auto [name, arg] = split_name(spec);
    if (name == "identity" && arg.empty()) return identity_corrector();
    if (name == "spike-notch") return spike_notch_corrector(parse_param(arg, 8.0, spec));
    if (name == "external" && !arg.empty()) return std::make_unique<ExternalCorrector>(std::string(arg), timeout);
    throw UnknownOperator("no corrector named '" + std::string(spec) + "'");
}

} // namespace jdac
