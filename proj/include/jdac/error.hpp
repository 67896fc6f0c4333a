#pragma once

#include <stdexcept>
#include <string>

namespace jdac {

// Base of every error the toolkit throws. Each named failure mode gets its
// own subclass so callers (and tests) can catch exactly what they expect.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define JDAC_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                              \
    public:                                                                  \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
    }

JDAC_DEFINE_ERROR(DimensionTooSmall);
JDAC_DEFINE_ERROR(DimensionMismatch);
JDAC_DEFINE_ERROR(InvalidArgument);
JDAC_DEFINE_ERROR(UnknownPhantomKind);
JDAC_DEFINE_ERROR(NonNegligibleImaginaryPart);
JDAC_DEFINE_ERROR(SpecParseError);
JDAC_DEFINE_ERROR(EmptyCorpus);
JDAC_DEFINE_ERROR(OperatorContractViolation);
JDAC_DEFINE_ERROR(UnknownOperator);
JDAC_DEFINE_ERROR(BadMagic);
JDAC_DEFINE_ERROR(VersionUnsupported);
JDAC_DEFINE_ERROR(TruncatedPayload);
JDAC_DEFINE_ERROR(IoFailure);
JDAC_DEFINE_ERROR(UnsupportedDatatype);
JDAC_DEFINE_ERROR(NotThreeDimensional);
JDAC_DEFINE_ERROR(MalformedHeader);
JDAC_DEFINE_ERROR(Timeout);
JDAC_DEFINE_ERROR(ManifestError);

#undef JDAC_DEFINE_ERROR

class ProcessFailed : public Error {
public:
    ProcessFailed(const std::string& what, int exit_code)
        : Error("ProcessFailed: " + what + " (exit code " + std::to_string(exit_code) + ")"),
          exit_code_(exit_code) {}
    int exit_code() const noexcept { return exit_code_; }

private:
    int exit_code_;
};

} // namespace jdac
