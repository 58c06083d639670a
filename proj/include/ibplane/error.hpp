#pragma once

#include <stdexcept>
#include <string>

namespace ibplane {

// Every failure raised by the library derives from Error. name() is the
// stable identifier the CLI prints on stderr.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& what)
        : std::runtime_error(what), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define IBPLANE_DEFINE_ERROR(Type, Name)                                      \
    class Type : public Error {                                               \
    public:                                                                   \
        explicit Type(const std::string& what) : Error(Name, what) {}         \
    };

IBPLANE_DEFINE_ERROR(DimensionError, "dimension-error")
IBPLANE_DEFINE_ERROR(InvalidDistributionError, "invalid-distribution")
IBPLANE_DEFINE_ERROR(EmptySampleError, "empty-sample")
IBPLANE_DEFINE_ERROR(DegenerateEncoderError, "degenerate-encoder")
IBPLANE_DEFINE_ERROR(InstanceTooLargeError, "instance-too-large")
IBPLANE_DEFINE_ERROR(DegenerateClusterError, "degenerate-cluster")
IBPLANE_DEFINE_ERROR(DivergenceError, "divergence")
IBPLANE_DEFINE_ERROR(UnsupportedDegenerateError, "unsupported-degenerate")
IBPLANE_DEFINE_ERROR(CoverageError, "coverage-error")
IBPLANE_DEFINE_ERROR(ArgumentError, "argument-error")
IBPLANE_DEFINE_ERROR(FormatError, "format-error")

#undef IBPLANE_DEFINE_ERROR

}  // namespace ibplane
