#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fbreak {

enum class Errc {
    InvalidArgument,
    InsufficientSample,
    UnknownFamily,
    InvalidTheta,
    SingularDesign,
    DegenerateVariance,
    ZeroDenominator,
    NonpositiveVariance,
    ZeroWithinBlockVariance,
    InvalidBlockCount,
    DomainError,
    ZeroVariance,
    MalformedCsv,
    UnknownPreset,
    TooManyFailures,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);
    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace fbreak
