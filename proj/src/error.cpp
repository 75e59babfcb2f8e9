#include "fbreak/error.hpp"

namespace fbreak {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InsufficientSample: return "InsufficientSample";
    case Errc::UnknownFamily: return "UnknownFamily";
    case Errc::InvalidTheta: return "InvalidTheta";
    case Errc::SingularDesign: return "SingularDesign";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::ZeroDenominator: return "ZeroDenominator";
    case Errc::NonpositiveVariance: return "NonpositiveVariance";
    case Errc::ZeroWithinBlockVariance: return "ZeroWithinBlockVariance";
    case Errc::InvalidBlockCount: return "InvalidBlockCount";
    case Errc::DomainError: return "DomainError";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::MalformedCsv: return "MalformedCsv";
    case Errc::UnknownPreset: return "UnknownPreset";
    case Errc::TooManyFailures: return "TooManyFailures";
    }
    return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

} // namespace fbreak
