#pragma once

#include <stdexcept>
#include <string>

namespace lieatlas {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };
struct UnsupportedChart : Error { using Error::Error; };
struct BadElement : Error { using Error::Error; };
struct NotACovering : Error { using Error::Error; };
struct DegeneratePlane : Error { using Error::Error; };
struct SingularFrame : Error { using Error::Error; };
struct IntegrationEscape : Error { using Error::Error; };
struct NoPathFound : Error { using Error::Error; };
struct NotApplicable : Error { using Error::Error; };
struct Unclassifiable : Error { using Error::Error; };
struct DegenerateEndpoints : Error { using Error::Error; };
struct InsufficientSamples : Error { using Error::Error; };

}  // namespace lieatlas
