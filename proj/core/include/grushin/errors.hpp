#pragma once

#include <stdexcept>
#include <string>

namespace grushin {

// Base of everything the library throws on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define GRUSHIN_ERROR(Name)                                    \
    class Name : public Error {                                \
    public:                                                    \
        explicit Name(const std::string& what) : Error(what) {} \
    }

GRUSHIN_ERROR(DomainError);
GRUSHIN_ERROR(NoSignChange);
GRUSHIN_ERROR(NoConvergence);
GRUSHIN_ERROR(DimensionMismatch);
GRUSHIN_ERROR(NonpositiveScale);
GRUSHIN_ERROR(OutOfRange);
GRUSHIN_ERROR(SingularPoint);
GRUSHIN_ERROR(BranchCutViolation);
GRUSHIN_ERROR(DegenerateEnvelope);
GRUSHIN_ERROR(EmptyBall);
GRUSHIN_ERROR(ZeroMass);
GRUSHIN_ERROR(ConfigError);
GRUSHIN_ERROR(ToleranceNotMet);

#undef GRUSHIN_ERROR

}  // namespace grushin
