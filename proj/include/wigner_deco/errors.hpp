#pragma once

#include <stdexcept>
#include <string>

namespace wigner_deco {

// Input rejected before any numerics ran. The CLI maps these to exit code 1.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical contract was violated by a computed result. CLI exit code 2.
class NumericalContractError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define WIGNER_DECO_ERROR(Name, Base)            \
    class Name : public Base {                   \
    public:                                      \
        explicit Name(const std::string& what)   \
            : Base(#Name ": " + what) {}         \
    };

WIGNER_DECO_ERROR(ParameterError, ValidationError)
WIGNER_DECO_ERROR(GridResolutionError, ValidationError)
WIGNER_DECO_ERROR(LeakageError, ValidationError)
WIGNER_DECO_ERROR(GridMismatchError, ValidationError)
WIGNER_DECO_ERROR(WeightError, ValidationError)
WIGNER_DECO_ERROR(PSDError, ValidationError)
WIGNER_DECO_ERROR(KernelTooWideError, ValidationError)
WIGNER_DECO_ERROR(SupportError, ValidationError)
WIGNER_DECO_ERROR(NegativeTimeError, ValidationError)
WIGNER_DECO_ERROR(StepSizeError, ValidationError)
WIGNER_DECO_ERROR(StabilityError, ValidationError)
WIGNER_DECO_ERROR(ConfigError, ValidationError)

WIGNER_DECO_ERROR(NormalizationError, NumericalContractError)
WIGNER_DECO_ERROR(RealityError, NumericalContractError)
WIGNER_DECO_ERROR(NeverPositiveError, NumericalContractError)
WIGNER_DECO_ERROR(BracketError, NumericalContractError)

#undef WIGNER_DECO_ERROR

} // namespace wigner_deco
