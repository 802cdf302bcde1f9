/**
 * @file errors.hpp
 * @brief Exception hierarchy shared by all modules.
 *
 * Validation errors mean the input is unusable as given. Numerical errors
 * mean a computation could not reach its tolerance. The CLI maps the two
 * families onto different exit codes.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace toeplitz_spectra {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

#define TOEPLITZ_SPECTRA_ERROR(Name, Base)                                   \
    class Name : public Base {                                               \
    public:                                                                  \
        explicit Name(const std::string& what) : Base(#Name ": " + what) {}  \
    }

// symbol
TOEPLITZ_SPECTRA_ERROR(RootLocationError, ValidationError);
TOEPLITZ_SPECTRA_ERROR(CommonRootError, ValidationError);
TOEPLITZ_SPECTRA_ERROR(DegenerateError, ValidationError);
TOEPLITZ_SPECTRA_ERROR(GcdError, ValidationError);
TOEPLITZ_SPECTRA_ERROR(InternalInconsistency, NumericalError);

// algebraic
TOEPLITZ_SPECTRA_ERROR(DegenerateResultant, NumericalError);
TOEPLITZ_SPECTRA_ERROR(SingularDerivative, NumericalError);
TOEPLITZ_SPECTRA_ERROR(SpecialLambdaError, NumericalError);
TOEPLITZ_SPECTRA_ERROR(ConvergenceError, NumericalError);

// curves
TOEPLITZ_SPECTRA_ERROR(ResolutionError, NumericalError);

// measure
TOEPLITZ_SPECTRA_ERROR(ExceptionalProximity, NumericalError);
TOEPLITZ_SPECTRA_ERROR(NonPositiveDensity, NumericalError);
TOEPLITZ_SPECTRA_ERROR(CurveProximity, NumericalError);
TOEPLITZ_SPECTRA_ERROR(CalibrationError, NumericalError);

// matrices
TOEPLITZ_SPECTRA_ERROR(IllConditionedInterpolation, NumericalError);
TOEPLITZ_SPECTRA_ERROR(MultipleRootError, NumericalError);
TOEPLITZ_SPECTRA_ERROR(NonTriangularFactor, NumericalError);

// equilibrium
TOEPLITZ_SPECTRA_ERROR(AdmissibilityError, ValidationError);
TOEPLITZ_SPECTRA_ERROR(SampleOnSingularity, NumericalError);

#undef TOEPLITZ_SPECTRA_ERROR

}  // namespace toeplitz_spectra
