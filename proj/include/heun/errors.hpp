#pragma once

#include <stdexcept>
#include <string>

namespace heun {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define HEUN_DEFINE_ERROR(NAME)                          \
    struct NAME : Error {                                \
        explicit NAME(const std::string& m = #NAME)      \
            : Error(std::string(#NAME) + ": " + m) {}    \
    }

HEUN_DEFINE_ERROR(DivisionByZero);
HEUN_DEFINE_ERROR(ZeroFunction);
HEUN_DEFINE_ERROR(UndecidableLeadingCoefficient);
HEUN_DEFINE_ERROR(ZeroDenominatorAtLocalization);
HEUN_DEFINE_ERROR(SingularHomography);
HEUN_DEFINE_ERROR(DegreeBoundViolated);
HEUN_DEFINE_ERROR(RankBelowTwo);
HEUN_DEFINE_ERROR(IrrationalBranch);
HEUN_DEFINE_ERROR(IrrationalIndicialRoots);
HEUN_DEFINE_ERROR(NotFuchsian);
HEUN_DEFINE_ERROR(NonIntegerIndexDifference);
HEUN_DEFINE_ERROR(NotHeunClass);
HEUN_DEFINE_ERROR(RootNotAtOrigin);
HEUN_DEFINE_ERROR(LambdaAtSigmaRoot);
HEUN_DEFINE_ERROR(ObstructionFound);
HEUN_DEFINE_ERROR(NoSubcaseApplies);
HEUN_DEFINE_ERROR(UnknownType);
HEUN_DEFINE_ERROR(NotQuadraticInMu);
HEUN_DEFINE_ERROR(NotAutonomousShape);
HEUN_DEFINE_ERROR(UndeclaredParameter);
HEUN_DEFINE_ERROR(SigmaNotFactored);
HEUN_DEFINE_ERROR(PoleProximity);
HEUN_DEFINE_ERROR(StepUnderflow);
HEUN_DEFINE_ERROR(TooFewSamples);
HEUN_DEFINE_ERROR(InternalError);

struct SyntaxError : Error {
    int line, col;
    SyntaxError(const std::string& m, int line_, int col_)
        : Error("SyntaxError at " + std::to_string(line_) + ":" + std::to_string(col_) + ": " + m),
          line(line_),
          col(col_) {}
};

#undef HEUN_DEFINE_ERROR

}  // namespace heun
