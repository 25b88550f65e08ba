// Error taxonomy for the transfer-risk toolkit. Every throwing operation
// documents which of these it raises; all derive from TriskError so callers
// can catch the whole family at pipeline boundaries.
#pragma once

#include <stdexcept>
#include <string>

namespace trisk {

struct TriskError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// -- linear algebra / SPD kernel ------------------------------------------
struct NotSPD : TriskError {
    using TriskError::TriskError;
};
struct DimensionMismatch : TriskError {
    using TriskError::TriskError;
};

// -- divergences -----------------------------------------------------------
struct NonPositiveVariance : TriskError {
    using TriskError::TriskError;
};
struct EmptySample : TriskError {
    using TriskError::TriskError;
};
struct InvalidProbabilityVector : TriskError {
    using TriskError::TriskError;
};
struct NegativeRisk : TriskError {
    using TriskError::TriskError;
};

// -- Gaussian transfer calculus ---------------------------------------------
struct ZeroPretrainedSignal : TriskError {
    using TriskError::TriskError;
};
struct DegenerateOutputCovariance : TriskError {
    using TriskError::TriskError;
};
struct StructureMismatch : TriskError {
    using TriskError::TriskError;
};

// -- signatures --------------------------------------------------------------
struct Overflow : TriskError {
    using TriskError::TriskError;
};
struct DegeneratePath : TriskError {
    using TriskError::TriskError;
};
struct SeriesMismatch : TriskError {
    using TriskError::TriskError;
};
struct InsufficientHistory : TriskError {
    using TriskError::TriskError;
};

// -- ridge regression ---------------------------------------------------------
struct EmptyDataset : TriskError {
    using TriskError::TriskError;
};
struct SingularSystem : TriskError {
    using TriskError::TriskError;
};
struct ConstantActuals : TriskError {
    using TriskError::TriskError;
};
struct ConstantSeries : TriskError {
    using TriskError::TriskError;
};

// -- portfolio ---------------------------------------------------------------
struct ZeroVariancePortfolio : TriskError {
    using TriskError::TriskError;
};
struct NonPositiveSourceSharpe : TriskError {
    using TriskError::TriskError;
};
struct DimensionTooLarge : TriskError {
    using TriskError::TriskError;
};
struct InsufficientData : TriskError {
    using TriskError::TriskError;
};

// -- market data ---------------------------------------------------------------
struct ParseError : TriskError {
    using TriskError::TriskError;
};
struct NonMonotoneTimestamps : TriskError {
    using TriskError::TriskError;
};
struct NonPositivePrice : TriskError {
    using TriskError::TriskError;
};
struct FrequencyTooFine : TriskError {
    using TriskError::TriskError;
};
struct EmptyResult : TriskError {
    using TriskError::TriskError;
};
struct NoOverlap : TriskError {
    using TriskError::TriskError;
};
struct EmptySplit : TriskError {
    using TriskError::TriskError;
};

// -- experiment harness --------------------------------------------------------
struct DataMissing : TriskError {
    using TriskError::TriskError;
};
struct TooFewRows : TriskError {
    using TriskError::TriskError;
};

// -- CLI -------------------------------------------------------------------------
struct UsageError : TriskError {
    using TriskError::TriskError;
};

}  // namespace trisk
