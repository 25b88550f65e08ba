// Truncated path-signature transform over piecewise-linear paths.
//
// A signature is stored level-major: levels[k] is a flat block of length d^k
// holding the degree-k iterated-integral coefficients in row-major multi-index
// order, i.e. the coefficient for (i_1, ..., i_k) sits at
// sum_j i_j * d^(k-j) with zero-based indices. Level 0 is the constant 1.
#pragma once

#include <cstddef>
#include <vector>

#include "trisk/linalg.hpp"

namespace trisk {

struct TruncatedSignature {
    std::size_t d = 0;            // path dimension
    std::size_t order = 0;        // truncation degree M
    std::vector<Vector> levels;   // levels[k].size() == d^k, k = 0..M
};

// A piecewise-linear path: values[i] is the point at times[i]. At least two
// points, strictly increasing times.
struct Path {
    Vector times;
    std::vector<Vector> values;

    Path(Vector times_, std::vector<Vector> values_);

    std::size_t dim() const { return values.empty() ? 0 : values.front().size(); }
    std::size_t points() const { return values.size(); }
};

struct FeatureRow {
    Vector x;     // signature coefficients, level 0 dropped
    double y;     // next-period log return
};

// Total coefficient count sum_{k=0..M} d^k. Throws Overflow when the count
// exceeds the size_t range.
std::size_t sig_length(std::size_t d, std::size_t order);

// Signature of one linear segment with increment delta: level k equals
// delta^{tensor k} / k!.
TruncatedSignature segment_signature(const Vector& delta, std::size_t order);

// Chen product: level k of the result is sum_{i+j=k} a_i (x) b_j, truncated
// at the common order. Throws DimensionMismatch.
TruncatedSignature chen_product(const TruncatedSignature& a, const TruncatedSignature& b);

// Fold of chen_product over the per-segment signatures, left to right.
TruncatedSignature path_signature(const Path& path, std::size_t order);

// Windowed feature construction for return prediction. For each t from L-1 to
// T-2 builds the L-point path (tau, log price, log volume) with the time
// coordinate rescaled to [0, 1] across the window, takes its order-M
// signature without the level-0 constant, and pairs it with the next log
// return. Yields exactly T - L rows. Requires L >= 2.
std::vector<FeatureRow> build_feature_dataset(const Vector& log_price, const Vector& log_volume,
                                              std::size_t lag, std::size_t order);

}  // namespace trisk
