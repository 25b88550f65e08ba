#pragma once

#include "trisk/linalg.hpp"

namespace trisk {

// Sample Pearson correlation. Throws ConstantSeries when either side has no
// variance, DimensionMismatch on unequal or too-short inputs.
double pearson(const Vector& xs, const Vector& ys);

}  // namespace trisk
