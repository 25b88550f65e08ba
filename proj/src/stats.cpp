#include "trisk/stats.hpp"

#include <cmath>

#include "trisk/errors.hpp"

namespace trisk {

double pearson(const Vector& xs, const Vector& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw DimensionMismatch("pearson: need two equal-length series of at least two points");
    const double n = static_cast<double>(xs.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0;
    double syy = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx <= 0.0 || syy <= 0.0) throw ConstantSeries("pearson: constant series");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace trisk
