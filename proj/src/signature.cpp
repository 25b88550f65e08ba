#include "trisk/signature.hpp"

#include <limits>

namespace trisk {

Path::Path(Vector times_, std::vector<Vector> values_)
    : times(std::move(times_)), values(std::move(values_)) {
    if (values.size() < 2) throw DegeneratePath("Path: fewer than two points");
    if (times.size() != values.size())
        throw DimensionMismatch("Path: times and values lengths differ");
    const std::size_t d = values.front().size();
    if (d == 0) throw DimensionMismatch("Path: zero-dimensional points");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i].size() != d) throw DimensionMismatch("Path: inconsistent point dimensions");
        if (i > 0 && !(times[i] > times[i - 1]))
            throw DegeneratePath("Path: times must be strictly increasing");
    }
}

std::size_t sig_length(std::size_t d, std::size_t order) {
    if (d == 0 || order == 0) throw DimensionMismatch("sig_length: d and order must be positive");
    constexpr std::size_t cap = std::numeric_limits<std::size_t>::max();
    std::size_t total = 1;   // level 0
    std::size_t level = 1;
    for (std::size_t k = 1; k <= order; ++k) {
        if (level > cap / d) throw Overflow("sig_length: coefficient count overflows");
        level *= d;
        if (total > cap - level) throw Overflow("sig_length: coefficient count overflows");
        total += level;
    }
    return total;
}

namespace {

TruncatedSignature zero_signature(std::size_t d, std::size_t order) {
    TruncatedSignature sig;
    sig.d = d;
    sig.order = order;
    sig.levels.resize(order + 1);
    std::size_t len = 1;
    for (std::size_t k = 0; k <= order; ++k) {
        sig.levels[k].assign(len, 0.0);
        if (k < order) len *= d;
    }
    sig.levels[0][0] = 1.0;
    return sig;
}

}  // namespace

TruncatedSignature segment_signature(const Vector& delta, std::size_t order) {
    const std::size_t d = delta.size();
    (void)sig_length(d, order);   // validates arguments and guards overflow
    TruncatedSignature sig = zero_signature(d, order);
    // level k = (level k-1 tensor delta) / k
    for (std::size_t k = 1; k <= order; ++k) {
        const Vector& prev = sig.levels[k - 1];
        Vector& cur = sig.levels[k];
        for (std::size_t i = 0; i < prev.size(); ++i)
            for (std::size_t j = 0; j < d; ++j)
                cur[i * d + j] = prev[i] * delta[j] / static_cast<double>(k);
    }
    return sig;
}

TruncatedSignature chen_product(const TruncatedSignature& a, const TruncatedSignature& b) {
    if (a.d != b.d || a.order != b.order)
        throw DimensionMismatch("chen_product: signatures have different shape");
    const std::size_t d = a.d;
    TruncatedSignature out = zero_signature(d, a.order);
    for (std::size_t k = 0; k <= a.order; ++k) {
        Vector& lvl = out.levels[k];
        for (std::size_t i = 0; i <= k; ++i) {
            const Vector& ai = a.levels[i];
            const Vector& bj = b.levels[k - i];
            // tensor concatenation: left index is the high-order digit block
            for (std::size_t p = 0; p < ai.size(); ++p) {
                if (ai[p] == 0.0) continue;
                const std::size_t base = p * bj.size();
                for (std::size_t q = 0; q < bj.size(); ++q) lvl[base + q] += ai[p] * bj[q];
            }
        }
    }
    out.levels[0][0] = 1.0;
    return out;
}

TruncatedSignature path_signature(const Path& path, std::size_t order) {
    TruncatedSignature acc = segment_signature(vec_sub(path.values[1], path.values[0]), order);
    for (std::size_t s = 2; s < path.points(); ++s) {
        const TruncatedSignature seg =
            segment_signature(vec_sub(path.values[s], path.values[s - 1]), order);
        acc = chen_product(acc, seg);
    }
    return acc;
}

std::vector<FeatureRow> build_feature_dataset(const Vector& log_price, const Vector& log_volume,
                                              std::size_t lag, std::size_t order) {
    if (log_price.size() != log_volume.size())
        throw SeriesMismatch("build_feature_dataset: price/volume lengths differ");
    if (lag < 2) throw DegeneratePath("build_feature_dataset: lag must be at least 2");
    const std::size_t n = log_price.size();
    if (n < lag + 1) throw InsufficientHistory("build_feature_dataset: series shorter than lag + 1");

    std::vector<FeatureRow> rows;
    rows.reserve(n - lag);
    const double span = static_cast<double>(lag - 1);
    for (std::size_t t = lag - 1; t + 1 < n; ++t) {
        const std::size_t start = t + 1 - lag;
        Vector times(lag);
        std::vector<Vector> points(lag);
        for (std::size_t i = 0; i < lag; ++i) {
            times[i] = static_cast<double>(i);
            points[i] = {static_cast<double>(i) / span, log_price[start + i], log_volume[start + i]};
        }
        const TruncatedSignature sig = path_signature(Path(std::move(times), std::move(points)), order);

        FeatureRow row;
        row.x.reserve(sig_length(3, order) - 1);
        for (std::size_t k = 1; k <= order; ++k)
            row.x.insert(row.x.end(), sig.levels[k].begin(), sig.levels[k].end());
        row.y = log_price[t + 1] - log_price[t];
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace trisk
