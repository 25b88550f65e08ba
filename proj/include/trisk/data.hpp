// Market-data layer: bar CSV parsing, log returns, frequency resampling with
// overnight exclusion, panel alignment/splitting, and seeded synthetic
// Gaussian sample generation.
//
// Bar CSV schema (exact header): timestamp,symbol,close,volume
// with an optional trailing session_date column. Timestamps are ISO-8601 UTC
// ("2020-01-02", "2020-01-02T15:30:00Z", "2020-01-02 15:30:00") or integer
// epoch seconds. When session_date is absent, the UTC date part of the
// timestamp labels the session.
#pragma once

#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "trisk/gaussian.hpp"
#include "trisk/linalg.hpp"

namespace trisk {

struct BarSeries {
    std::string symbol;
    std::vector<std::int64_t> timestamps;     // epoch seconds, strictly increasing
    Vector close;                             // positive
    Vector volume;                            // nonnegative
    std::vector<std::int32_t> session_dates;  // per-bar trading-day label (days since epoch)

    std::size_t size() const { return timestamps.size(); }
};

enum class Frequency { m1, m5, m10, m30, m65, m130, d1 };

Frequency parse_frequency(std::string_view text);
std::string frequency_name(Frequency f);

// Bucket width in seconds; d1 spans the whole session.
std::int64_t frequency_spacing_seconds(Frequency f);

// 252 sessions per year; intraday frequencies scale by 390 trading minutes.
double default_annualization(Frequency f);

struct ReturnPanel {
    std::vector<std::string> symbols;
    std::vector<std::int64_t> timestamps;   // stamp of the later bar of each return
    std::vector<Vector> returns;            // [asset][time]
    Frequency frequency = Frequency::d1;
    bool overnight_included = true;

    std::size_t assets() const { return symbols.size(); }
    std::size_t observations() const { return timestamps.size(); }
};

// Parses bar rows into one sorted, validated series per symbol (symbols in
// first-appearance order). Throws ParseError (with line number),
// NonMonotoneTimestamps, NonPositivePrice.
std::vector<BarSeries> parse_bars(std::istream& in);

// r_t = ln c_{t+1} - ln c_t. Throws InsufficientData.
Vector log_returns(const BarSeries& series);

// Last bar of each frequency bucket, buckets anchored at session open.
BarSeries resample_bars(const BarSeries& series, Frequency frequency);

// Resampled log returns; when include_overnight is false, returns spanning a
// session boundary are dropped. Throws FrequencyTooFine, EmptyResult.
Vector resample_returns(const BarSeries& series, Frequency frequency, bool include_overnight);

// Inner-join on shared timestamps and compute per-symbol log returns on the
// joined grid, each stamped at its later bar. Throws NoOverlap.
ReturnPanel align_panel(const std::vector<BarSeries>& series, Frequency frequency,
                        bool include_overnight);

// align_panel followed by a half-open split at train_end (boundary rows land
// in test, rows at or past test_end are dropped). Throws NoOverlap,
// EmptySplit.
std::pair<ReturnPanel, ReturnPanel> align_and_split(const std::vector<BarSeries>& series,
                                                    std::int64_t train_end, std::int64_t test_end,
                                                    Frequency frequency, bool include_overnight);

// n i.i.d. draws (rows) from the law, using the repo's counter-based
// generator and the symmetric covariance square root. Bit-identical for a
// given (spec, n, seed).
Matrix synth_gaussian_samples(const GaussianDist& dist, std::size_t n, std::uint64_t seed);

// Joint draws from a task: columns are (X block, Y block).
Matrix synth_gaussian_samples(const GaussianTask& task, std::size_t n, std::uint64_t seed);

// Epoch seconds from ISO-8601 UTC or integer epoch text. Throws ParseError.
std::int64_t parse_timestamp(std::string_view text);

// Days since epoch for a YYYY-MM-DD date. Throws ParseError.
std::int32_t parse_date(std::string_view text);

std::int32_t day_of_timestamp(std::int64_t epoch_seconds);

}  // namespace trisk
