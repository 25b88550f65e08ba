#include "trisk/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <unordered_map>

#include "trisk/rng.hpp"
#include "trisk/spd.hpp"

namespace trisk {

namespace {

// Days since 1970-01-01 for a civil date (Gregorian, valid far beyond any
// market history).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

bool parse_int(std::string_view s, std::int64_t& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

}  // namespace

std::int32_t parse_date(std::string_view text) {
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    if (text.size() != 10 || text[4] != '-' || text[7] != '-' ||
        std::sscanf(std::string(text).c_str(), "%d-%u-%u", &y, &m, &d) != 3 || m < 1 || m > 12 ||
        d < 1 || d > 31)
        throw ParseError("bad date: " + std::string(text));
    return static_cast<std::int32_t>(days_from_civil(y, m, d));
}

std::int64_t parse_timestamp(std::string_view text) {
    std::int64_t epoch = 0;
    if (parse_int(text, epoch)) return epoch;

    // ISO forms: date alone, or date + 'T'/' ' + HH:MM:SS with optional 'Z'.
    if (text.size() >= 10) {
        const std::int64_t day = parse_date(text.substr(0, 10));
        std::int64_t secs = day * 86400;
        if (text.size() == 10) return secs;
        if ((text[10] == 'T' || text[10] == ' ') && text.size() >= 19) {
            unsigned hh = 0;
            unsigned mm = 0;
            unsigned ss = 0;
            const std::string hms(text.substr(11, 8));
            if (std::sscanf(hms.c_str(), "%u:%u:%u", &hh, &mm, &ss) == 3 && hh < 24 && mm < 60 &&
                ss < 60) {
                std::string_view rest = text.substr(19);
                if (rest.empty() || rest == "Z")
                    return secs + 3600 * hh + 60 * mm + ss;
            }
        }
    }
    throw ParseError("bad timestamp: " + std::string(text));
}

std::int32_t day_of_timestamp(std::int64_t epoch_seconds) {
    // Floor division keeps pre-1970 stamps on the right day.
    std::int64_t d = epoch_seconds / 86400;
    if (epoch_seconds % 86400 < 0) --d;
    return static_cast<std::int32_t>(d);
}

Frequency parse_frequency(std::string_view text) {
    if (text == "1m") return Frequency::m1;
    if (text == "5m") return Frequency::m5;
    if (text == "10m") return Frequency::m10;
    if (text == "30m") return Frequency::m30;
    if (text == "65m") return Frequency::m65;
    if (text == "130m") return Frequency::m130;
    if (text == "1d") return Frequency::d1;
    throw ParseError("unknown frequency: " + std::string(text));
}

std::string frequency_name(Frequency f) {
    switch (f) {
        case Frequency::m1: return "1m";
        case Frequency::m5: return "5m";
        case Frequency::m10: return "10m";
        case Frequency::m30: return "30m";
        case Frequency::m65: return "65m";
        case Frequency::m130: return "130m";
        case Frequency::d1: return "1d";
    }
    return "1d";
}

std::int64_t frequency_spacing_seconds(Frequency f) {
    switch (f) {
        case Frequency::m1: return 60;
        case Frequency::m5: return 300;
        case Frequency::m10: return 600;
        case Frequency::m30: return 1800;
        case Frequency::m65: return 3900;
        case Frequency::m130: return 7800;
        case Frequency::d1: return 86400;
    }
    return 86400;
}

double default_annualization(Frequency f) {
    switch (f) {
        case Frequency::m1: return 252.0 * 390.0;
        case Frequency::m5: return 252.0 * 78.0;
        case Frequency::m10: return 252.0 * 39.0;
        case Frequency::m30: return 252.0 * 13.0;
        case Frequency::m65: return 252.0 * 6.0;
        case Frequency::m130: return 252.0 * 3.0;
        case Frequency::d1: return 252.0;
    }
    return 252.0;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
}

struct RawBar {
    std::int64_t ts;
    double close;
    double volume;
    std::int32_t session;
    std::size_t input_order;
};

}  // namespace

std::vector<BarSeries> parse_bars(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("line 1: missing header");
    ++line_no;
    auto header = split_csv_line(line);
    bool has_session = false;
    if (header.size() == 5 && header[4] == "session_date") {
        has_session = true;
    } else if (header.size() != 4) {
        throw ParseError("line 1: expected header timestamp,symbol,close,volume");
    }
    if (header[0] != "timestamp" || header[1] != "symbol" || header[2] != "close" ||
        header[3] != "volume")
        throw ParseError("line 1: expected header timestamp,symbol,close,volume");

    std::vector<std::string> order;
    std::unordered_map<std::string, std::vector<RawBar>> by_symbol;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ParseError("line " + std::to_string(line_no) + ": wrong field count");

        RawBar bar{};
        try {
            bar.ts = parse_timestamp(fields[0]);
        } catch (const ParseError&) {
            throw ParseError("line " + std::to_string(line_no) + ": bad timestamp");
        }
        if (fields[1].empty())
            throw ParseError("line " + std::to_string(line_no) + ": empty symbol");
        if (!parse_double(fields[2], bar.close))
            throw ParseError("line " + std::to_string(line_no) + ": bad close");
        if (!(bar.close > 0.0))
            throw NonPositivePrice("line " + std::to_string(line_no) + ": close must be positive");
        if (!parse_double(fields[3], bar.volume) || bar.volume < 0.0)
            throw ParseError("line " + std::to_string(line_no) + ": bad volume");
        bar.session = has_session ? parse_date(fields[4]) : day_of_timestamp(bar.ts);

        auto it = by_symbol.find(fields[1]);
        if (it == by_symbol.end()) {
            order.push_back(fields[1]);
            it = by_symbol.emplace(fields[1], std::vector<RawBar>{}).first;
        }
        bar.input_order = it->second.size();
        it->second.push_back(bar);
    }

    std::vector<BarSeries> out;
    out.reserve(order.size());
    for (const auto& symbol : order) {
        auto& bars = by_symbol[symbol];
        std::stable_sort(bars.begin(), bars.end(), [](const RawBar& a, const RawBar& b) {
            return a.ts < b.ts;
        });
        BarSeries series;
        series.symbol = symbol;
        for (const auto& b : bars) {
            if (!series.timestamps.empty() && b.ts == series.timestamps.back())
                throw NonMonotoneTimestamps(symbol + ": duplicate timestamp " + std::to_string(b.ts));
            series.timestamps.push_back(b.ts);
            series.close.push_back(b.close);
            series.volume.push_back(b.volume);
            series.session_dates.push_back(b.session);
        }
        out.push_back(std::move(series));
    }
    return out;
}

Vector log_returns(const BarSeries& series) {
    if (series.size() < 2) throw InsufficientData("log_returns: need at least two bars");
    Vector r(series.size() - 1);
    for (std::size_t i = 0; i + 1 < series.size(); ++i)
        r[i] = std::log(series.close[i + 1]) - std::log(series.close[i]);
    return r;
}

namespace {

// Minimal bar spacing inside sessions; 0 when no session has two bars.
std::int64_t intra_session_spacing(const BarSeries& series) {
    std::int64_t best = 0;
    for (std::size_t i = 1; i < series.size(); ++i) {
        if (series.session_dates[i] != series.session_dates[i - 1]) continue;
        const std::int64_t gap = series.timestamps[i] - series.timestamps[i - 1];
        if (best == 0 || gap < best) best = gap;
    }
    return best;
}

}  // namespace

BarSeries resample_bars(const BarSeries& series, Frequency frequency) {
    if (series.size() < 2) throw InsufficientData("resample_bars: need at least two bars");
    if (frequency != Frequency::d1) {
        const std::int64_t base = intra_session_spacing(series);
        if (base == 0 || base > frequency_spacing_seconds(frequency))
            throw FrequencyTooFine("resample_bars: base bars are coarser than the target frequency");
    }

    BarSeries out;
    out.symbol = series.symbol;
    const std::int64_t width = frequency_spacing_seconds(frequency);
    std::size_t i = 0;
    while (i < series.size()) {
        // one session at a time, buckets anchored at the session's first bar
        const std::int32_t session = series.session_dates[i];
        const std::int64_t open = series.timestamps[i];
        std::size_t last_in_bucket = i;
        std::int64_t bucket = 0;
        std::size_t j = i;
        for (; j < series.size() && series.session_dates[j] == session; ++j) {
            const std::int64_t b =
                frequency == Frequency::d1 ? 0 : (series.timestamps[j] - open) / width;
            if (b != bucket) {
                out.timestamps.push_back(series.timestamps[last_in_bucket]);
                out.close.push_back(series.close[last_in_bucket]);
                out.volume.push_back(series.volume[last_in_bucket]);
                out.session_dates.push_back(session);
                bucket = b;
            }
            last_in_bucket = j;
        }
        out.timestamps.push_back(series.timestamps[last_in_bucket]);
        out.close.push_back(series.close[last_in_bucket]);
        out.volume.push_back(series.volume[last_in_bucket]);
        out.session_dates.push_back(session);
        i = j;
    }
    return out;
}

Vector resample_returns(const BarSeries& series, Frequency frequency, bool include_overnight) {
    const BarSeries sampled = resample_bars(series, frequency);
    Vector out;
    for (std::size_t i = 1; i < sampled.size(); ++i) {
        if (!include_overnight && sampled.session_dates[i] != sampled.session_dates[i - 1]) continue;
        out.push_back(std::log(sampled.close[i]) - std::log(sampled.close[i - 1]));
    }
    if (out.empty()) throw EmptyResult("resample_returns: no returns after filtering");
    return out;
}

ReturnPanel align_panel(const std::vector<BarSeries>& series, Frequency frequency,
                        bool include_overnight) {
    if (series.empty()) throw NoOverlap("align_panel: no input series");

    // shared timestamps across all symbols
    std::map<std::int64_t, std::size_t> counts;
    for (const auto& s : series)
        for (std::int64_t t : s.timestamps) ++counts[t];
    std::vector<std::int64_t> shared;
    for (const auto& [t, c] : counts)
        if (c == series.size()) shared.push_back(t);
    if (shared.size() < 2) throw NoOverlap("align_panel: fewer than two shared timestamps");

    // per-symbol closes and session labels on the shared grid
    std::vector<Vector> closes(series.size(), Vector(shared.size()));
    std::vector<std::int32_t> sessions(shared.size());
    for (std::size_t a = 0; a < series.size(); ++a) {
        std::unordered_map<std::int64_t, std::size_t> index;
        index.reserve(series[a].size());
        for (std::size_t i = 0; i < series[a].size(); ++i) index[series[a].timestamps[i]] = i;
        for (std::size_t g = 0; g < shared.size(); ++g) {
            const std::size_t i = index.at(shared[g]);
            closes[a][g] = series[a].close[i];
            if (a == 0) sessions[g] = series[a].session_dates[i];
        }
    }

    ReturnPanel panel;
    for (const auto& s : series) panel.symbols.push_back(s.symbol);
    panel.returns.resize(series.size());
    panel.frequency = frequency;
    panel.overnight_included = include_overnight;
    for (std::size_t g = 1; g < shared.size(); ++g) {
        if (!include_overnight && sessions[g] != sessions[g - 1]) continue;
        panel.timestamps.push_back(shared[g]);
        for (std::size_t a = 0; a < series.size(); ++a)
            panel.returns[a].push_back(std::log(closes[a][g]) - std::log(closes[a][g - 1]));
    }
    return panel;
}

std::pair<ReturnPanel, ReturnPanel> align_and_split(const std::vector<BarSeries>& series,
                                                    std::int64_t train_end, std::int64_t test_end,
                                                    Frequency frequency, bool include_overnight) {
    const ReturnPanel panel = align_panel(series, frequency, include_overnight);

    ReturnPanel train;
    ReturnPanel test;
    for (ReturnPanel* p : {&train, &test}) {
        p->symbols = panel.symbols;
        p->returns.resize(panel.assets());
        p->frequency = frequency;
        p->overnight_included = include_overnight;
    }
    for (std::size_t g = 0; g < panel.observations(); ++g) {
        const std::int64_t stamp = panel.timestamps[g];
        if (stamp >= test_end) break;
        ReturnPanel& dest = stamp < train_end ? train : test;
        dest.timestamps.push_back(stamp);
        for (std::size_t a = 0; a < panel.assets(); ++a)
            dest.returns[a].push_back(panel.returns[a][g]);
    }

    if (train.observations() == 0 || test.observations() == 0)
        throw EmptySplit("align_and_split: a split side is empty");
    return {std::move(train), std::move(test)};
}

Matrix synth_gaussian_samples(const GaussianDist& dist, std::size_t n, std::uint64_t seed) {
    if (n == 0) throw InsufficientData("synth_gaussian_samples: n must be positive");
    const std::size_t d = dist.dim();
    const SymMatrix root = spd_sqrt(dist.cov);

    Matrix out(n, d);
    PhiloxRng rng(seed);
    Vector z(d);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) z[j] = rng.next_normal();
        for (std::size_t r = 0; r < d; ++r) {
            double v = dist.mean[r];
            for (std::size_t c = 0; c < d; ++c) v += root(r, c) * z[c];
            out(i, r) = v;
        }
    }
    return out;
}

Matrix synth_gaussian_samples(const GaussianTask& task, std::size_t n, std::uint64_t seed) {
    Vector mean(task.dim_x + task.dim_y);
    for (std::size_t i = 0; i < task.dim_x; ++i) mean[i] = task.mu_x[i];
    for (std::size_t i = 0; i < task.dim_y; ++i) mean[task.dim_x + i] = task.mu_y[i];
    return synth_gaussian_samples(GaussianDist(mean, task.joint_covariance()), n, seed);
}

}  // namespace trisk
