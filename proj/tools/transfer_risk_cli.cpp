// transfer-risk command line tool.
//
// Subcommands: gaussian-risk, signature, predict, portfolio, experiment.
// Exit status: 0 success, 2 usage error, 1 runtime error (one-line diagnostic
// on stderr). All numeric output carries 12 significant digits.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "trisk/data.hpp"
#include "trisk/errors.hpp"
#include "trisk/experiments.hpp"
#include "trisk/format.hpp"
#include "trisk/portfolio.hpp"
#include "trisk/ridge.hpp"
#include "trisk/signature.hpp"
#include "trisk/task_io.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw trisk::ParseError("cannot write " + path);
    out << text;
}

// ---------------------------------------------------------------------------

struct GaussianRiskArgs {
    std::string spec_path;
    std::string out_path;
};

void run_gaussian_risk(const GaussianRiskArgs& args) {
    const trisk::TaskSpec spec = trisk::load_task_spec(args.spec_path);
    const json report = trisk::gaussian_risk_report(spec);
    write_text(args.out_path, report.dump(2) + "\n");
}

// ---------------------------------------------------------------------------

struct SignatureArgs {
    std::string input_path;
    std::size_t order = 2;
    std::string out_path;
};

void run_signature(const SignatureArgs& args) {
    std::ifstream in(args.input_path);
    if (!in) throw trisk::ParseError("cannot open " + args.input_path);

    std::string line;
    if (!std::getline(in, line)) throw trisk::ParseError("empty input CSV");
    std::vector<double> times;
    std::vector<trisk::Vector> points;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<double> fields;
        std::string cell;
        std::stringstream ss(line);
        while (std::getline(ss, cell, ',')) {
            try {
                fields.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw trisk::ParseError("line " + std::to_string(line_no) + ": bad number");
            }
        }
        if (fields.size() < 2)
            throw trisk::ParseError("line " + std::to_string(line_no) +
                                    ": need a time column plus at least one value column");
        times.push_back(fields.front());
        points.emplace_back(fields.begin() + 1, fields.end());
    }

    const trisk::Path path(std::move(times), std::move(points));
    const trisk::TruncatedSignature sig = trisk::path_signature(path, args.order);

    // one CSV row, multi-index headers S_i1_i2..., level 0 dropped
    std::string header;
    std::string values;
    for (std::size_t k = 1; k <= sig.order; ++k) {
        std::vector<std::size_t> index(k, 0);
        for (std::size_t flat = 0; flat < sig.levels[k].size(); ++flat) {
            std::size_t rem = flat;
            for (std::size_t j = k; j-- > 0;) {
                index[j] = rem % sig.d;
                rem /= sig.d;
            }
            std::string name = "S";
            for (std::size_t j = 0; j < k; ++j) name += "_" + std::to_string(index[j] + 1);
            if (!header.empty()) {
                header += ",";
                values += ",";
            }
            header += name;
            values += trisk::format_number(sig.levels[k][flat]);
        }
    }
    write_text(args.out_path, header + "\n" + values + "\n");
}

// ---------------------------------------------------------------------------

std::vector<trisk::BarSeries> load_bar_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw trisk::ParseError("cannot open " + path);
    return trisk::parse_bars(in);
}

struct PredictArgs {
    std::vector<std::string> source_paths;
    std::string target_path;
    std::string target_symbol;
    std::size_t lag = 5;
    std::size_t order = 2;
    double lambda_source = 1.0;
    double lambda_target = 5.0;
    std::string train_end;
    std::string test_end;
    std::string out_dir = ".";
};

void run_predict(const PredictArgs& args) {
    const std::int64_t train_end =
        static_cast<std::int64_t>(trisk::parse_date(args.train_end)) * 86400;
    const std::int64_t test_end =
        args.test_end.empty() ? std::numeric_limits<std::int64_t>::max()
                              : static_cast<std::int64_t>(trisk::parse_date(args.test_end)) * 86400;

    trisk::PredictionParams params;
    params.lag = args.lag;
    params.order = args.order;
    params.lambda_source = args.lambda_source;
    params.lambda_target = args.lambda_target;

    std::vector<trisk::PredictionSplit> source_splits;
    for (const auto& path : args.source_paths)
        for (const auto& series : load_bar_file(path))
            source_splits.push_back(
                trisk::build_prediction_split(series, params, train_end, test_end));

    const auto target_series = load_bar_file(args.target_path);
    const trisk::BarSeries* target = nullptr;
    for (const auto& s : target_series) {
        if (args.target_symbol.empty() || s.symbol == args.target_symbol) {
            target = &s;
            break;
        }
    }
    if (!target) throw trisk::DataMissing("target symbol not found in " + args.target_path);
    const trisk::PredictionSplit target_split =
        trisk::build_prediction_split(*target, params, train_end, test_end);

    // pooled source pretraining
    std::size_t pooled_rows = 0;
    const std::size_t width = target_split.train_x.cols();
    for (const auto& s : source_splits) pooled_rows += s.train_x.rows();
    trisk::Matrix pooled_x(pooled_rows, width);
    trisk::Vector pooled_y;
    pooled_y.reserve(pooled_rows);
    std::size_t at = 0;
    for (const auto& s : source_splits) {
        for (std::size_t i = 0; i < s.train_x.rows(); ++i, ++at)
            for (std::size_t j = 0; j < width; ++j) pooled_x(at, j) = s.train_x(i, j);
        pooled_y.insert(pooled_y.end(), s.train_y.begin(), s.train_y.end());
    }

    auto [source_std, source_stats] = trisk::standardize(pooled_x, pooled_y);
    const trisk::RidgeModel pretrained =
        trisk::fit_ridge(source_std.x, source_std.y, params.lambda_source);

    auto [target_std, target_stats] = trisk::standardize(target_split.train_x, target_split.train_y);
    if (target_stats.kept != source_stats.kept)
        throw trisk::SeriesMismatch("kept-feature sets differ between source and target data");

    const trisk::RidgeModel direct =
        trisk::fit_ridge(target_std.x, target_std.y, params.lambda_target);
    const trisk::RidgeModel transferred = trisk::fit_transfer_ridge(
        target_std.x, target_std.y, params.lambda_target, pretrained.theta);

    const trisk::StandardizedData test =
        trisk::standardize_with(target_split.test_x, target_split.test_y, target_stats);
    const trisk::Vector pred_direct = trisk::predict(test.x, direct.theta);
    const trisk::Vector pred_transfer = trisk::predict(test.x, transferred.theta);

    const trisk::MetricsReport m_direct = trisk::evaluate(pred_direct, test.y);
    const trisk::MetricsReport m_transfer = trisk::evaluate(pred_transfer, test.y);
    const double risk = trisk::prediction_transfer_risk(pretrained.theta, test.x, test.y);

    fs::create_directories(args.out_dir);
    json metrics;
    metrics["target"] = target->symbol;
    metrics["lag"] = args.lag;
    metrics["order"] = args.order;
    metrics["lambda_source"] = args.lambda_source;
    metrics["lambda_target"] = args.lambda_target;
    metrics["transfer_risk"] = trisk::round_number(risk);
    metrics["direct"] = {{"mse", trisk::round_number(m_direct.mse)},
                         {"r2", trisk::round_number(m_direct.r2)},
                         {"corr", trisk::round_number(m_direct.corr)}};
    metrics["transfer"] = {{"mse", trisk::round_number(m_transfer.mse)},
                           {"r2", trisk::round_number(m_transfer.r2)},
                           {"corr", trisk::round_number(m_transfer.corr)}};
    write_text((fs::path(args.out_dir) / "metrics.json").string(), metrics.dump(2) + "\n");

    std::string csv = "timestamp,actual,direct,transfer\n";
    for (std::size_t i = 0; i < test.y.size(); ++i) {
        csv += std::to_string(target_split.test_timestamps[i]) + "," +
               trisk::format_number(test.y[i]) + "," + trisk::format_number(pred_direct[i]) + "," +
               trisk::format_number(pred_transfer[i]) + "\n";
    }
    write_text((fs::path(args.out_dir) / "predictions.csv").string(), csv);
}

// ---------------------------------------------------------------------------

struct PortfolioArgs {
    std::string source_path;
    std::string target_path;
    std::string freq = "1d";
    double lambda = 0.2;
    double annualize = 0.0;   // 0 = frequency default
    bool no_overnight = false;
    std::string train_end;
    std::string test_end;
    std::string out_dir = ".";
};

void run_portfolio(const PortfolioArgs& args) {
    const trisk::Frequency freq = trisk::parse_frequency(args.freq);
    const bool include_overnight = !args.no_overnight;
    const double factor =
        args.annualize > 0.0 ? args.annualize : trisk::default_annualization(freq);

    auto resample_all = [&](const std::string& path) {
        std::vector<trisk::BarSeries> out;
        for (const auto& series : load_bar_file(path))
            out.push_back(trisk::resample_bars(series, freq));
        return out;
    };
    const auto source_series = resample_all(args.source_path);
    const auto target_series = resample_all(args.target_path);

    const std::int64_t test_end =
        args.test_end.empty() ? std::numeric_limits<std::int64_t>::max()
                              : static_cast<std::int64_t>(trisk::parse_date(args.test_end)) * 86400;
    std::int64_t train_end;
    if (!args.train_end.empty()) {
        train_end = static_cast<std::int64_t>(trisk::parse_date(args.train_end)) * 86400;
    } else {
        // default holdout: last quarter of the target timeline
        const trisk::ReturnPanel whole =
            trisk::align_panel(target_series, freq, include_overnight);
        const std::size_t cut = whole.observations() - whole.observations() / 4;
        train_end = whole.timestamps[std::min(cut, whole.observations() - 1)];
    }

    const trisk::ReturnPanel source_panel =
        trisk::align_panel(source_series, freq, include_overnight);
    const auto [target_train, target_test] =
        trisk::align_and_split(target_series, train_end, test_end, freq, include_overnight);

    const trisk::Moments m_source = trisk::estimate_moments(source_panel, factor);
    const trisk::Moments m_train = trisk::estimate_moments(target_train, factor);
    const trisk::Moments m_test = trisk::estimate_moments(target_test, factor);

    const trisk::Portfolio phi_source = trisk::max_sharpe(m_source);
    const trisk::Portfolio phi_direct = trisk::max_sharpe(m_train);
    const trisk::Portfolio phi_transfer =
        trisk::transfer_portfolio(m_train, phi_source, args.lambda);
    const trisk::PortfolioRisk risk =
        trisk::portfolio_transfer_risk(m_source, phi_source, m_test);

    auto weights_json = [](const trisk::Portfolio& p, const std::vector<std::string>& symbols) {
        json out = json::object();
        for (std::size_t i = 0; i < symbols.size(); ++i)
            out[symbols[i]] = trisk::round_number(p.weights[i]);
        return out;
    };

    json report;
    report["frequency"] = trisk::frequency_name(freq);
    report["annualization_factor"] = trisk::round_number(factor);
    report["lambda"] = trisk::round_number(args.lambda);
    report["overnight_included"] = include_overnight;
    report["source_weights"] = weights_json(phi_source, source_panel.symbols);
    report["direct_weights"] = weights_json(phi_direct, target_train.symbols);
    report["transfer_weights"] = weights_json(phi_transfer, target_train.symbols);
    report["sharpe"] = {
        {"source_on_source", trisk::round_number(trisk::sharpe(phi_source, m_source))},
        {"direct_on_holdout", trisk::round_number(trisk::sharpe(phi_direct, m_test))},
        {"transfer_on_holdout", trisk::round_number(trisk::sharpe(phi_transfer, m_test))}};
    report["transfer_risk"] = {{"r1", trisk::round_number(risk.r1)},
                               {"r2", trisk::round_number(risk.r2)},
                               {"total", trisk::round_number(risk.total)}};

    fs::create_directories(args.out_dir);
    write_text((fs::path(args.out_dir) / "report.json").string(), report.dump(2) + "\n");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"transfer-risk: transfer-risk analysis for prediction and portfolio tasks"};
    app.require_subcommand(1);

    GaussianRiskArgs gauss;
    auto* cmd_gauss = app.add_subcommand(
        "gaussian-risk", "Closed-form transfer risk and regret for a Gaussian task pair");
    cmd_gauss->add_option("--spec", gauss.spec_path, "task specification JSON")->required();
    cmd_gauss->add_option("--out", gauss.out_path, "output JSON path (default: stdout)")
        ->capture_default_str();

    SignatureArgs sig;
    auto* cmd_sig =
        app.add_subcommand("signature", "Truncated signature of a CSV path (time, value...)");
    cmd_sig->add_option("--input", sig.input_path, "input CSV")->required();
    cmd_sig->add_option("--order", sig.order, "truncation order M")->capture_default_str();
    cmd_sig->add_option("--out", sig.out_path, "output CSV path (default: stdout)")
        ->capture_default_str();

    PredictArgs pred;
    auto* cmd_pred = app.add_subcommand(
        "predict", "Signature-feature return prediction via transfer ridge regression");
    cmd_pred->add_option("--source", pred.source_paths, "source bar CSV (repeatable)")->required();
    cmd_pred->add_option("--target", pred.target_path, "target bar CSV")->required();
    cmd_pred->add_option("--symbol", pred.target_symbol, "target symbol inside the target CSV")
        ->capture_default_str();
    cmd_pred->add_option("--lag", pred.lag, "window length L")->capture_default_str();
    cmd_pred->add_option("--order", pred.order, "signature order M")->capture_default_str();
    cmd_pred->add_option("--lambda-s", pred.lambda_source, "source ridge penalty")
        ->capture_default_str();
    cmd_pred->add_option("--lambda-t", pred.lambda_target, "target anchored ridge penalty")
        ->capture_default_str();
    cmd_pred->add_option("--train-end", pred.train_end, "train/test boundary date (YYYY-MM-DD)")
        ->required();
    cmd_pred->add_option("--test-end", pred.test_end, "end of test window (default: end of data)")
        ->capture_default_str();
    cmd_pred->add_option("--out", pred.out_dir, "output directory")->capture_default_str();

    PortfolioArgs port;
    auto* cmd_port = app.add_subcommand(
        "portfolio", "Max-Sharpe portfolio transfer with the portfolio transfer risk");
    cmd_port->add_option("--source", port.source_path, "source bar CSV")->required();
    cmd_port->add_option("--target", port.target_path, "target bar CSV")->required();
    cmd_port->add_option("--freq", port.freq, "frequency: 1m 5m 10m 30m 65m 130m 1d")
        ->capture_default_str();
    cmd_port->add_option("--lambda", port.lambda, "anchor penalty")->capture_default_str();
    cmd_port->add_option("--annualize", port.annualize, "annualization factor (0 = by frequency)")
        ->capture_default_str();
    cmd_port->add_flag("--no-overnight", port.no_overnight, "drop returns spanning sessions");
    cmd_port->add_option("--train-end", port.train_end,
                         "fine-tune/holdout boundary date (default: last quarter held out)")
        ->capture_default_str();
    cmd_port->add_option("--test-end", port.test_end, "end of holdout (default: end of data)")
        ->capture_default_str();
    cmd_port->add_option("--out", port.out_dir, "output directory")->capture_default_str();

    std::string config_path;
    std::string data_root;
    auto* cmd_exp = app.add_subcommand("experiment", "Seeded multi-trial experiment harness");
    cmd_exp->add_option("--config", config_path, "experiment config JSON")->required();
    cmd_exp->add_option("--data", data_root, "data directory override")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*cmd_gauss) {
            run_gaussian_risk(gauss);
        } else if (*cmd_sig) {
            run_signature(sig);
        } else if (*cmd_pred) {
            run_predict(pred);
        } else if (*cmd_port) {
            run_portfolio(port);
        } else if (*cmd_exp) {
            const trisk::ExperimentConfig config = trisk::load_experiment_config(config_path);
            return trisk::run_experiment(config, data_root);
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 1;
    }
}
