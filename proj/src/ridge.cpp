#include "trisk/ridge.hpp"

#include <cmath>

#include "trisk/divergence.hpp"
#include "trisk/spd.hpp"
#include "trisk/stats.hpp"

namespace trisk {

namespace {

constexpr double kStdFloor = 1e-12;

void column_stats(const Matrix& rows, Vector& mean, Vector& sd) {
    const std::size_t n = rows.rows();
    const std::size_t p = rows.cols();
    mean.assign(p, 0.0);
    sd.assign(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) mean[j] += rows(i, j);
    for (std::size_t j = 0; j < p; ++j) mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            const double d = rows(i, j) - mean[j];
            sd[j] += d * d;
        }
    for (std::size_t j = 0; j < p; ++j) sd[j] = std::sqrt(sd[j] / static_cast<double>(n));
}

}  // namespace

std::pair<StandardizedData, StandardizeStats> standardize(const Matrix& rows,
                                                          const Vector& targets) {
    if (rows.rows() == 0 || rows.rows() != targets.size())
        throw EmptyDataset("standardize: empty data or row/target count mismatch");

    StandardizeStats stats;
    column_stats(rows, stats.feature_mean, stats.feature_std);
    for (std::size_t j = 0; j < rows.cols(); ++j)
        if (stats.feature_std[j] > kStdFloor) stats.kept.push_back(j);

    double ty_mean = 0.0;
    for (double y : targets) ty_mean += y;
    ty_mean /= static_cast<double>(targets.size());
    double ty_var = 0.0;
    for (double y : targets) ty_var += (y - ty_mean) * (y - ty_mean);
    stats.target_mean = ty_mean;
    stats.target_std = std::sqrt(ty_var / static_cast<double>(targets.size()));
    if (stats.target_std <= kStdFloor) stats.target_std = 1.0;   // constant target stays centered

    return {standardize_with(rows, targets, stats), std::move(stats)};
}

StandardizedData standardize_with(const Matrix& rows, const Vector& targets,
                                  const StandardizeStats& stats) {
    if (rows.rows() == 0 || rows.rows() != targets.size())
        throw EmptyDataset("standardize_with: empty data or row/target count mismatch");
    if (rows.cols() != stats.feature_mean.size())
        throw DimensionMismatch("standardize_with: column count differs from the stored stats");

    StandardizedData out;
    out.x = Matrix(rows.rows(), stats.kept.size());
    for (std::size_t i = 0; i < rows.rows(); ++i)
        for (std::size_t c = 0; c < stats.kept.size(); ++c) {
            const std::size_t j = stats.kept[c];
            out.x(i, c) = (rows(i, j) - stats.feature_mean[j]) / stats.feature_std[j];
        }
    out.y.resize(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i)
        out.y[i] = (targets[i] - stats.target_mean) / stats.target_std;
    return out;
}

namespace {

RidgeModel solve_normal_equations(const Matrix& x, const Vector& y, double lambda,
                                  const Vector* theta_source) {
    if (x.rows() == 0 || x.rows() != y.size())
        throw EmptyDataset("fit_ridge: empty design or row/target count mismatch");
    if (lambda < 0.0) throw SingularSystem("fit_ridge: lambda must be nonnegative");
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (theta_source && theta_source->size() != p)
        throw DimensionMismatch("fit_transfer_ridge: theta_source width differs from the design");

    SymMatrix gram(p);
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += x(i, a) * x(i, b);
            gram.set(a, b, s / static_cast<double>(n) + (a == b ? lambda : 0.0));
        }

    Vector rhs(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) rhs[j] += x(i, j) * y[i];
    for (std::size_t j = 0; j < p; ++j) {
        rhs[j] /= static_cast<double>(n);
        if (theta_source) rhs[j] += lambda * (*theta_source)[j];
    }

    RidgeModel model;
    model.lambda = lambda;
    try {
        model.theta = spd_solve(gram, rhs);
    } catch (const NotSPD&) {
        throw SingularSystem("fit_ridge: design is rank deficient and lambda does not regularize it");
    }
    model.kept_features.resize(p);
    for (std::size_t j = 0; j < p; ++j) model.kept_features[j] = j;
    return model;
}

}  // namespace

RidgeModel fit_ridge(const Matrix& x, const Vector& y, double lambda) {
    return solve_normal_equations(x, y, lambda, nullptr);
}

RidgeModel fit_transfer_ridge(const Matrix& x, const Vector& y, double lambda,
                              const Vector& theta_source) {
    return solve_normal_equations(x, y, lambda, &theta_source);
}

Vector predict(const Matrix& x, const Vector& theta) { return matvec(x, theta); }

double mse_of(const Vector& predictions, const Vector& actuals) {
    if (predictions.empty() || predictions.size() != actuals.size())
        throw EmptyDataset("mse_of: empty or mismatched series");
    double s = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const double d = predictions[i] - actuals[i];
        s += d * d;
    }
    return s / static_cast<double>(predictions.size());
}

double r2_of(const Vector& predictions, const Vector& actuals) {
    if (predictions.empty() || predictions.size() != actuals.size())
        throw EmptyDataset("r2_of: empty or mismatched series");
    double mean = 0.0;
    for (double a : actuals) mean += a;
    mean /= static_cast<double>(actuals.size());
    double sse = 0.0;
    double sst = 0.0;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        sse += (actuals[i] - predictions[i]) * (actuals[i] - predictions[i]);
        sst += (actuals[i] - mean) * (actuals[i] - mean);
    }
    if (sst <= 0.0) throw ConstantActuals("r2_of: actuals are constant, R^2 undefined");
    return 1.0 - sse / sst;
}

MetricsReport evaluate(const Vector& predictions, const Vector& actuals) {
    MetricsReport rep;
    rep.mse = mse_of(predictions, actuals);
    rep.r2 = r2_of(predictions, actuals);
    rep.corr = pearson(predictions, actuals);
    return rep;
}

double prediction_transfer_risk(const Vector& theta_source, const Matrix& x_test,
                                const Vector& y_test) {
    if (x_test.rows() == 0 || x_test.rows() != y_test.size())
        throw EmptyDataset("prediction_transfer_risk: empty test set");
    return w2sq_empirical_1d(predict(x_test, theta_source), y_test);
}

}  // namespace trisk
