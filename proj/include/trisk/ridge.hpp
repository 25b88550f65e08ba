// Ridge regression, direct and transfer variants, with the standardization
// step, evaluation metrics and the empirical transfer-risk score used by the
// prediction pipeline.
//
// Fits never carry an intercept: standardization centers both features and
// target, so the intercept is identically zero on the training scale.
#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "trisk/linalg.hpp"

namespace trisk {

// Per-column transform learned on training data. Columns whose standard
// deviation falls at or below 1e-12 are dropped and recorded in `kept`.
struct StandardizeStats {
    Vector feature_mean;             // full input width
    Vector feature_std;              // full input width
    double target_mean = 0.0;
    double target_std = 1.0;
    std::vector<std::size_t> kept;   // retained column indices, ascending
};

struct StandardizedData {
    Matrix x;   // rows x kept-columns, z-scored
    Vector y;   // z-scored targets
};

// Learn the transform on (rows, targets) and apply it.
// Throws EmptyDataset.
std::pair<StandardizedData, StandardizeStats> standardize(const Matrix& rows,
                                                          const Vector& targets);

// Apply a previously learned transform (the test-time path).
// Throws EmptyDataset, DimensionMismatch.
StandardizedData standardize_with(const Matrix& rows, const Vector& targets,
                                  const StandardizeStats& stats);

struct RidgeModel {
    Vector theta;                    // one weight per kept feature
    double lambda = 0.0;
    StandardizeStats stats;          // filled by the pipeline, empty for raw fits
    std::vector<std::size_t> kept_features;
};

struct MetricsReport {
    double mse = 0.0;
    double r2 = 0.0;
    double corr = 0.0;
};

// theta = (X^T X / T + lambda I)^{-1} X^T y / T on an already standardized
// design. Throws SingularSystem when lambda = 0 meets a rank-deficient
// design.
RidgeModel fit_ridge(const Matrix& x, const Vector& y, double lambda);

// Transfer variant anchored at theta_source:
// theta = (X^T X / T + lambda I)^{-1} (X^T y / T + lambda theta_source).
RidgeModel fit_transfer_ridge(const Matrix& x, const Vector& y, double lambda,
                              const Vector& theta_source);

Vector predict(const Matrix& x, const Vector& theta);

double mse_of(const Vector& predictions, const Vector& actuals);

// 1 - SSE/SST with SST about the actuals' mean. Throws ConstantActuals.
double r2_of(const Vector& predictions, const Vector& actuals);

// mse, r2 and Pearson correlation in one report. Throws ConstantActuals when
// SST vanishes and ConstantSeries when the correlation is undefined.
MetricsReport evaluate(const Vector& predictions, const Vector& actuals);

// Squared empirical W2 between the pretrained model's predictions on the test
// design and the test targets. Throws EmptyDataset.
double prediction_transfer_risk(const Vector& theta_source, const Matrix& x_test,
                                const Vector& y_test);

}  // namespace trisk
