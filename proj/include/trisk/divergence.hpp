// Divergence primitives: closed-form KL and squared 2-Wasserstein distances
// between Gaussians (scalar and multivariate), an empirical 1-D W2 estimator,
// cross-entropy bracketing bounds for classifiers, and the linear combination
// of output and input transport risks.
#pragma once

#include <utility>

#include "trisk/spd.hpp"

namespace trisk {

struct Gaussian1D {
    double mean = 0.0;
    double var = 1.0;

    Gaussian1D(double mean_, double var_) : mean(mean_), var(var_) {
        if (!(var > 0.0)) throw NonPositiveVariance("Gaussian1D: variance must be positive");
    }
};

struct GaussianDist {
    Vector mean;
    SymMatrix cov;

    GaussianDist(Vector mean_, SymMatrix cov_) : mean(std::move(mean_)), cov(std::move(cov_)) {
        if (mean.size() != cov.dim())
            throw DimensionMismatch("GaussianDist: mean length and covariance dimension differ");
        if (!is_spd(cov)) throw NotSPD("GaussianDist: covariance is not SPD");
    }

    std::size_t dim() const { return mean.size(); }
};

struct LinearRiskParams {
    double lambda = 1.0;

    explicit LinearRiskParams(double lambda_) : lambda(lambda_) {
        if (lambda < 0.0) throw NegativeRisk("LinearRiskParams: lambda must be nonnegative");
    }
};

// KL(p || q) for scalar Gaussians; q plays the intermediate-model law.
double kl_gaussian_1d(const Gaussian1D& p, const Gaussian1D& q);

// KL(p || q) = (Tr(Sq^-1 Sp) - ln det(Sp)/det(Sq) - n + dm^T Sq^-1 dm) / 2.
double kl_gaussian_multi(const GaussianDist& p, const GaussianDist& q);

// (mean gap)^2 + (stddev gap)^2.
double w2sq_gaussian_1d(const Gaussian1D& p, const Gaussian1D& q);

// Bures form: |dm|^2 + Tr(Sp + Sq - 2 (Sp^1/2 Sq Sp^1/2)^1/2).
double w2sq_gaussian_multi(const GaussianDist& p, const GaussianDist& q);

// Squared empirical W2 between two scalar samples. Equal lengths pair the
// order statistics; unequal lengths evaluate both step quantile functions on
// the fixed 1000-point midpoint grid (k - 1/2)/1000 and average the squared
// gaps.
double w2sq_empirical_1d(Vector xs, Vector ys);

// Bracketing interval for the cross entropy H(P_T, P_ST) given the training
// cross-entropy loss and the intermediate model's class mass function:
// returns (target_ce + sum ln q_i, target_ce - sum ln q_i).
std::pair<double, double> cross_entropy_bounds(double target_ce, const Vector& q_mass);

// output_risk + lambda * input_risk.
double combine_linear_risk(double output_risk, double input_risk, const LinearRiskParams& params);

}  // namespace trisk
