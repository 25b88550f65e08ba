// Sharpe-ratio portfolio optimization on the unit simplex, transfer
// fine-tuning with an L2 anchor to the pretrained weights, and the portfolio
// transfer risk (inverse source Sharpe plus the Gaussian W2 distance between
// source and target return laws).
#pragma once

#include <optional>

#include "trisk/data.hpp"
#include "trisk/spd.hpp"

namespace trisk {

struct Moments {
    Vector mu;                   // annualized mean return
    SymMatrix sigma;             // annualized covariance
    double annualization_factor = 1.0;
    bool regularized = false;    // true when a ridge was added to reach SPD

    std::size_t dim() const { return mu.size(); }
};

// Long-only full-investment weights.
struct Portfolio {
    Vector weights;

    explicit Portfolio(Vector w);
};

struct PortfolioRisk {
    double r1 = 0.0;    // 1 / source Sharpe
    double r2 = 0.0;    // W2 between the fitted Gaussian return laws
    double total = 0.0;
};

struct OptimizerOptions {
    int restarts = 8;           // random start points beyond vertices/uniform
    int max_iters = 10000;
    double step_init = 0.1;
    double tol = 1e-8;
    double ridge_eps = 1e-8;
};

// Sample moments scaled by the annualization factor (unbiased covariance).
// A ridge of ridge_eps * I is added once if the raw covariance is not SPD and
// the `regularized` flag records it. Throws InsufficientData.
Moments estimate_moments(const ReturnPanel& panel, double annualization_factor,
                         double ridge_eps = 1e-8);

// mu^T phi / sqrt(phi^T Sigma phi). Throws ZeroVariancePortfolio.
double sharpe(const Portfolio& phi, const Moments& m);

// Euclidean projection onto the unit simplex by sort-and-threshold.
Portfolio project_simplex(const Vector& v);

// Multi-start projected gradient ascent on the Sharpe ratio; starts at every
// vertex, the uniform point and `restarts` seeded random points, and returns
// the best local solution. Throws NotSPD.
Portfolio max_sharpe(const Moments& m, const OptimizerOptions& opts = {});

// Maximizes sharpe(phi) - lambda |phi_source - phi|^2 by the same scheme with
// phi_source as an extra start. Throws NotSPD, DimensionMismatch.
Portfolio transfer_portfolio(const Moments& m_target, const Portfolio& phi_source, double lambda,
                             const OptimizerOptions& opts = {});

// C_PO = R1 + R2. Throws NonPositiveSourceSharpe.
PortfolioRisk portfolio_transfer_risk(const Moments& m_source, const Portfolio& phi_source,
                                      const Moments& m_target);

// Exhaustive simplex-lattice search of the (optionally anchored) objective;
// test oracle for the optimizer. Throws DimensionTooLarge for d > 4.
Portfolio grid_oracle(const Moments& m, const std::optional<Portfolio>& phi_source, double lambda,
                      double step);

}  // namespace trisk
