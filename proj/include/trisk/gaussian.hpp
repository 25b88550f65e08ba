// Closed-form transfer-risk calculus for jointly Gaussian regression tasks:
// optimal affine models, expected squared loss, pushforward laws, KL- and
// Wasserstein-based output risks with bias/variance decompositions, regret
// and its exact relation to the Wasserstein risk, and the feature- and
// output-augmented variants.
#pragma once

#include "trisk/divergence.hpp"

namespace trisk {

// Joint Gaussian over (X, Y) stored block-wise: every downstream formula
// consumes the blocks directly. Construction assembles the full joint
// covariance and validates it is SPD.
struct GaussianTask {
    std::size_t dim_x = 0;   // d
    std::size_t dim_y = 0;   // l
    Vector mu_x;
    Vector mu_y;
    SymMatrix sigma_x;       // d x d
    Matrix sigma_xy;         // d x l
    SymMatrix sigma_y;       // l x l

    GaussianTask(Vector mu_x_, Vector mu_y_, SymMatrix sigma_x_, Matrix sigma_xy_,
                 SymMatrix sigma_y_);

    SymMatrix joint_covariance() const;
    GaussianDist input_law() const { return {mu_x, sigma_x}; }
};

// Affine map y = W x + b with W sized (output x input).
struct LinearModel {
    Matrix w;   // l x d
    Vector b;   // l

    std::size_t dim_in() const { return w.cols(); }
    std::size_t dim_out() const { return w.rows(); }
};

struct RiskDecomposition {
    double variance_term = 0.0;
    double bias_term = 0.0;
    double total = 0.0;
};

struct RegretReport {
    double regret = 0.0;
    double risk_w = 0.0;
    double residual = 0.0;   // regret - risk_w, nonnegative by Cauchy-Schwarz
};

enum class RiskKind { kl, w2 };

enum class AugmentationMode { feature, output };

// Target task that extends a source-aligned base block with either extra
// input features or an extra output block.
//
// feature mode: the added block is a feature vector Z of dimension k;
//   sigma_add_x = Cov(X_base, Z)  (d x k)
//   sigma_add   = Var(Z)          (k x k)
//   sigma_add_y = Cov(Z, Y_base)  (k x l)
// output mode: the added block is an output Y_A of dimension k;
//   sigma_add_x = Cov(X_base, Y_A)  (d x k)
//   sigma_add   = Var(Y_A)          (k x k)
//   sigma_add_y = Cov(Y_A, Y_base)  (k x l)
struct AugmentedTargetTask {
    GaussianTask base;
    std::size_t added_dim = 0;
    Vector mu_add;
    Matrix sigma_add_x;
    SymMatrix sigma_add;
    Matrix sigma_add_y;
    AugmentationMode mode = AugmentationMode::feature;

    AugmentedTargetTask(GaussianTask base_, Vector mu_add_, Matrix sigma_add_x_,
                        SymMatrix sigma_add_, Matrix sigma_add_y_, AugmentationMode mode_);

    // Assembled plain task: feature mode yields inputs (X, Z) against Y;
    // output mode yields X against outputs (Y, Y_A).
    GaussianTask to_joint_task() const;
};

// Scalar convex penalty (x - ln x - 1) / 2 mapping a variance ratio to its
// KL contribution; zero exactly at x = 1.
double kl_variance_term(double ratio);

// W x + b minimizing the expected squared loss: w = sigma_x^{-1} sigma_xy
// (stored transposed), b = mu_y - w mu_x. Throws NotSPD.
LinearModel optimal_linear_model(const GaussianTask& task);

// E |Y - (W X + b)|^2 for scalar-output tasks. Throws DimensionMismatch.
double expected_loss(const LinearModel& model, const GaussianTask& task);

// Law of W X + b under X ~ input. Throws DegenerateOutputCovariance when the
// image covariance loses rank.
GaussianDist pushforward_law(const LinearModel& model, const GaussianDist& input);

// Predictive law of the optimal model on its own task (scalar output).
Gaussian1D predictive_law_1d(const GaussianTask& task);

// Law of the source-optimal model pushed through the target input
// distribution (scalar output). Throws ZeroPretrainedSignal when the
// pretrained weights carry no variance under the target inputs.
Gaussian1D intermediate_law_1d(const GaussianTask& source, const GaussianTask& target);

RiskDecomposition output_risk_kl(const GaussianTask& source, const GaussianTask& target);
RiskDecomposition output_risk_w(const GaussianTask& source, const GaussianTask& target);

// Regret of reusing the source-optimal model, its Wasserstein lower bound and
// the exact Cauchy-Schwarz residual joining them.
RegretReport regret(const GaussianTask& source, const GaussianTask& target);

// Bias-free risks when the target augments the source inputs; requires the
// target base block to match the source task. Throws StructureMismatch.
RiskDecomposition feature_augmented_risk(const GaussianTask& source,
                                         const AugmentedTargetTask& target, RiskKind kind);

// Risks when the target adds an output block handled by the initialization
// map init: R^d -> R^k. Throws NotSPD when init makes the intermediate law
// degenerate, DimensionMismatch on incompatible init.
RiskDecomposition output_augmented_risk(const GaussianTask& source,
                                        const AugmentedTargetTask& target,
                                        const LinearModel& init, RiskKind kind);

}  // namespace trisk
