#include "trisk/divergence.hpp"

#include <algorithm>
#include <cmath>

namespace trisk {

double kl_gaussian_1d(const Gaussian1D& p, const Gaussian1D& q) {
    const double mean_gap = p.mean - q.mean;
    return 0.5 * std::log(q.var / p.var) + 0.5 * (p.var + mean_gap * mean_gap) / q.var - 0.5;
}

double kl_gaussian_multi(const GaussianDist& p, const GaussianDist& q) {
    if (p.dim() != q.dim()) throw DimensionMismatch("kl_gaussian_multi: dimensions differ");
    const std::size_t n = p.dim();

    const Matrix qinv_sp = spd_solve(q.cov, p.cov.to_matrix());
    double trace = 0.0;
    for (std::size_t i = 0; i < n; ++i) trace += qinv_sp(i, i);

    const double logdet_ratio = spd_logdet(p.cov) - spd_logdet(q.cov);

    const Vector dm = vec_sub(p.mean, q.mean);
    const double quad = dot(dm, spd_solve(q.cov, dm));

    return 0.5 * (trace - logdet_ratio - static_cast<double>(n) + quad);
}

double w2sq_gaussian_1d(const Gaussian1D& p, const Gaussian1D& q) {
    const double mean_gap = p.mean - q.mean;
    const double sd_gap = std::sqrt(p.var) - std::sqrt(q.var);
    return mean_gap * mean_gap + sd_gap * sd_gap;
}

double w2sq_gaussian_multi(const GaussianDist& p, const GaussianDist& q) {
    if (p.dim() != q.dim()) throw DimensionMismatch("w2sq_gaussian_multi: dimensions differ");
    const std::size_t n = p.dim();

    const SymMatrix root_p = spd_sqrt(p.cov);
    // inner = Sp^1/2 Sq Sp^1/2, SPD whenever both inputs are.
    const Matrix inner = matmul(matmul(root_p.to_matrix(), q.cov.to_matrix()), root_p.to_matrix());
    const SymMatrix cross_root = spd_sqrt(SymMatrix::from_matrix(inner));

    double trace_term = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        trace_term += p.cov(i, i) + q.cov(i, i) - 2.0 * cross_root(i, i);

    const Vector dm = vec_sub(p.mean, q.mean);
    // The trace term can go microscopically negative from rounding; W2^2 is
    // nonnegative by definition.
    return std::max(dot(dm, dm) + trace_term, 0.0);
}

namespace {

// Left-continuous step quantile: Q(u) = x_(ceil(u n)) over the sorted sample.
double step_quantile(const Vector& sorted, double u) {
    const std::size_t n = sorted.size();
    std::size_t k = static_cast<std::size_t>(std::ceil(u * static_cast<double>(n)));
    if (k == 0) k = 1;
    if (k > n) k = n;
    return sorted[k - 1];
}

}  // namespace

double w2sq_empirical_1d(Vector xs, Vector ys) {
    if (xs.empty() || ys.empty()) throw EmptySample("w2sq_empirical_1d: empty sample");
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());

    if (xs.size() == ys.size()) {
        double s = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const double d = xs[i] - ys[i];
            s += d * d;
        }
        return s / static_cast<double>(xs.size());
    }

    constexpr int grid = 1000;
    double s = 0.0;
    for (int k = 1; k <= grid; ++k) {
        const double u = (static_cast<double>(k) - 0.5) / grid;
        const double d = step_quantile(xs, u) - step_quantile(ys, u);
        s += d * d;
    }
    return s / grid;
}

std::pair<double, double> cross_entropy_bounds(double target_ce, const Vector& q_mass) {
    if (q_mass.empty()) throw InvalidProbabilityVector("cross_entropy_bounds: empty mass vector");
    double total = 0.0;
    double log_sum = 0.0;
    for (double q : q_mass) {
        if (!(q > 0.0)) throw InvalidProbabilityVector("cross_entropy_bounds: nonpositive entry");
        total += q;
        log_sum += std::log(q);
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw InvalidProbabilityVector("cross_entropy_bounds: masses do not sum to 1");
    return {target_ce + log_sum, target_ce - log_sum};
}

double combine_linear_risk(double output_risk, double input_risk, const LinearRiskParams& params) {
    if (output_risk < 0.0 || input_risk < 0.0)
        throw NegativeRisk("combine_linear_risk: risks must be nonnegative");
    return output_risk + params.lambda * input_risk;
}

}  // namespace trisk
