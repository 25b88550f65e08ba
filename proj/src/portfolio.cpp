#include "trisk/portfolio.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "trisk/divergence.hpp"
#include "trisk/rng.hpp"

namespace trisk {

Portfolio::Portfolio(Vector w) : weights(std::move(w)) {
    if (weights.empty()) throw DimensionMismatch("Portfolio: empty weight vector");
    double sum = 0.0;
    for (double x : weights) {
        if (x < -1e-12) throw DimensionMismatch("Portfolio: negative weight");
        sum += x;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw DimensionMismatch("Portfolio: weights must sum to 1");
}

Moments estimate_moments(const ReturnPanel& panel, double annualization_factor,
                         double ridge_eps) {
    const std::size_t d = panel.assets();
    const std::size_t n = panel.observations();
    if (d == 0 || n < 2) throw InsufficientData("estimate_moments: need at least two observations");

    Moments m;
    m.annualization_factor = annualization_factor;
    m.mu.assign(d, 0.0);
    for (std::size_t a = 0; a < d; ++a) {
        for (double r : panel.returns[a]) m.mu[a] += r;
        m.mu[a] *= annualization_factor / static_cast<double>(n);
    }

    SymMatrix cov(d);
    for (std::size_t a = 0; a < d; ++a) {
        const double mean_a = m.mu[a] / annualization_factor;
        for (std::size_t b = a; b < d; ++b) {
            const double mean_b = m.mu[b] / annualization_factor;
            double s = 0.0;
            for (std::size_t t = 0; t < n; ++t)
                s += (panel.returns[a][t] - mean_a) * (panel.returns[b][t] - mean_b);
            cov.set(a, b, annualization_factor * s / static_cast<double>(n - 1));
        }
    }
    if (!is_spd(cov)) {
        for (std::size_t a = 0; a < d; ++a) cov.set(a, a, cov(a, a) + ridge_eps);
        m.regularized = true;
    }
    m.sigma = std::move(cov);
    return m;
}

double sharpe(const Portfolio& phi, const Moments& m) {
    if (phi.weights.size() != m.dim()) throw DimensionMismatch("sharpe: dimensions differ");
    const double var = dot(phi.weights, matvec(m.sigma.to_matrix(), phi.weights));
    if (!(var > 0.0)) throw ZeroVariancePortfolio("sharpe: portfolio variance is not positive");
    return dot(m.mu, phi.weights) / std::sqrt(var);
}

Portfolio project_simplex(const Vector& v) {
    const std::size_t d = v.size();
    if (d == 0) throw DimensionMismatch("project_simplex: empty vector");
    Vector u = v;
    std::sort(u.begin(), u.end(), std::greater<double>());
    double css = 0.0;
    double threshold = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        css += u[j];
        const double candidate = (css - 1.0) / static_cast<double>(j + 1);
        if (u[j] - candidate > 0.0) threshold = candidate;
    }
    Vector w(d);
    double sum = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        w[i] = std::max(v[i] - threshold, 0.0);
        sum += w[i];
    }
    // Renormalize away the last few ulps so the Portfolio invariant is exact.
    for (double& x : w) x /= sum;
    return Portfolio(std::move(w));
}

namespace {

struct Objective {
    const Moments& m;
    const Vector* anchor;   // phi_source or null
    double lambda;

    double value(const Vector& w) const {
        const double var = dot(w, matvec(m.sigma.to_matrix(), w));
        if (!(var > 0.0)) return -1e300;
        double v = dot(m.mu, w) / std::sqrt(var);
        if (anchor) {
            const Vector diff = vec_sub(*anchor, w);
            v -= lambda * dot(diff, diff);
        }
        return v;
    }

    Vector gradient(const Vector& w) const {
        const Vector sw = matvec(m.sigma.to_matrix(), w);
        const double var = dot(w, sw);
        const double sd = std::sqrt(var);
        const double mw = dot(m.mu, w);
        Vector g(w.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            g[i] = m.mu[i] / sd - mw * sw[i] / (var * sd);
        if (anchor) {
            for (std::size_t i = 0; i < w.size(); ++i)
                g[i] += 2.0 * lambda * ((*anchor)[i] - w[i]);
        }
        return g;
    }
};

Vector ascend(const Objective& objective, Vector w, const OptimizerOptions& opts) {
    double value = objective.value(w);
    for (int it = 0; it < opts.max_iters; ++it) {
        const Vector g = objective.gradient(w);
        double step = opts.step_init;
        Vector next = w;
        double next_value = value;
        bool improved = false;
        while (step > 1e-18) {
            Vector trial(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) trial[i] = w[i] + step * g[i];
            Portfolio projected = project_simplex(trial);
            const double trial_value = objective.value(projected.weights);
            if (trial_value > value) {
                next = std::move(projected.weights);
                next_value = trial_value;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
        double move = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) move += std::abs(next[i] - w[i]);
        w = std::move(next);
        value = next_value;
        if (move < opts.tol) break;
    }
    return w;
}

Portfolio multi_start(const Objective& objective, const std::vector<Vector>& extra_starts,
                      std::size_t d, const OptimizerOptions& opts) {
    std::vector<Vector> starts;
    for (std::size_t i = 0; i < d; ++i) {
        Vector vertex(d, 0.0);
        vertex[i] = 1.0;
        starts.push_back(std::move(vertex));
    }
    starts.emplace_back(d, 1.0 / static_cast<double>(d));
    for (const auto& s : extra_starts) starts.push_back(s);
    PhiloxRng rng(0x7472616e73666572ull);   // fixed stream keeps runs reproducible
    for (int r = 0; r < opts.restarts; ++r) {
        Vector w(d);
        for (std::size_t i = 0; i < d; ++i) w[i] = rng.next_double();
        starts.push_back(project_simplex(w).weights);
    }

    Vector best;
    double best_value = -1e300;
    for (const auto& start : starts) {
        Vector w = ascend(objective, start, opts);
        const double v = objective.value(w);
        if (v > best_value + 1e-15) {
            best_value = v;
            best = std::move(w);
        }
    }
    return Portfolio(std::move(best));
}

}  // namespace

Portfolio max_sharpe(const Moments& m, const OptimizerOptions& opts) {
    if (!is_spd(m.sigma)) throw NotSPD("max_sharpe: covariance is not SPD");
    const Objective objective{m, nullptr, 0.0};
    return multi_start(objective, {}, m.dim(), opts);
}

Portfolio transfer_portfolio(const Moments& m_target, const Portfolio& phi_source, double lambda,
                             const OptimizerOptions& opts) {
    if (phi_source.weights.size() != m_target.dim())
        throw DimensionMismatch("transfer_portfolio: dimensions differ");
    if (!is_spd(m_target.sigma)) throw NotSPD("transfer_portfolio: covariance is not SPD");
    const Objective objective{m_target, &phi_source.weights, lambda};
    return multi_start(objective, {phi_source.weights}, m_target.dim(), opts);
}

PortfolioRisk portfolio_transfer_risk(const Moments& m_source, const Portfolio& phi_source,
                                      const Moments& m_target) {
    if (m_source.dim() != m_target.dim())
        throw DimensionMismatch("portfolio_transfer_risk: dimensions differ");
    const double source_sharpe = sharpe(phi_source, m_source);
    if (!(source_sharpe > 0.0))
        throw NonPositiveSourceSharpe("portfolio_transfer_risk: source Sharpe must be positive");

    PortfolioRisk risk;
    risk.r1 = 1.0 / source_sharpe;
    risk.r2 = std::sqrt(w2sq_gaussian_multi(GaussianDist(m_source.mu, m_source.sigma),
                                            GaussianDist(m_target.mu, m_target.sigma)));
    risk.total = risk.r1 + risk.r2;
    return risk;
}

namespace {

void enumerate_lattice(std::size_t d, std::size_t levels, Vector& current, std::size_t index,
                       std::size_t remaining, const Objective& objective, Vector& best,
                       double& best_value) {
    if (index + 1 == d) {
        current[index] = static_cast<double>(remaining) / static_cast<double>(levels);
        const double v = objective.value(current);
        if (v > best_value) {
            best_value = v;
            best = current;
        }
        return;
    }
    for (std::size_t take = 0; take <= remaining; ++take) {
        current[index] = static_cast<double>(take) / static_cast<double>(levels);
        enumerate_lattice(d, levels, current, index + 1, remaining - take, objective, best,
                         best_value);
    }
}

}  // namespace

Portfolio grid_oracle(const Moments& m, const std::optional<Portfolio>& phi_source, double lambda,
                      double step) {
    const std::size_t d = m.dim();
    if (d > 4) throw DimensionTooLarge("grid_oracle: only d <= 4 is enumerable");
    if (!(step > 0.0 && step <= 0.5)) throw DimensionMismatch("grid_oracle: step must be in (0, 0.5]");
    if (d == 1) return Portfolio(Vector{1.0});

    const std::size_t levels = static_cast<std::size_t>(std::lround(1.0 / step));
    const Objective objective{m, phi_source ? &phi_source->weights : nullptr, lambda};
    Vector current(d, 0.0);
    Vector best(d, 0.0);
    double best_value = -1e300;
    enumerate_lattice(d, levels, current, 0, levels, objective, best, best_value);
    return Portfolio(std::move(best));
}

}  // namespace trisk
