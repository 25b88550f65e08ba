#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "trisk/divergence.hpp"
#include "trisk/portfolio.hpp"

using namespace trisk;
using trisk_test::random_spd;
using trisk_test::random_vector;

namespace {

Moments make_moments(Vector mu, SymMatrix sigma, double factor = 1.0) {
    Moments m;
    m.mu = std::move(mu);
    m.sigma = std::move(sigma);
    m.annualization_factor = factor;
    return m;
}

Moments random_moments(PhiloxRng& rng, std::size_t d) {
    Vector mu(d);
    for (auto& v : mu) v = trisk_test::uniform(rng, 0.02, 0.25);
    return make_moments(std::move(mu), random_spd(rng, d, 0.01, 0.09));
}

double penalized_objective(const Portfolio& phi, const Moments& m, const Portfolio* anchor,
                           double lambda) {
    double v = sharpe(phi, m);
    if (anchor) {
        const Vector diff = vec_sub(anchor->weights, phi.weights);
        v -= lambda * dot(diff, diff);
    }
    return v;
}

void check_feasible(const Portfolio& phi) {
    double sum = 0.0;
    for (double w : phi.weights) {
        CHECK(w >= -1e-12);
        sum += w;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-9);
}

}  // namespace

TEST_CASE("estimate_moments annualizes sample statistics") {
    ReturnPanel panel;
    panel.symbols = {"A"};
    panel.timestamps = {0, 1};
    panel.returns = {{0.01, 0.03}};
    const Moments m = estimate_moments(panel, 252.0);
    CHECK(m.mu[0] == doctest::Approx(5.04).epsilon(1e-12));
    CHECK(m.sigma(0, 0) == doctest::Approx(0.0504).epsilon(1e-12));
    CHECK_FALSE(m.regularized);

    const Moments raw = estimate_moments(panel, 1.0);
    CHECK(raw.mu[0] == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(raw.sigma(0, 0) == doctest::Approx(2e-4).epsilon(1e-12));

    ReturnPanel tiny;
    tiny.symbols = {"A"};
    tiny.timestamps = {0};
    tiny.returns = {{0.01}};
    CHECK_THROWS_AS(estimate_moments(tiny, 1.0), InsufficientData);
}

TEST_CASE("estimate_moments recovers generator moments on a synthetic panel") {
    PhiloxRng rng(61);
    const Vector mu{0.001, -0.0005, 0.002};
    const SymMatrix sigma = random_spd(rng, 3, 0.0001, 0.0004);
    const GaussianDist law(mu, sigma);
    const Matrix samples = synth_gaussian_samples(law, 100000, 7);

    ReturnPanel panel;
    panel.symbols = {"A", "B", "C"};
    panel.timestamps.resize(samples.rows());
    for (std::size_t t = 0; t < samples.rows(); ++t) panel.timestamps[t] = (std::int64_t)t;
    panel.returns.assign(3, Vector(samples.rows()));
    for (std::size_t a = 0; a < 3; ++a)
        for (std::size_t t = 0; t < samples.rows(); ++t) panel.returns[a][t] = samples(t, a);

    const Moments m = estimate_moments(panel, 1.0);
    const double scale = std::sqrt(sigma.max_diagonal());
    for (std::size_t a = 0; a < 3; ++a) {
        CHECK(std::abs(m.mu[a] - mu[a]) < 0.01 * scale + 0.01 * std::abs(mu[a]));
        for (std::size_t b = 0; b < 3; ++b)
            CHECK(std::abs(m.sigma(a, b) - sigma(a, b)) < 0.01 * sigma.max_diagonal());
    }
}

TEST_CASE("sharpe closed form and homogeneity") {
    const Moments m = make_moments({0.1}, SymMatrix::diagonal({0.04}));
    const Portfolio phi{Vector{1.0}};
    CHECK(sharpe(phi, m) == doctest::Approx(0.5));

    const Moments doubled = make_moments({0.2}, SymMatrix::diagonal({0.04}));
    CHECK(sharpe(phi, doubled) == doctest::Approx(1.0));

    const Moments wider = make_moments({0.1}, SymMatrix::diagonal({0.16}));
    CHECK(sharpe(phi, wider) == doctest::Approx(0.25));
}

TEST_CASE("project_simplex sort-and-threshold rule") {
    const Portfolio same = project_simplex({0.3, 0.7});
    CHECK(same.weights[0] == doctest::Approx(0.3));
    CHECK(same.weights[1] == doctest::Approx(0.7));

    const Portfolio corner = project_simplex({2.0, 0.0});
    CHECK(corner.weights[0] == doctest::Approx(1.0));
    CHECK(corner.weights[1] == doctest::Approx(0.0));

    const Portfolio split = project_simplex({0.6, 0.6});
    CHECK(split.weights[0] == doctest::Approx(0.5));
    CHECK(split.weights[1] == doctest::Approx(0.5));

    PhiloxRng rng(62);
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t d = 1 + rng.next_below(8);
        check_feasible(project_simplex(random_vector(rng, d, 3.0)));
    }

    // idempotence
    for (int rep = 0; rep < 50; ++rep) {
        const Portfolio p = project_simplex(random_vector(rng, 4, 2.0));
        const Portfolio q = project_simplex(p.weights);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(q.weights[i] == doctest::Approx(p.weights[i]).epsilon(1e-12));
    }
}

TEST_CASE("max_sharpe finds the known optima") {
    // equal means reduce to minimum variance
    const Moments eq = make_moments({0.1, 0.1}, SymMatrix::diagonal({0.04, 0.01}));
    const Portfolio w_eq = max_sharpe(eq);
    CHECK(std::abs(w_eq.weights[0] - 0.2) < 1e-4);
    CHECK(std::abs(w_eq.weights[1] - 0.8) < 1e-4);

    // feasible tangency direction
    const Moments tangency = make_moments({0.2, 0.1}, SymMatrix::diagonal({0.01, 0.01}));
    const Portfolio w_tan = max_sharpe(tangency);
    CHECK(std::abs(w_tan.weights[0] - 2.0 / 3.0) < 1e-4);
    CHECK(std::abs(w_tan.weights[1] - 1.0 / 3.0) < 1e-4);

    CHECK_THROWS_AS(max_sharpe(make_moments({0.1, 0.1}, SymMatrix::diagonal({0.04, -0.01}))),
                    NotSPD);
}

TEST_CASE("max_sharpe against the grid oracle on random instances") {
    PhiloxRng rng(63);
    for (int rep = 0; rep < 25; ++rep) {
        const Moments m = random_moments(rng, 3);
        const Portfolio opt = max_sharpe(m);
        check_feasible(opt);
        const Portfolio grid = grid_oracle(m, std::nullopt, 0.0, 0.01);
        CHECK(sharpe(opt, m) >= sharpe(grid, m) - 1e-3);
    }
}

TEST_CASE("transfer_portfolio reductions and anchor limit") {
    PhiloxRng rng(64);
    const Moments m = random_moments(rng, 3);
    const Portfolio anchor = project_simplex(random_vector(rng, 3, 1.0));

    // lambda = 0 coincides with the unpenalized problem
    const Portfolio free = transfer_portfolio(m, anchor, 0.0);
    CHECK(std::abs(sharpe(free, m) - sharpe(max_sharpe(m), m)) < 1e-6);

    // overwhelming anchor returns phi_source
    const Portfolio pinned = transfer_portfolio(m, anchor, 1e9);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(std::abs(pinned.weights[i] - anchor.weights[i]) < 1e-4);

    // the anchored start guarantees no regression below the anchor objective
    const Portfolio tuned = transfer_portfolio(m, anchor, 0.2);
    CHECK(penalized_objective(tuned, m, &anchor, 0.2) >=
          penalized_objective(anchor, m, &anchor, 0.2) - 1e-9);

    CHECK_THROWS_AS(transfer_portfolio(m, Portfolio{Vector{1.0}}, 0.2), DimensionMismatch);
}

TEST_CASE("transfer_portfolio against the grid oracle at the production penalty") {
    PhiloxRng rng(65);
    for (int rep = 0; rep < 25; ++rep) {
        const Moments m = random_moments(rng, 3);
        const Portfolio anchor = project_simplex(random_vector(rng, 3, 1.0));
        const Portfolio opt = transfer_portfolio(m, anchor, 0.2);
        check_feasible(opt);
        const Portfolio grid = grid_oracle(m, anchor, 0.2, 0.01);
        CHECK(penalized_objective(opt, m, &anchor, 0.2) >=
              penalized_objective(grid, m, &anchor, 0.2) - 1e-3);
    }
}

TEST_CASE("portfolio_transfer_risk components") {
    // single asset with Sharpe exactly 2
    const Moments m = make_moments({0.2}, SymMatrix::diagonal({0.01}));
    const Portfolio phi{Vector{1.0}};
    const PortfolioRisk identical = portfolio_transfer_risk(m, phi, m);
    CHECK(identical.r1 == doctest::Approx(0.5));
    CHECK(identical.r2 == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(identical.total == doctest::Approx(0.5).epsilon(1e-9));

    // Sharpe exactly 1
    const Moments unit = make_moments({0.1}, SymMatrix::diagonal({0.01}));
    const PortfolioRisk one = portfolio_transfer_risk(unit, phi, unit);
    CHECK(one.total == doctest::Approx(1.0).epsilon(1e-9));

    // r2 squared equals the Gaussian W2^2 between the fitted laws
    PhiloxRng rng(66);
    for (int rep = 0; rep < 30; ++rep) {
        const Moments source = random_moments(rng, 3);
        const Moments target = random_moments(rng, 3);
        const Portfolio w = project_simplex(random_vector(rng, 3, 1.0));
        const PortfolioRisk risk = portfolio_transfer_risk(source, w, target);
        const double w2 = w2sq_gaussian_multi(GaussianDist(source.mu, source.sigma),
                                              GaussianDist(target.mu, target.sigma));
        CHECK(std::abs(risk.r2 * risk.r2 - w2) < 1e-10);
        CHECK(risk.total == doctest::Approx(risk.r1 + risk.r2).epsilon(1e-12));
    }

    // negative source Sharpe is rejected
    const Moments losing = make_moments({-0.1}, SymMatrix::diagonal({0.01}));
    CHECK_THROWS_AS(portfolio_transfer_risk(losing, phi, m), NonPositiveSourceSharpe);
}

TEST_CASE("grid_oracle lattice enumeration") {
    const Moments m2 = make_moments({0.1, 0.2}, SymMatrix::diagonal({0.04, 0.04}));
    // step 0.5 on d=2 evaluates exactly (1,0), (0.5,0.5), (0,1); best is (0,1)
    const Portfolio best = grid_oracle(m2, std::nullopt, 0.0, 0.5);
    CHECK(best.weights[0] == doctest::Approx(0.0));
    CHECK(best.weights[1] == doctest::Approx(1.0));

    const Moments eq = make_moments({0.1, 0.1}, SymMatrix::diagonal({0.04, 0.01}));
    const Portfolio grid_eq = grid_oracle(eq, std::nullopt, 0.0, 0.01);
    CHECK(grid_eq.weights[0] == doctest::Approx(0.2).epsilon(1e-9));

    const Moments one = make_moments({0.1}, SymMatrix::diagonal({0.01}));
    CHECK(grid_oracle(one, std::nullopt, 0.0, 0.5).weights[0] == doctest::Approx(1.0));

    const Moments big = make_moments(Vector(5, 0.1), SymMatrix::identity(5));
    CHECK_THROWS_AS(grid_oracle(big, std::nullopt, 0.0, 0.1), DimensionTooLarge);
}

TEST_CASE("scaling mu and sigma together preserves the argmax") {
    PhiloxRng rng(67);
    for (int rep = 0; rep < 10; ++rep) {
        const Moments m = random_moments(rng, 3);
        const double c = trisk_test::uniform(rng, 0.5, 4.0);
        Moments scaled = m;
        for (auto& v : scaled.mu) v *= c;
        SymMatrix s(3);
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = i; j < 3; ++j) s.set(i, j, c * m.sigma(i, j));
        scaled.sigma = s;

        const Portfolio base = max_sharpe(m);
        const Portfolio big = max_sharpe(scaled);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(std::abs(base.weights[i] - big.weights[i]) < 1e-4);
        CHECK(sharpe(big, scaled) == doctest::Approx(std::sqrt(c) * sharpe(base, m)).epsilon(1e-6));
    }
}

TEST_CASE("distance to the anchor is nonincreasing in lambda") {
    PhiloxRng rng(68);
    const Moments m = random_moments(rng, 3);
    const Portfolio anchor = project_simplex(random_vector(rng, 3, 1.0));

    double prev = 1e300;
    for (int k = 0; k < 10; ++k) {
        const double lambda = std::pow(10.0, -3.0 + 6.0 * k / 9.0);
        const Portfolio w = transfer_portfolio(m, anchor, lambda);
        const double dist = norm2(vec_sub(w.weights, anchor.weights));
        CHECK(dist <= prev + 1e-6);
        prev = dist;
    }
}
