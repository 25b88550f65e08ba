#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "test_util.hpp"
#include "trisk/data.hpp"
#include "trisk/gaussian.hpp"

using namespace trisk;
using trisk_test::random_spd;
using trisk_test::random_task;
using trisk_test::random_vector;

namespace {

GaussianTask make_1d_task(double sigma_xy, double mu_x = 0.0, double mu_y = 0.0) {
    Matrix sxy(1, 1);
    sxy(0, 0) = sigma_xy;
    return {{mu_x}, {mu_y}, SymMatrix::identity(1), sxy, SymMatrix::identity(1)};
}

// worked pair: sigma_xy 0.5 (source) vs 0.8 (target), unit marginals
const GaussianTask kSource = make_1d_task(0.5);
const GaussianTask kTarget = make_1d_task(0.8);

LinearModel padded_source_model(const GaussianTask& source, std::size_t extra) {
    const LinearModel f = optimal_linear_model(source);
    Matrix w(1, source.dim_x + extra);
    for (std::size_t j = 0; j < source.dim_x; ++j) w(0, j) = f.w(0, j);
    return {w, f.b};
}

}  // namespace

TEST_CASE("optimal_linear_model closed form") {
    // independence: zero cross covariance
    Matrix zero_xy(2, 1);
    const GaussianTask indep({1.0, -1.0}, {3.0}, SymMatrix::identity(2), zero_xy,
                             SymMatrix::identity(1));
    const LinearModel f0 = optimal_linear_model(indep);
    CHECK(f0.w(0, 0) == doctest::Approx(0.0));
    CHECK(f0.w(0, 1) == doctest::Approx(0.0));
    CHECK(f0.b[0] == doctest::Approx(3.0));

    const LinearModel f1 = optimal_linear_model(kSource);
    CHECK(f1.w(0, 0) == doctest::Approx(0.5));
    CHECK(f1.b[0] == doctest::Approx(0.0));
}

TEST_CASE("optimal_linear_model matches a least-squares fit on synthetic samples") {
    PhiloxRng rng(31);
    const GaussianTask task = random_task(rng, 3);
    const LinearModel f = optimal_linear_model(task);

    const std::size_t n = 1000000;
    const Matrix samples = synth_gaussian_samples(task, n, 99);

    // least-squares from sample moments
    Vector mean(4, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < 4; ++j) mean[j] += samples(i, j);
    for (double& m : mean) m /= static_cast<double>(n);
    Matrix cov(4, 4);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = a; b < 4; ++b)
                cov(a, b) += (samples(i, a) - mean[a]) * (samples(i, b) - mean[b]);
    for (std::size_t a = 0; a < 4; ++a)
        for (std::size_t b = a; b < 4; ++b) {
            cov(a, b) /= static_cast<double>(n - 1);
            cov(b, a) = cov(a, b);
        }
    SymMatrix sx(3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i; j < 3; ++j) sx.set(i, j, cov(i, j));
    Vector rhs{cov(0, 3), cov(1, 3), cov(2, 3)};
    const Vector w_hat = spd_solve(sx, rhs);
    const double b_hat = mean[3] - (w_hat[0] * mean[0] + w_hat[1] * mean[1] + w_hat[2] * mean[2]);

    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(f.w(0, j) - w_hat[j]) < 0.01);
    CHECK(std::abs(f.b[0] - b_hat) < 0.01);
}

TEST_CASE("expected_loss closed form and Monte-Carlo oracle") {
    Matrix sxy(1, 1);
    sxy(0, 0) = 0.8;
    const GaussianTask task({0.0}, {0.0}, SymMatrix::identity(1), sxy, SymMatrix::identity(1));
    CHECK(expected_loss(optimal_linear_model(task), task) == doctest::Approx(0.36).epsilon(1e-12));

    Matrix w(1, 1);
    w(0, 0) = 0.5;
    CHECK(expected_loss({w, {0.0}}, task) == doctest::Approx(0.45).epsilon(1e-12));

    PhiloxRng rng(32);
    const GaussianTask random = random_task(rng, 2);
    Matrix wr(1, 2);
    wr(0, 0) = trisk_test::uniform(rng, -1, 1);
    wr(0, 1) = trisk_test::uniform(rng, -1, 1);
    const LinearModel model{wr, {trisk_test::uniform(rng, -1, 1)}};

    const std::size_t n = 1000000;
    const Matrix samples = synth_gaussian_samples(random, n, 100);
    double mc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pred = wr(0, 0) * samples(i, 0) + wr(0, 1) * samples(i, 1) + model.b[0];
        mc += (samples(i, 2) - pred) * (samples(i, 2) - pred);
    }
    mc /= static_cast<double>(n);
    CHECK(std::abs(expected_loss(model, random) - mc) < 0.01 * (1.0 + mc));

    // no affine model beats the optimum
    const double best = expected_loss(optimal_linear_model(random), random);
    CHECK(expected_loss(model, random) >= best - 1e-12);
}

TEST_CASE("pushforward_law maps moments exactly") {
    Matrix w(1, 1);
    w(0, 0) = 0.5;
    const GaussianDist in({0.0}, SymMatrix::identity(1));
    const GaussianDist out = pushforward_law({w, {1.0}}, in);
    CHECK(out.mean[0] == doctest::Approx(1.0));
    CHECK(out.cov(0, 0) == doctest::Approx(0.25));

    PhiloxRng rng(33);
    const GaussianDist any(random_vector(rng, 3), random_spd(rng, 3, 0.5, 2.0));
    const GaussianDist same = pushforward_law({Matrix::identity(3), Vector(3, 0.0)}, any);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(same.mean[i] == doctest::Approx(any.mean[i]));
        for (std::size_t j = 0; j < 3; ++j) CHECK(same.cov(i, j) == doctest::Approx(any.cov(i, j)));
    }

    // rank-deficient map
    Matrix bad(2, 2);
    bad(0, 0) = 1.0;
    bad(1, 0) = 1.0;
    CHECK_THROWS_AS(
        pushforward_law({bad, Vector(2, 0.0)}, GaussianDist({0.0, 0.0}, SymMatrix::identity(2))),
        DegenerateOutputCovariance);
}

TEST_CASE("pushforward moments agree with sampling") {
    PhiloxRng rng(34);
    const GaussianDist in(random_vector(rng, 2), random_spd(rng, 2, 0.5, 2.0));
    Matrix w(2, 2);
    w(0, 0) = 1.2;
    w(0, 1) = -0.4;
    w(1, 0) = 0.3;
    w(1, 1) = 0.9;
    const LinearModel model{w, {0.5, -1.0}};
    const GaussianDist law = pushforward_law(model, in);

    const std::size_t n = 1000000;
    const Matrix xs = synth_gaussian_samples(in, n, 101);
    Vector mean(2, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t r = 0; r < 2; ++r)
            mean[r] += w(r, 0) * xs(i, 0) + w(r, 1) * xs(i, 1) + model.b[r];
    }
    for (double& m : mean) m /= static_cast<double>(n);
    CHECK(std::abs(mean[0] - law.mean[0]) < 0.01);
    CHECK(std::abs(mean[1] - law.mean[1]) < 0.01);
}

TEST_CASE("output_risk_kl on the worked fixtures") {
    const RiskDecomposition zero = output_risk_kl(kSource, kSource);
    CHECK(zero.variance_term == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(zero.bias_term == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(zero.total == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    const RiskDecomposition risk = output_risk_kl(kSource, kTarget);
    CHECK(std::abs(risk.variance_term - 0.3100) < 1e-4);
    CHECK(risk.bias_term == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(std::abs(risk.total - 0.3100) < 1e-4);

    // mean-shift-only pair: equal covariances, output mean moved by one
    const GaussianTask shifted = make_1d_task(0.5, 0.0, 1.0);
    const RiskDecomposition mean_shift = output_risk_kl(kSource, shifted);
    CHECK(mean_shift.variance_term == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(mean_shift.bias_term == doctest::Approx(1.0 / (2.0 * 0.25)).epsilon(1e-12));

    // degenerate pretrained signal
    CHECK_THROWS_AS(output_risk_kl(make_1d_task(0.0), kTarget), ZeroPretrainedSignal);
}

TEST_CASE("output_risk_w on the worked fixtures") {
    const RiskDecomposition zero = output_risk_w(kSource, kSource);
    CHECK(zero.total == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    const RiskDecomposition risk = output_risk_w(kSource, kTarget);
    CHECK(risk.variance_term == doctest::Approx(0.09).epsilon(1e-10));
    CHECK(risk.bias_term == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(risk.total == doctest::Approx(0.09).epsilon(1e-10));

    const GaussianTask shifted = make_1d_task(0.5, 0.0, 1.0);
    const RiskDecomposition mean_shift = output_risk_w(kSource, shifted);
    CHECK(mean_shift.variance_term == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(mean_shift.bias_term == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(mean_shift.total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("risk totals equal the divergences of the constructed law pair") {
    PhiloxRng rng(35);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t d = 1 + rng.next_below(5);
        const GaussianTask source = random_task(rng, d);
        const GaussianTask target = random_task(rng, d);

        const Gaussian1D law_t = predictive_law_1d(target);
        const Gaussian1D law_st = intermediate_law_1d(source, target);
        CHECK(std::abs(output_risk_kl(source, target).total - kl_gaussian_1d(law_t, law_st)) <
              1e-10);
        CHECK(std::abs(output_risk_w(source, target).total - w2sq_gaussian_1d(law_st, law_t)) <
              1e-10);
    }
}

TEST_CASE("regret identity and worked values") {
    const RegretReport aligned = regret(kSource, kTarget);
    CHECK(aligned.regret == doctest::Approx(0.09).epsilon(1e-10));
    CHECK(aligned.risk_w == doctest::Approx(0.09).epsilon(1e-10));
    CHECK(aligned.residual == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    const RegretReport flipped = regret(make_1d_task(-0.5), kTarget);
    CHECK(flipped.regret == doctest::Approx(1.69).epsilon(1e-10));
    CHECK(flipped.risk_w == doctest::Approx(0.09).epsilon(1e-10));
    CHECK(flipped.residual == doctest::Approx(1.60).epsilon(1e-10));

    const RegretReport self = regret(kSource, kSource);
    CHECK(self.regret == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(self.risk_w == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(self.residual == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("regret equals the loss difference and dominates the W2 risk") {
    PhiloxRng rng(36);
    for (int rep = 0; rep < 400; ++rep) {
        const std::size_t d = 1 + rng.next_below(5);
        const GaussianTask source = random_task(rng, d);
        const GaussianTask target = random_task(rng, d);
        const RegretReport rep_out = regret(source, target);

        const double loss_gap = expected_loss(optimal_linear_model(source), target) -
                                expected_loss(optimal_linear_model(target), target);
        CHECK(std::abs(rep_out.regret - loss_gap) <= 1e-9 * (1.0 + std::abs(loss_gap)));
        CHECK(rep_out.risk_w <= rep_out.regret + 1e-9);
        CHECK(std::abs(rep_out.regret - (rep_out.risk_w + rep_out.residual)) <=
              1e-9 * (1.0 + rep_out.regret));
        CHECK(rep_out.residual >= -1e-12);
    }
}

TEST_CASE("bias terms vanish together; variance terms vanish with matched weights") {
    PhiloxRng rng(37);
    for (int rep = 0; rep < 100; ++rep) {
        const std::size_t d = 1 + rng.next_below(4);
        const GaussianTask source = random_task(rng, d);
        const GaussianTask target = random_task(rng, d);

        // engineered mean alignment: mu_TY = mu_SY + w_S . (mu_TX - mu_SX)
        const LinearModel f_s = optimal_linear_model(source);
        Vector w_s(d);
        for (std::size_t j = 0; j < d; ++j) w_s[j] = f_s.w(0, j);
        GaussianTask aligned(target.mu_x,
                             {source.mu_y[0] + dot(w_s, vec_sub(target.mu_x, source.mu_x))},
                             target.sigma_x, target.sigma_xy, target.sigma_y);

        CHECK(output_risk_kl(source, aligned).bias_term <= 1e-18);
        CHECK(output_risk_w(source, aligned).bias_term <= 1e-18);
        // unaligned means keep every bias component strictly positive
        const double kl_bias = output_risk_kl(source, target).bias_term;
        const double w_bias = output_risk_w(source, target).bias_term;
        CHECK((kl_bias > 0.0) == (w_bias > 0.0));

        // matched weights: sigma_TXY = sigma_TX w_S makes w_T = w_S
        const Matrix sxy_matched = matmul(aligned.sigma_x.to_matrix(), transpose(f_s.w));
        GaussianTask matched(aligned.mu_x, aligned.mu_y, aligned.sigma_x, sxy_matched,
                             source.sigma_y);
        CHECK(output_risk_kl(source, matched).variance_term <= 1e-14);
        CHECK(output_risk_w(source, matched).variance_term <= 1e-14);
        CHECK(std::abs(regret(source, matched).residual) <= 1e-12);
    }
}

TEST_CASE("feature augmentation: conditional independence removes all risk") {
    PhiloxRng rng(38);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t d = 1 + rng.next_below(3);
        const std::size_t k = 1 + rng.next_below(2);
        const GaussianTask source = random_task(rng, d);

        // Z = A X + E with E independent of (X, Y) gives Cov(Z,Y|X) = 0
        Matrix a(k, d);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < d; ++j) a(i, j) = trisk_test::uniform(rng, -1, 1);
        const Matrix cross = matmul(source.sigma_x.to_matrix(), transpose(a));   // d x k
        const Matrix a_sx_at = matmul(a, cross);                                 // k x k
        SymMatrix sigma_add(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j)
                sigma_add.set(i, j,
                              a_sx_at(i, j) + (i == j ? trisk_test::uniform(rng, 0.3, 1.0) : 0.0));
        const Matrix sigma_add_y = matmul(a, source.sigma_xy);                   // k x 1

        const AugmentedTargetTask aug(source, random_vector(rng, k), cross, sigma_add, sigma_add_y,
                                      AugmentationMode::feature);
        CHECK(feature_augmented_risk(source, aug, RiskKind::kl).total <= 1e-10);
        CHECK(feature_augmented_risk(source, aug, RiskKind::w2).total <= 1e-10);
    }
}

TEST_CASE("feature augmentation worked fixture and uncorrelated case") {
    // joint (X, Z, Y) = [[1, 0, 0.5], [0, 1, 0.3], [0.5, 0.3, 1]]
    const GaussianTask source = make_1d_task(0.5);
    Matrix cross(1, 1);         // Cov(X, Z) = 0
    SymMatrix sigma_add = SymMatrix::identity(1);
    Matrix sigma_add_y(1, 1);   // Cov(Z, Y) = 0.3
    sigma_add_y(0, 0) = 0.3;
    const AugmentedTargetTask aug(source, {0.0}, cross, sigma_add, sigma_add_y,
                                  AugmentationMode::feature);

    const RiskDecomposition kl = feature_augmented_risk(source, aug, RiskKind::kl);
    CHECK(kl.bias_term == doctest::Approx(0.0));
    CHECK(std::abs(kl.total - 0.02627) < 1e-4);
    CHECK(kl.total == doctest::Approx(kl_variance_term(1.36)).epsilon(1e-12));

    // divergence oracle on the pushforward laws: explained variances 0.34 vs 0.25
    CHECK(std::abs(kl.total - kl_gaussian_1d({0.0, 0.34}, {0.0, 0.25})) < 1e-10);
    const RiskDecomposition w2 = feature_augmented_risk(source, aug, RiskKind::w2);
    CHECK(std::abs(w2.total - w2sq_gaussian_1d({0.0, 0.34}, {0.0, 0.25})) < 1e-10);

    // feature uncorrelated with X and Y adds no risk
    Matrix no_y(1, 1);
    const AugmentedTargetTask inert(source, {0.0}, cross, sigma_add, no_y,
                                    AugmentationMode::feature);
    CHECK(feature_augmented_risk(source, inert, RiskKind::kl).total <= 1e-14);
    CHECK(feature_augmented_risk(source, inert, RiskKind::w2).total <= 1e-14);

    // base block must match the source
    const GaussianTask other = make_1d_task(0.4);
    CHECK_THROWS_AS(feature_augmented_risk(other, aug, RiskKind::kl), StructureMismatch);
}

TEST_CASE("feature augmentation never hurts the optimal model") {
    PhiloxRng rng(39);
    for (int rep = 0; rep < 500; ++rep) {
        const std::size_t d = 1 + rng.next_below(3);
        const std::size_t k = 1 + rng.next_below(2);
        const GaussianTask source = random_task(rng, d);

        Matrix a(k, d);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < d; ++j) a(i, j) = trisk_test::uniform(rng, -1, 1);
        const Matrix cross = matmul(source.sigma_x.to_matrix(), transpose(a));
        const Matrix a_sx_at = matmul(a, cross);
        SymMatrix sigma_add(k);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j)
                sigma_add.set(i, j,
                              a_sx_at(i, j) + (i == j ? trisk_test::uniform(rng, 0.5, 1.5) : 0.0));
        // correlate Z with Y through X plus a bounded extra tilt
        Matrix sigma_add_y = matmul(a, source.sigma_xy);
        for (std::size_t i = 0; i < k; ++i)
            sigma_add_y(i, 0) += trisk_test::uniform(rng, -0.1, 0.1);

        AugmentedTargetTask aug = [&]() -> AugmentedTargetTask {
            try {
                return {source, random_vector(rng, k), cross, sigma_add, sigma_add_y,
                        AugmentationMode::feature};
            } catch (const NotSPD&) {
                // tilt too aggressive for this draw; use the exact-CI cross covariance
                return {source, random_vector(rng, k), cross, sigma_add,
                        matmul(a, source.sigma_xy), AugmentationMode::feature};
            }
        }();

        const GaussianTask joint = aug.to_joint_task();
        const double loss_opt = expected_loss(optimal_linear_model(joint), joint);
        const double loss_src = expected_loss(padded_source_model(source, k), joint);
        CHECK(loss_opt <= loss_src + 1e-12);
    }
}

TEST_CASE("output augmentation: optimal init, bias offset, rank deficiency") {
    // d = 2, sigma_SX = I, sigma_SXY = (0.5, 0), added output with Cov(X, Y_A) = (0, 0.3)
    Matrix sxy(2, 1);
    sxy(0, 0) = 0.5;
    const GaussianTask source({0.0, 0.0}, {0.0}, SymMatrix::identity(2), sxy,
                              SymMatrix::identity(1));
    Matrix add_x(2, 1);
    add_x(1, 0) = 0.3;
    const SymMatrix add_var = SymMatrix::identity(1);
    Matrix add_y(1, 1);   // Cov(Y_A, Y_S) = 0
    const AugmentedTargetTask aug(source, {0.0}, add_x, add_var, add_y, AugmentationMode::output);

    // optimal init: w0 = (sigma_SX^-1 sigma_A,XY)^T, b0 = mu_AY - w0 mu_SX
    Matrix w0(1, 2);
    w0(0, 1) = 0.3;
    const LinearModel init_opt{w0, {0.0}};
    CHECK(output_augmented_risk(source, aug, init_opt, RiskKind::kl).total <= 1e-12);
    CHECK(output_augmented_risk(source, aug, init_opt, RiskKind::w2).total <= 1e-12);

    // same weights, intercept off by 0.3: KL = 0.5, all bias
    const LinearModel init_off{w0, {0.3}};
    const RiskDecomposition kl = output_augmented_risk(source, aug, init_off, RiskKind::kl);
    CHECK(std::abs(kl.total - 0.5) < 1e-6);
    CHECK(kl.bias_term == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(kl.variance_term == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));

    // multivariate-KL oracle on the explicitly built law pair
    SymMatrix cov(2);
    cov.set(0, 0, 0.25);
    cov.set(1, 1, 0.09);
    const GaussianDist law_target({0.0, 0.0}, cov);
    const GaussianDist law_inter({0.0, 0.3}, cov);
    CHECK(std::abs(kl.total - kl_gaussian_multi(law_target, law_inter)) < 1e-10);

    const RiskDecomposition w2 = output_augmented_risk(source, aug, init_off, RiskKind::w2);
    CHECK(std::abs(w2.total - w2sq_gaussian_multi(law_target, law_inter)) < 1e-9);
    CHECK(w2.bias_term == doctest::Approx(0.09).epsilon(1e-9));

    // zero init weights give a singular intermediate covariance
    const LinearModel init_zero{Matrix(1, 2), {0.0}};
    CHECK_THROWS_AS(output_augmented_risk(source, aug, init_zero, RiskKind::kl), NotSPD);
}

TEST_CASE("the variance-ratio penalty is zero at one, positive elsewhere, convex") {
    CHECK(kl_variance_term(1.0) == doctest::Approx(0.0));
    Vector grid;
    for (double x = 0.01; x <= 100.0; x *= 1.17) grid.push_back(x);
    for (double x : grid) {
        if (std::abs(x - 1.0) > 1e-9) CHECK(kl_variance_term(x) > 0.0);
    }
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double mid = 0.5 * (grid[i] + grid[i + 1]);
        CHECK(kl_variance_term(mid) <=
              0.5 * (kl_variance_term(grid[i]) + kl_variance_term(grid[i + 1])) + 1e-12);
    }
}
