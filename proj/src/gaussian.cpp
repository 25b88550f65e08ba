#include "trisk/gaussian.hpp"

#include <cmath>
#include <utility>

namespace trisk {

GaussianTask::GaussianTask(Vector mu_x_, Vector mu_y_, SymMatrix sigma_x_, Matrix sigma_xy_,
                           SymMatrix sigma_y_)
    : dim_x(mu_x_.size()),
      dim_y(mu_y_.size()),
      mu_x(std::move(mu_x_)),
      mu_y(std::move(mu_y_)),
      sigma_x(std::move(sigma_x_)),
      sigma_xy(std::move(sigma_xy_)),
      sigma_y(std::move(sigma_y_)) {
    if (dim_x == 0 || dim_y == 0) throw DimensionMismatch("GaussianTask: empty block");
    if (sigma_x.dim() != dim_x || sigma_y.dim() != dim_y || sigma_xy.rows() != dim_x ||
        sigma_xy.cols() != dim_y)
        throw DimensionMismatch("GaussianTask: block shapes are inconsistent");
    if (!is_spd(joint_covariance())) throw NotSPD("GaussianTask: joint covariance is not SPD");
}

SymMatrix GaussianTask::joint_covariance() const {
    const std::size_t n = dim_x + dim_y;
    SymMatrix joint(n);
    for (std::size_t i = 0; i < dim_x; ++i)
        for (std::size_t j = i; j < dim_x; ++j) joint.set(i, j, sigma_x(i, j));
    for (std::size_t i = 0; i < dim_x; ++i)
        for (std::size_t j = 0; j < dim_y; ++j) joint.set(i, dim_x + j, sigma_xy(i, j));
    for (std::size_t i = 0; i < dim_y; ++i)
        for (std::size_t j = i; j < dim_y; ++j) joint.set(dim_x + i, dim_x + j, sigma_y(i, j));
    return joint;
}

AugmentedTargetTask::AugmentedTargetTask(GaussianTask base_, Vector mu_add_, Matrix sigma_add_x_,
                                         SymMatrix sigma_add_, Matrix sigma_add_y_,
                                         AugmentationMode mode_)
    : base(std::move(base_)),
      added_dim(mu_add_.size()),
      mu_add(std::move(mu_add_)),
      sigma_add_x(std::move(sigma_add_x_)),
      sigma_add(std::move(sigma_add_)),
      sigma_add_y(std::move(sigma_add_y_)),
      mode(mode_) {
    if (added_dim == 0) throw DimensionMismatch("AugmentedTargetTask: empty added block");
    if (sigma_add.dim() != added_dim || sigma_add_x.rows() != base.dim_x ||
        sigma_add_x.cols() != added_dim || sigma_add_y.rows() != added_dim ||
        sigma_add_y.cols() != base.dim_y)
        throw DimensionMismatch("AugmentedTargetTask: block shapes are inconsistent");
    // Joint SPD validation happens inside to_joint_task's constructor.
    (void)to_joint_task();
}

GaussianTask AugmentedTargetTask::to_joint_task() const {
    const std::size_t d = base.dim_x;
    const std::size_t l = base.dim_y;
    const std::size_t k = added_dim;

    if (mode == AugmentationMode::feature) {
        // inputs (X, Z), outputs Y
        Vector mu_x(d + k);
        for (std::size_t i = 0; i < d; ++i) mu_x[i] = base.mu_x[i];
        for (std::size_t i = 0; i < k; ++i) mu_x[d + i] = mu_add[i];

        SymMatrix sx(d + k);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j) sx.set(i, j, base.sigma_x(i, j));
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < k; ++j) sx.set(i, d + j, sigma_add_x(i, j));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i; j < k; ++j) sx.set(d + i, d + j, sigma_add(i, j));

        Matrix sxy(d + k, l);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < l; ++j) sxy(i, j) = base.sigma_xy(i, j);
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < l; ++j) sxy(d + i, j) = sigma_add_y(i, j);

        return {mu_x, base.mu_y, sx, sxy, base.sigma_y};
    }

    // output mode: inputs X, outputs (Y, Y_A)
    Vector mu_y(l + k);
    for (std::size_t i = 0; i < l; ++i) mu_y[i] = base.mu_y[i];
    for (std::size_t i = 0; i < k; ++i) mu_y[l + i] = mu_add[i];

    Matrix sxy(d, l + k);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < l; ++j) sxy(i, j) = base.sigma_xy(i, j);
        for (std::size_t j = 0; j < k; ++j) sxy(i, l + j) = sigma_add_x(i, j);
    }

    SymMatrix sy(l + k);
    for (std::size_t i = 0; i < l; ++i)
        for (std::size_t j = i; j < l; ++j) sy.set(i, j, base.sigma_y(i, j));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < l; ++j) sy.set(j, l + i, sigma_add_y(i, j));
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i; j < k; ++j) sy.set(l + i, l + j, sigma_add(i, j));

    return {base.mu_x, mu_y, base.sigma_x, sxy, sy};
}

double kl_variance_term(double ratio) { return 0.5 * (ratio - std::log(ratio) - 1.0); }

LinearModel optimal_linear_model(const GaussianTask& task) {
    const Matrix w_cols = spd_solve(task.sigma_x, task.sigma_xy);   // d x l
    const Matrix w = transpose(w_cols);                             // l x d
    Vector b = vec_sub(task.mu_y, matvec(w, task.mu_x));
    return {w, std::move(b)};
}

double expected_loss(const LinearModel& model, const GaussianTask& task) {
    if (task.dim_y != 1 || model.dim_out() != 1)
        throw DimensionMismatch("expected_loss: scalar-output task required");
    if (model.dim_in() != task.dim_x)
        throw DimensionMismatch("expected_loss: model/task input dimensions differ");

    Vector w(task.dim_x);
    for (std::size_t j = 0; j < task.dim_x; ++j) w[j] = model.w(0, j);

    const double bias = task.mu_y[0] - dot(w, task.mu_x) - model.b[0];
    double cross = 0.0;
    for (std::size_t j = 0; j < task.dim_x; ++j) cross += w[j] * task.sigma_xy(j, 0);
    const double quad = dot(w, matvec(task.sigma_x.to_matrix(), w));
    return bias * bias + task.sigma_y(0, 0) - 2.0 * cross + quad;
}

GaussianDist pushforward_law(const LinearModel& model, const GaussianDist& input) {
    if (model.dim_in() != input.dim())
        throw DimensionMismatch("pushforward_law: model/input dimensions differ");
    Vector mean = vec_add(matvec(model.w, input.mean), model.b);
    const Matrix cov = matmul(matmul(model.w, input.cov.to_matrix()), transpose(model.w));
    SymMatrix sym = SymMatrix::from_matrix(cov);
    if (!is_spd(sym))
        throw DegenerateOutputCovariance("pushforward_law: image covariance is rank deficient");
    return {std::move(mean), std::move(sym)};
}

namespace {

// Pretrained weight vector of a scalar-output task.
Vector scalar_weights(const GaussianTask& task) {
    if (task.dim_y != 1) throw DimensionMismatch("scalar-output task required");
    Matrix col(task.dim_x, 1);
    for (std::size_t i = 0; i < task.dim_x; ++i) col(i, 0) = task.sigma_xy(i, 0);
    const Matrix w = spd_solve(task.sigma_x, col);
    Vector out(task.dim_x);
    for (std::size_t i = 0; i < task.dim_x; ++i) out[i] = w(i, 0);
    return out;
}

// Weighted mean mismatch mu_TY - mu_SY - w_S . (mu_TX - mu_SX); its square is
// the bias component shared by both risks and the regret.
double bias_gap(const GaussianTask& source, const GaussianTask& target, const Vector& w_source) {
    return target.mu_y[0] - source.mu_y[0] - dot(w_source, vec_sub(target.mu_x, source.mu_x));
}

double quad_form(const SymMatrix& a, const Vector& x) {
    return dot(x, matvec(a.to_matrix(), x));
}

void check_matching_inputs(const GaussianTask& source, const GaussianTask& target) {
    if (source.dim_x != target.dim_x)
        throw DimensionMismatch("source/target input dimensions differ");
}

}  // namespace

Gaussian1D predictive_law_1d(const GaussianTask& task) {
    const Vector w = scalar_weights(task);
    // mean of w.X + b collapses to mu_Y; variance is the explained part.
    return {task.mu_y[0], quad_form(task.sigma_x, w)};
}

Gaussian1D intermediate_law_1d(const GaussianTask& source, const GaussianTask& target) {
    check_matching_inputs(source, target);
    const Vector w_s = scalar_weights(source);
    const double var = quad_form(target.sigma_x, w_s);
    if (var <= spd_tolerance(target.sigma_x))
        throw ZeroPretrainedSignal("intermediate law is degenerate: pretrained weights carry no variance");
    const double b_s = source.mu_y[0] - dot(w_s, source.mu_x);
    return {dot(w_s, target.mu_x) + b_s, var};
}

RiskDecomposition output_risk_kl(const GaussianTask& source, const GaussianTask& target) {
    check_matching_inputs(source, target);
    const Vector w_s = scalar_weights(source);
    const Vector w_t = scalar_weights(target);
    const double var_st = quad_form(target.sigma_x, w_s);
    if (var_st <= spd_tolerance(target.sigma_x))
        throw ZeroPretrainedSignal("output_risk_kl: pretrained weights carry no variance");
    const double var_t = quad_form(target.sigma_x, w_t);
    if (!(var_t > 0.0))
        throw NonPositiveVariance("output_risk_kl: optimal target predictive law is degenerate");

    const double gap = bias_gap(source, target, w_s);
    RiskDecomposition out;
    out.variance_term = kl_variance_term(var_t / var_st);
    out.bias_term = gap * gap / (2.0 * var_st);
    out.total = out.variance_term + out.bias_term;
    return out;
}

RiskDecomposition output_risk_w(const GaussianTask& source, const GaussianTask& target) {
    check_matching_inputs(source, target);
    const Vector w_s = scalar_weights(source);
    const Vector w_t = scalar_weights(target);
    const double sd_st = std::sqrt(quad_form(target.sigma_x, w_s));
    const double sd_t = std::sqrt(quad_form(target.sigma_x, w_t));

    const double gap = bias_gap(source, target, w_s);
    RiskDecomposition out;
    out.variance_term = (sd_st - sd_t) * (sd_st - sd_t);
    out.bias_term = gap * gap;
    out.total = out.variance_term + out.bias_term;
    return out;
}

RegretReport regret(const GaussianTask& source, const GaussianTask& target) {
    check_matching_inputs(source, target);
    const Vector w_s = scalar_weights(source);
    const Vector w_t = scalar_weights(target);

    const double gap = bias_gap(source, target, w_s);
    const double quad_diff = quad_form(target.sigma_x, vec_sub(w_t, w_s));

    RegretReport rep;
    rep.regret = quad_diff + gap * gap;
    rep.risk_w = output_risk_w(source, target).total;
    const double n_t = std::sqrt(quad_form(target.sigma_x, w_t));
    const double n_s = std::sqrt(quad_form(target.sigma_x, w_s));
    const double inner = dot(w_t, matvec(target.sigma_x.to_matrix(), w_s));
    rep.residual = 2.0 * (n_t * n_s - inner);
    return rep;
}

namespace {

void check_same_base(const GaussianTask& source, const GaussianTask& base) {
    const double scale = 1e-12 * (1.0 + std::max(base.joint_covariance().max_abs(),
                                                 source.joint_covariance().max_abs()));
    if (source.dim_x != base.dim_x || source.dim_y != base.dim_y)
        throw StructureMismatch("augmented target base block does not match the source dimensions");
    auto close = [scale](double a, double b) { return std::abs(a - b) <= scale; };
    for (std::size_t i = 0; i < source.dim_x; ++i) {
        if (!close(source.mu_x[i], base.mu_x[i]))
            throw StructureMismatch("augmented target base mean differs from the source");
        for (std::size_t j = 0; j < source.dim_x; ++j)
            if (!close(source.sigma_x(i, j), base.sigma_x(i, j)))
                throw StructureMismatch("augmented target base input covariance differs from the source");
        for (std::size_t j = 0; j < source.dim_y; ++j)
            if (!close(source.sigma_xy(i, j), base.sigma_xy(i, j)))
                throw StructureMismatch("augmented target base cross covariance differs from the source");
    }
    for (std::size_t i = 0; i < source.dim_y; ++i) {
        if (!close(source.mu_y[i], base.mu_y[i]))
            throw StructureMismatch("augmented target base output mean differs from the source");
        for (std::size_t j = 0; j < source.dim_y; ++j)
            if (!close(source.sigma_y(i, j), base.sigma_y(i, j)))
                throw StructureMismatch("augmented target base output covariance differs from the source");
    }
}

}  // namespace

RiskDecomposition feature_augmented_risk(const GaussianTask& source,
                                         const AugmentedTargetTask& target, RiskKind kind) {
    if (target.mode != AugmentationMode::feature)
        throw StructureMismatch("feature_augmented_risk: target is not feature-augmented");
    if (source.dim_y != 1) throw DimensionMismatch("feature_augmented_risk: scalar output required");
    check_same_base(source, target.base);

    const GaussianTask joint = target.to_joint_task();
    const double num = quad_form(joint.sigma_x, scalar_weights(joint));     // explained target variance
    const double den = quad_form(source.sigma_x, scalar_weights(source));   // explained source variance
    if (den <= spd_tolerance(source.sigma_x))
        throw ZeroPretrainedSignal("feature_augmented_risk: pretrained weights carry no variance");

    RiskDecomposition out;
    out.bias_term = 0.0;
    if (kind == RiskKind::kl) {
        out.variance_term = kl_variance_term(num / den);
    } else {
        const double diff = std::sqrt(num) - std::sqrt(den);
        out.variance_term = diff * diff;
    }
    out.total = out.variance_term;
    return out;
}

RiskDecomposition output_augmented_risk(const GaussianTask& source,
                                        const AugmentedTargetTask& target,
                                        const LinearModel& init, RiskKind kind) {
    if (target.mode != AugmentationMode::output)
        throw StructureMismatch("output_augmented_risk: target is not output-augmented");
    check_same_base(source, target.base);
    const std::size_t d = source.dim_x;
    const std::size_t l = source.dim_y;
    const std::size_t k = target.added_dim;
    if (init.dim_in() != d || init.dim_out() != k)
        throw DimensionMismatch("output_augmented_risk: init must map inputs to the added block");

    const GaussianTask joint = target.to_joint_task();
    const LinearModel target_opt = optimal_linear_model(joint);
    const GaussianDist law_target = pushforward_law(target_opt, joint.input_law());

    // Intermediate model stacks the pretrained map over the initialization.
    const LinearModel source_opt = optimal_linear_model(source);
    Matrix w_stack(l + k, d);
    Vector b_stack(l + k);
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = 0; j < d; ++j) w_stack(i, j) = source_opt.w(i, j);
        b_stack[i] = source_opt.b[i];
    }
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = 0; j < d; ++j) w_stack(l + i, j) = init.w(i, j);
        b_stack[l + i] = init.b[i];
    }

    GaussianDist law_intermediate = [&] {
        try {
            return pushforward_law(LinearModel{w_stack, b_stack}, joint.input_law());
        } catch (const DegenerateOutputCovariance&) {
            throw NotSPD("output_augmented_risk: intermediate law covariance is singular");
        }
    }();

    RiskDecomposition out;
    const Vector dm = vec_sub(law_target.mean, law_intermediate.mean);
    if (kind == RiskKind::kl) {
        out.total = kl_gaussian_multi(law_target, law_intermediate);
        out.bias_term = 0.5 * dot(dm, spd_solve(law_intermediate.cov, dm));
        out.variance_term = out.total - out.bias_term;
    } else {
        out.total = w2sq_gaussian_multi(law_target, law_intermediate);
        out.bias_term = dot(dm, dm);
        out.variance_term = out.total - out.bias_term;
    }
    // Rounding can leave a tiny negative variance residue when the laws match.
    if (out.variance_term < 0.0 && out.variance_term > -1e-12) out.variance_term = 0.0;
    return out;
}

}  // namespace trisk
