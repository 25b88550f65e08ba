#include "trisk/task_io.hpp"

#include <fstream>

#include "trisk/format.hpp"

namespace trisk {

namespace {

using nlohmann::json;

Vector vector_from_json(const json& node) {
    Vector v;
    for (const auto& x : node) v.push_back(x.get<double>());
    return v;
}

Matrix matrix_from_json(const json& node) {
    const std::size_t rows = node.size();
    const std::size_t cols = rows == 0 ? 0 : node.front().size();
    Matrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (node[i].size() != cols) throw ParseError("task spec: ragged matrix");
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = node[i][j].get<double>();
    }
    return m;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (double x : v) out.push_back(round_number(x));
    return out;
}

json decomposition_to_json(const RiskDecomposition& d) {
    return {{"variance_term", round_number(d.variance_term)},
            {"bias_term", round_number(d.bias_term)},
            {"total", round_number(d.total)}};
}

}  // namespace

GaussianTask task_from_json(const json& doc) {
    return {vector_from_json(doc.at("mu_x")), vector_from_json(doc.at("mu_y")),
            SymMatrix::from_matrix(matrix_from_json(doc.at("sigma_x"))),
            matrix_from_json(doc.at("sigma_xy")),
            SymMatrix::from_matrix(matrix_from_json(doc.at("sigma_y")))};
}

TaskSpec load_task_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open task spec " + path);
    json doc = json::parse(in, nullptr, true, true);

    GaussianTask source = task_from_json(doc.at("source"));
    GaussianTask target = task_from_json(doc.at("target"));

    std::optional<AugmentedTargetTask> augmentation;
    if (doc.contains("augmentation")) {
        const json& a = doc["augmentation"];
        const std::string mode = a.at("mode").get<std::string>();
        if (mode != "feature" && mode != "output")
            throw ParseError("task spec: augmentation mode must be feature or output");
        augmentation.emplace(target, vector_from_json(a.at("mu_add")),
                             matrix_from_json(a.at("sigma_add_x")),
                             SymMatrix::from_matrix(matrix_from_json(a.at("sigma_add"))),
                             matrix_from_json(a.at("sigma_add_y")),
                             mode == "feature" ? AugmentationMode::feature
                                               : AugmentationMode::output);
    }

    std::optional<LinearModel> init;
    if (doc.contains("init")) {
        init = LinearModel{matrix_from_json(doc["init"].at("w")),
                           vector_from_json(doc["init"].at("b"))};
    }
    return {std::move(source), std::move(target), std::move(augmentation), std::move(init)};
}

json gaussian_risk_report(const TaskSpec& spec) {
    json report;

    if (spec.target.dim_y == 1 && spec.source.dim_y == 1 &&
        spec.source.dim_x == spec.target.dim_x) {
        report["risk_kl"] = decomposition_to_json(output_risk_kl(spec.source, spec.target));
        report["risk_w"] = decomposition_to_json(output_risk_w(spec.source, spec.target));

        const RegretReport reg = regret(spec.source, spec.target);
        report["regret"] = {{"regret", round_number(reg.regret)},
                            {"risk_w", round_number(reg.risk_w)},
                            {"residual", round_number(reg.residual)}};

        const LinearModel f_source = optimal_linear_model(spec.source);
        const LinearModel f_target = optimal_linear_model(spec.target);
        report["expected_loss"] = {
            {"pretrained_on_target", round_number(expected_loss(f_source, spec.target))},
            {"optimal_on_target", round_number(expected_loss(f_target, spec.target))}};
        Vector w_source(spec.source.dim_x);
        for (std::size_t j = 0; j < spec.source.dim_x; ++j) w_source[j] = f_source.w(0, j);
        report["pretrained_model"] = {{"w", vector_to_json(w_source)},
                                      {"b", round_number(f_source.b[0])}};
    }

    if (spec.augmentation) {
        const AugmentedTargetTask& aug = *spec.augmentation;
        json block;
        if (aug.mode == AugmentationMode::feature) {
            block["mode"] = "feature";
            block["risk_kl"] =
                decomposition_to_json(feature_augmented_risk(spec.source, aug, RiskKind::kl));
            block["risk_w"] =
                decomposition_to_json(feature_augmented_risk(spec.source, aug, RiskKind::w2));
        } else {
            if (!spec.init)
                throw ParseError("task spec: output augmentation requires an init block");
            block["mode"] = "output";
            block["risk_kl"] = decomposition_to_json(
                output_augmented_risk(spec.source, aug, *spec.init, RiskKind::kl));
            block["risk_w"] = decomposition_to_json(
                output_augmented_risk(spec.source, aug, *spec.init, RiskKind::w2));
        }
        report["augmented"] = block;
    }
    return report;
}

}  // namespace trisk
