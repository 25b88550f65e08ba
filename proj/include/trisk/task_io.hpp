// JSON serialization for Gaussian task specifications and risk reports.
//
// Task spec document:
// {
//   "source": {"mu_x": [...], "mu_y": [...], "sigma_x": [[...]],
//              "sigma_xy": [[...]], "sigma_y": [[...]]},
//   "target": {... same fields ...},
//   "augmentation": {"mode": "feature"|"output", "mu_add": [...],
//                    "sigma_add_x": [[...]], "sigma_add": [[...]],
//                    "sigma_add_y": [[...]]},            // optional
//   "init": {"w": [[...]], "b": [...]}                   // optional, output mode
// }
// sigma_xy is (input x output); augmentation blocks follow the conventions in
// gaussian.hpp.
#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "trisk/gaussian.hpp"

namespace trisk {

struct TaskSpec {
    GaussianTask source;
    GaussianTask target;
    std::optional<AugmentedTargetTask> augmentation;
    std::optional<LinearModel> init;
};

GaussianTask task_from_json(const nlohmann::json& doc);

TaskSpec load_task_spec(const std::string& path);

// Full risk report for a spec: KL and W2 output risks with decompositions,
// the regret identity, expected losses, and the augmented risks when an
// augmentation block is present. All numbers rounded to the repo's 12-digit
// output grid.
nlohmann::json gaussian_risk_report(const TaskSpec& spec);

}  // namespace trisk
