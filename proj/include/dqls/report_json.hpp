#pragma once

#include <nlohmann/json.hpp>

#include "dqls/linear_solver.hpp"
#include "dqls/qsve.hpp"

namespace dqls {

nlohmann::json to_json(const SolverConfig &config);
nlohmann::json to_json(const ResolvedParameters &params);

/**
 * Stable document with keys config, fidelity, distance,
 * post_selection_probability, repetitions_raw, repetitions_amplified,
 * walk_applications, signs and output_state. `parameters` and `true_state`
 * are added alongside.
 */
nlohmann::json to_json(const SolveReport &report);

nlohmann::json to_json(const QsveOutput &output);

} // namespace dqls
