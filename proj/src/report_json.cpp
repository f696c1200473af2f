#include "dqls/report_json.hpp"

#include <cmath>
#include <string>

namespace dqls {

namespace {

nlohmann::json state_array(const QuantumState &state) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index k = 0; k < state.amplitudes().size(); ++k) {
        const Complex a = state.amplitudes()(k);
        out.push_back({a.real(), a.imag()});
    }
    return out;
}

} // namespace

nlohmann::json to_json(const SolverConfig &config) {
    return {
        {"kappa", config.kappa},
        {"mu", config.mu},
        {"epsilon", config.epsilon},
        {"gamma", config.gamma},
        {"t_bits", config.bits},
        {"mode", std::string(to_string(config.mode))},
        {"filter", std::string(to_string(config.filter))},
        {"ramp", std::string(to_string(config.ramp))},
        {"backend", std::string(to_string(config.backend))},
        {"repetitions", config.repetitions},
        {"c_slack", config.c_slack},
        {"lipschitz_c", config.lipschitz_c},
        {"normalize", config.normalize},
        {"seed", config.seed},
        {"memory_guard", config.memory_guard},
    };
}

nlohmann::json to_json(const ResolvedParameters &params) {
    return {
        {"kappa", params.kappa},
        {"mu", params.mu},
        {"gamma", params.gamma},
        {"epsilon", params.epsilon},
        {"sign_budget", params.sign_budget},
        {"delta", params.delta},
        {"t_bits", params.bits},
        {"scale", params.scale},
        {"frobenius_norm", params.frobenius},
        {"shifted_frobenius_norm", params.shifted_frobenius},
        {"spectral_norm", params.spectral_norm},
    };
}

nlohmann::json to_json(const SolveReport &report) {
    nlohmann::json signs = nlohmann::json::array();
    for (const auto &s : report.signs) {
        signs.push_back({
            {"lambda_true", s.lambda_true},
            {"lambda_hat", s.lambda_hat},
            {"flag", s.flag ? 1 : 0},
            {"correct", s.correct},
        });
    }
    return {
        {"config", to_json(report.config)},
        {"parameters", to_json(report.parameters)},
        {"fidelity", report.fidelity},
        {"distance", report.distance},
        {"post_selection_probability", report.post_selection_probability},
        {"repetitions_raw", report.repetitions_raw},
        {"repetitions_amplified", report.repetitions_amplified},
        {"walk_applications", report.walk_applications},
        {"signs", signs},
        {"output_state", state_array(report.output_state)},
        {"true_state", state_array(report.true_state)},
    };
}

nlohmann::json to_json(const QsveOutput &output) {
    nlohmann::json comps = nlohmann::json::array();
    for (const auto &c : output.components) {
        const std::vector<double> reg = c.register_probs();
        std::size_t mode = 0;
        for (std::size_t s = 1; s < reg.size(); ++s) {
            if (reg[s] > reg[mode]) {
                mode = s;
            }
        }
        comps.push_back({
            {"index", c.index},
            {"sigma", c.sigma},
            {"theta", c.theta},
            {"weight", c.weight},
            {"most_likely_register", mode},
            {"most_likely_sigma_bar", output.register_sigma(mode)},
            {"register_probs", reg},
        });
    }
    nlohmann::json shots = nlohmann::json::array();
    for (const auto &s : output.shots) {
        shots.push_back({{"component", s.component}, {"sigma_bar", s.sigma_bar}});
    }
    nlohmann::json out = {
        {"t_bits", output.bits},
        {"frobenius_norm", output.frobenius},
        {"backend", std::string(output.backend == QsveBackend::exact_spectral ? "exact-spectral" : "statevector")},
        {"walk_applications", output.walk_applications},
        {"components", comps},
        {"shots", shots},
    };
    if (!std::isnan(output.uncompute_fidelity)) {
        out["uncompute_fidelity"] = output.uncompute_fidelity;
    }
    return out;
}

} // namespace dqls
