#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dqls {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct VerifyOptions {
    std::uint64_t seed = 20240601;
};

/// Dense random symmetric matrices (G + G^T) / 2 with n cycling through 2..8.
std::vector<Eigen::MatrixXd> random_symmetric_fixtures(std::size_t count, std::uint64_t seed);

CheckResult check_factorization(const VerifyOptions &options);
CheckResult check_walk_angles(const VerifyOptions &options);
CheckResult check_qpe_equivalence(const VerifyOptions &options);
CheckResult check_qsve_guarantee(const VerifyOptions &options);
CheckResult check_solver_fidelity(const VerifyOptions &options);
CheckResult check_sign_recovery(const VerifyOptions &options);
CheckResult check_error_scaling(const VerifyOptions &options);
CheckResult check_post_selection(const VerifyOptions &options);
CheckResult check_query_counts(const VerifyOptions &options);
CheckResult check_lipschitz(const VerifyOptions &options);

/// The ten acceptance criteria in order.
std::vector<CheckResult> acceptance_checks(const VerifyOptions &options);

/// Store, state, solver and harness invariants not covered by the acceptance list.
std::vector<CheckResult> invariant_checks(const VerifyOptions &options);

} // namespace dqls
