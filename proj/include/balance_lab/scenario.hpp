#ifndef BALANCE_LAB_SCENARIO_HPP
#define BALANCE_LAB_SCENARIO_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "balance_lab/config.hpp"

namespace balance_lab {

/// One summary check: pass is value <= bound, or value >= bound for
/// lower-bound checks. The pass column is what decides the exit code.
struct CheckRow {
    std::string name;
    double value = 0.0;
    double bound = 0.0;
    bool lower_bound = false;

    bool pass() const { return lower_bound ? value >= bound : value <= bound; }
};

struct ScenarioResult {
    int exit_code = 0;  // 0 = all checks pass, 2 = some check failed
    std::vector<CheckRow> checks;
    std::vector<std::filesystem::path> outputs;
};

/// Executes the scenario's operations in file order, writing one CSV per
/// operation plus summary.csv under out_dir. kind_filter restricts execution
/// to the listed op kinds (empty = run everything). Throws ConfigError /
/// DomainError on invalid input; on a throw mid-run, files written so far
/// are renamed with a .partial suffix before the error propagates.
ScenarioResult run_scenario(const Config& cfg, const std::filesystem::path& out_dir,
                            const std::vector<std::string>& kind_filter = {});

}  // namespace balance_lab

#endif
