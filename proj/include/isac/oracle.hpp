#pragma once

#include <string>
#include <vector>

namespace isac {

struct OracleCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Noiseless, on-grid end-to-end checks of the reference scenario. Each check
/// compares the receiver output with quantities known in closed form.
std::vector<OracleCheck> run_oracles();

}  // namespace isac
