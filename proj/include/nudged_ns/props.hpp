#pragma once

#include "nudged_ns/config.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace nudged_ns {

struct PropertyResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct PropsReport {
    std::vector<PropertyResult> results;
    bool all_passed() const;
    const PropertyResult* find(const std::string& name) const;
    /// One `PASS|FAIL name: detail` line per property.
    std::string to_text() const;
};

enum class Fault {
    none,
    mass,  // perturb one off-diagonal mass-matrix entry
};

Fault parse_fault(const std::string& name);

struct PropsOptions {
    std::uint64_t seed = 20240917;
    Fault fault = Fault::none;
    int long_steps = 2000;
};

/// Run every property suite. Each property is isolated: an exception counts
/// as a failure of that property only.
PropsReport run_properties(const PropsOptions& opt, std::ostream* log = nullptr);

/// Property runner for the command line; writes props_report.txt.
PropsReport run_props(const Config& cfg, std::ostream* log = nullptr);

} // namespace nudged_ns
