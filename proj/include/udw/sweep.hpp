#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "udw/concurrence.hpp"

namespace udw {

// Flat `key = value` configuration with '#' comments. Values keep their line
// numbers so later validation can point at the offending entry.
struct ConfigEntry {
    std::string value;
    int line = 0;
};
using ConfigMap = std::map<std::string, ConfigEntry>;

ConfigMap parse_config(std::istream& in);
ConfigMap parse_config_file(const std::string& path);

// Scenario keys: OmegaT, lambda, alpha | beta | log10_beta (exactly one), theta,
// spacetime (minkowski | shockwave), sigma_over_T, L_over_T, dt_over_T,
// zA_over_T, zB_over_T, aT, u0_over_T, regime. All lengths in units of T.
Scenario scenario_from_config(const ConfigMap& cfg);

struct Axis {
    std::string name;
    double min = 0.0, max = 0.0;
    int steps = 2;
    double value(int i) const;
};

inline const std::vector<std::string>& axis_parameters() {
    static const std::vector<std::string> names{"L_over_T", "dt_over_T",  "OmegaT", "log10_beta",
                                                "zA_over_T", "aT", "theta"};
    return names;
}

struct SweepSpec {
    Axis axis1;
    std::optional<Axis> axis2;
    ConfigMap fixed;
    std::string regime = "auto";
    std::string output_path;
    void validate() const;
};

// Sweep keys on top of the scenario keys: axis1 = name min max steps, axis2 (optional), output.
SweepSpec sweep_from_config(const ConfigMap& cfg);

struct SweepOptions {
    int workers = 1;
    ElementOptions elements;
};

// Point order is axis2-major: for each axis2 value, all axis1 values.
void run_sweep(const SweepSpec& spec, std::ostream& csv, const SweepOptions& opt = {});

std::vector<std::string> preset_names();
SweepSpec preset(const std::string& name);

// key = value report of one evaluation, including geometry and every element
void write_report_text(std::ostream& os, const Scenario& s, const ConcurrenceReport& r);
void write_report_json(std::ostream& os, const Scenario& s, const ConcurrenceReport& r);

// short machine tag for an exception raised while evaluating a point
std::string status_of(const std::exception& e);

}  // namespace udw
