/**
 * @file properties.hpp
 * @brief Randomized property suite over representations, quivers with
 *        potential and surface triangulations. Shared by the `verify` command
 *        and the acceptance binary.
 */
#pragma once

#include "clustercc/qp.hpp"

#include "json.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace clustercc {

struct PropertyTally {
    std::string id;    ///< "a" ... "j"
    std::string name;
    long checked = 0;
    long failed = 0;
    long skipped = 0;
    long required = 0;  ///< minimum number of checks for the property to count as run
    std::map<std::string, long> skip_reasons;
    std::vector<std::string> failures;  ///< first few failure descriptions

    bool passed() const { return failed == 0 && checked >= required; }
};

struct PropertyOptions {
    unsigned seed = 20240601;
    int reps = 200;       ///< representations that must pass through every rep-level check
    int max_total = 6;    ///< total dimension bound for generated representations
    int max_attempts = 4000;
};

struct PropertyReport {
    std::vector<PropertyTally> properties;
    int qps_used = 0;
    int reps_generated = 0;
    int reps_fully_checked = 0;
    int triangulations = 0;
    double seconds = 0;
    PropertyOptions options;

    bool passed() const;
    nlohmann::json to_json() const;
    std::string to_text() const;
};

/// The named quivers with potential the suite draws representations from.
/// Each comes with frozen vertices so that g-vectors and CC functions carry coefficients.
std::vector<std::pair<std::string, QP>> property_qps();

PropertyReport run_property_suite(const PropertyOptions& options = {});

}  // namespace clustercc
