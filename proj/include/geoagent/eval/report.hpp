// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "geoagent/eval/metrics.hpp"

namespace geoagent::eval {

enum class GroupKey { Regime, Modality, Model };

struct GroupRow {
    std::vector<std::string> key;  ///< one value per grouping key
    std::size_t tasks = 0;
    TaskScores means;  ///< accuracy already scaled to 0..100
    Histogram errors;

    friend bool operator==(const GroupRow&, const GroupRow&) = default;
};

struct MetricsTable {
    std::vector<GroupKey> grouping;
    std::vector<GroupRow> rows;  ///< sorted by key

    json to_json() const;
    /// Aligned plain-text table.
    std::string to_text() const;
    friend bool operator==(const MetricsTable&, const MetricsTable&) = default;
};

/// Unweighted means per group. The result does not depend on the order of
/// `reports`. An empty grouping gives one overall row. Throws
/// Error{EmptyInput} on no reports.
MetricsTable aggregate(const std::vector<TaskReport>& reports, const std::vector<GroupKey>& grouping);

/// Model rows with the AP and IF metric blocks side by side.
std::string regime_table_text(const std::vector<TaskReport>& reports);

} // namespace geoagent::eval
