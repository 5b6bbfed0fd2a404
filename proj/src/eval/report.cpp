// SPDX-License-Identifier: Apache-2.0
#include "geoagent/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <tuple>

namespace geoagent::eval {

namespace {

const char* key_name(GroupKey k) {
    switch (k) {
    case GroupKey::Regime: return "regime";
    case GroupKey::Modality: return "modality";
    case GroupKey::Model: return "model";
    }
    return "?";
}

const std::string& key_value(const TaskReport& r, GroupKey k) {
    switch (k) {
    case GroupKey::Regime: return r.regime;
    case GroupKey::Modality: return r.modality;
    case GroupKey::Model: return r.model;
    }
    return r.model;
}

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::vector<TaskReport> canonical_order(std::vector<TaskReport> reports) {
    std::sort(reports.begin(), reports.end(), [](const TaskReport& a, const TaskReport& b) {
        return std::tie(a.task_id, a.regime, a.model, a.modality) <
               std::tie(b.task_id, b.regime, b.model, b.modality);
    });
    return reports;
}

GroupRow summarize(std::vector<std::string> key, const std::vector<const TaskReport*>& members) {
    GroupRow row;
    row.key = std::move(key);
    row.tasks = members.size();
    TaskScores sum;
    for (const TaskReport* r : members) {
        sum.accuracy += r->scores.accuracy;
        sum.efficiency += r->scores.efficiency;
        sum.tao += r->scores.tao;
        sum.tio += r->scores.tio;
        sum.tem += r->scores.tem;
        sum.param += r->scores.param;
        row.errors += r->errors;
    }
    const double n = static_cast<double>(members.size());
    row.means = {100.0 * sum.accuracy / n, sum.efficiency / n, sum.tao / n,
                 sum.tio / n,              sum.tem / n,        sum.param / n};
    return row;
}

std::vector<std::string> metric_cells(const TaskScores& s) {
    return {fixed(s.accuracy), fixed(s.efficiency), fixed(s.tao),
            fixed(s.tio),      fixed(s.tem),        fixed(s.param)};
}

std::string render(const std::vector<std::vector<std::string>>& cells) {
    std::vector<std::size_t> width;
    for (const auto& row : cells) {
        if (width.size() < row.size()) width.resize(row.size(), 0);
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::string out;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        std::string line;
        for (std::size_t c = 0; c < cells[r].size(); ++c) {
            if (c) line += "  ";
            const std::string& v = cells[r][c];
            // first column left-aligned, numbers right-aligned
            if (c == 0) line += v + std::string(width[c] - v.size(), ' ');
            else line += std::string(width[c] - v.size(), ' ') + v;
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + '\n';
        if (r == 0) {
            std::size_t total = 0;
            for (std::size_t w : width) total += w;
            out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
        }
    }
    return out;
}

} // namespace

MetricsTable aggregate(const std::vector<TaskReport>& reports, const std::vector<GroupKey>& grouping) {
    if (reports.empty()) throw Error(Errc::EmptyInput, "no task reports to aggregate");
    const auto sorted = canonical_order(reports);
    std::map<std::vector<std::string>, std::vector<const TaskReport*>> groups;
    for (const TaskReport& r : sorted) {
        std::vector<std::string> key;
        for (GroupKey k : grouping) key.push_back(key_value(r, k));
        groups[key].push_back(&r);
    }
    MetricsTable t;
    t.grouping = grouping;
    for (const auto& [key, members] : groups) t.rows.push_back(summarize(key, members));
    return t;
}

json MetricsTable::to_json() const {
    json keys = json::array();
    for (GroupKey k : grouping) keys.push_back(key_name(k));
    json rs = json::array();
    for (const GroupRow& row : rows) {
        json group = json::object();
        for (std::size_t i = 0; i < grouping.size(); ++i) group[key_name(grouping[i])] = row.key[i];
        rs.push_back({{"group", group},
                      {"tasks", row.tasks},
                      {"accuracy", row.means.accuracy},
                      {"efficiency", row.means.efficiency},
                      {"tao", row.means.tao},
                      {"tio", row.means.tio},
                      {"tem", row.means.tem},
                      {"param_acc", row.means.param},
                      {"errors", row.errors.to_json()}});
    }
    return {{"grouping", keys}, {"rows", rs}};
}

std::string MetricsTable::to_text() const {
    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header;
    for (GroupKey k : grouping) header.push_back(key_name(k));
    if (header.empty()) header.push_back("all");
    for (const char* h : {"n", "Acc", "Eff", "TAO", "TIO", "TEM", "Param"}) header.push_back(h);
    for (Failure f : kAllFailures) header.push_back(std::string(failure_name(f)));
    cells.push_back(header);
    for (const GroupRow& row : rows) {
        std::vector<std::string> line = row.key;
        if (line.empty()) line.push_back("all");
        line.push_back(std::to_string(row.tasks));
        for (auto& c : metric_cells(row.means)) line.push_back(std::move(c));
        for (Failure f : kAllFailures) line.push_back(std::to_string(row.errors[f]));
        cells.push_back(std::move(line));
    }
    return render(cells);
}

std::string regime_table_text(const std::vector<TaskReport>& reports) {
    const MetricsTable t = aggregate(reports, {GroupKey::Model, GroupKey::Regime});
    std::map<std::string, std::map<std::string, const GroupRow*>> by_model;
    for (const GroupRow& row : t.rows) by_model[row.key[0]][row.key[1]] = &row;

    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header{"model"};
    for (const char* regime : {"ap", "if"})
        for (const char* m : {"Acc", "Eff", "TAO", "TIO", "TEM", "Param"})
            header.push_back(std::string(regime) + ":" + m);
    cells.push_back(header);
    for (const auto& [model, regimes] : by_model) {
        std::vector<std::string> line{model};
        for (const char* regime : {"ap", "if"}) {
            const auto it = regimes.find(regime);
            if (it == regimes.end()) {
                for (int i = 0; i < 6; ++i) line.push_back("-");
            } else {
                for (auto& c : metric_cells(it->second->means)) line.push_back(std::move(c));
            }
        }
        cells.push_back(std::move(line));
    }
    return render(cells);
}

} // namespace geoagent::eval
