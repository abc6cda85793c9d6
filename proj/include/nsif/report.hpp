#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nsif/common.hpp"

namespace nsif {

/// One checked inequality: pass/fail, worst margin and where it happened.
struct Clause {
    std::string name;
    bool pass = false;
    double margin = 0;  // positive = slack, negative = violation
    double wx = 0, wy = 0, wt = 0;
    std::string note;
};

struct VerificationReport {
    std::string title;
    std::vector<Clause> clauses;
    std::uint64_t config_hash = 0;
    nlohmann::json extra;

    bool pass() const {
        for (const auto& c : clauses)
            if (!c.pass) return false;
        return true;
    }
    Clause& add(const std::string& name, bool ok, double margin, Vec2 w = {}, double t = 0,
                const std::string& note = "") {
        clauses.push_back({name, ok, margin, w.x, w.y, t, note});
        return clauses.back();
    }
    const Clause* find(const std::string& name) const {
        for (const auto& c : clauses)
            if (c.name == name) return &c;
        return nullptr;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["title"] = title;
        j["pass"] = pass();
        j["config_hash"] = config_hash;
        j["clauses"] = nlohmann::json::array();
        for (const auto& c : clauses) {
            j["clauses"].push_back({{"name", c.name},
                                    {"pass", c.pass},
                                    {"margin", c.margin},
                                    {"witness", {c.wx, c.wy, c.wt}},
                                    {"note", c.note}});
        }
        if (!extra.is_null()) j["extra"] = extra;
        return j;
    }
};

}  // namespace nsif
