#pragma once

#include <string>
#include <vector>

namespace bpwb {

/// One verified statement. `anchor` names the result being checked (e.g. "thm7.2").
struct CheckRecord {
    std::string id;
    std::string anchor;
    bool pass = false;
    std::string expected;
    std::string computed;
    std::string modulus;
    std::string witness;
    std::string note;
};

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

struct Report {
    std::string title;
    std::vector<CheckRecord> records;
    std::vector<Table> tables;
    std::vector<std::string> trace;

    [[nodiscard]] bool passed() const
    {
        for (const auto& r : records) {
            if (!r.pass) {
                return false;
            }
        }
        return true;
    }

    CheckRecord& add(CheckRecord r)
    {
        records.push_back(std::move(r));
        return records.back();
    }

    void append(const Report& other)
    {
        records.insert(records.end(), other.records.begin(), other.records.end());
        tables.insert(tables.end(), other.tables.begin(), other.tables.end());
        trace.insert(trace.end(), other.trace.begin(), other.trace.end());
    }
};

}  // namespace bpwb
