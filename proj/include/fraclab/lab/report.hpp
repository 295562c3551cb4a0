#pragma once

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace fraclab::lab {

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
    double number(std::size_t row, const std::string& column) const;
};

struct Verdict {
    std::string name;
    bool pass = false;
    double value = 0;
    double tolerance = 0;
    std::string detail;
};

struct SweepReport {
    std::string experiment;
    std::string name;
    Table table;
    std::map<std::string, Table> extra;
    std::map<std::string, double> estimates;
    std::vector<Verdict> verdicts;

    bool all_pass() const;
};

// "%.17g"; integers verbatim; strings quoted only when needed.
std::string format_cell(const Cell& c);
std::string to_csv(const Table& t);
std::string to_json(const SweepReport& r);

// csv: <dir>/<name>.csv, <name>_verdicts.csv, <name>_estimates.csv and one
// <name>_<key>.csv per extra table. json: a single <dir>/<name>.json.
// Returns the written paths.
std::vector<std::string> emit(const SweepReport& r, const std::string& format, const std::string& dir);

}  // namespace fraclab::lab
