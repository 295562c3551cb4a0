#include "fraclab/lab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace fraclab::lab {

void Table::add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("Table: row width does not match the header");
    rows.push_back(std::move(row));
}

double Table::number(std::size_t row, const std::string& column) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] != column) continue;
        const Cell& cell = rows.at(row)[c];
        if (const auto* d = std::get_if<double>(&cell)) return *d;
        if (const auto* i = std::get_if<long long>(&cell)) return static_cast<double>(*i);
        throw std::invalid_argument("Table: column '" + column + "' is not numeric");
    }
    throw std::invalid_argument("Table: no column '" + column + "'");
}

bool SweepReport::all_pass() const {
    for (const auto& v : verdicts)
        if (!v.pass) return false;
    return true;
}

std::string format_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (std::isnan(*d)) return "nan";
        if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", *d);
        return buf;
    }
    if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t c = 0; c < t.columns.size(); ++c) out += (c ? "," : "") + t.columns[c];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + format_cell(row[c]);
        out += '\n';
    }
    return out;
}

namespace {

using nlohmann::json;

json cell_json(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) {
        if (!std::isfinite(*d)) return format_cell(c);
        return *d;
    }
    if (const auto* i = std::get_if<long long>(&c)) return *i;
    return std::get<std::string>(c);
}

json table_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json obj = json::object();
        for (std::size_t c = 0; c < row.size(); ++c) obj[t.columns[c]] = cell_json(row[c]);
        rows.push_back(obj);
    }
    return json{{"columns", t.columns}, {"rows", rows}};
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + p.string() + "'");
}

Table verdict_table(const SweepReport& r) {
    Table t{{"name", "pass", "value", "tolerance", "detail"}, {}};
    for (const auto& v : r.verdicts) t.add({v.name, std::string(v.pass ? "PASS" : "FAIL"), v.value, v.tolerance, v.detail});
    return t;
}

}  // namespace

std::string to_json(const SweepReport& r) {
    json j = json::object();
    j["experiment"] = r.experiment;
    j["name"] = r.name;
    j["table"] = table_json(r.table);
    json extra = json::object();
    for (const auto& [k, t] : r.extra) extra[k] = table_json(t);
    j["extra"] = extra;
    json est = json::object();
    for (const auto& [k, v] : r.estimates) est[k] = cell_json(v);
    j["estimates"] = est;
    j["verdicts"] = table_json(verdict_table(r));
    j["all_pass"] = r.all_pass();
    return j.dump(2) + "\n";
}

std::vector<std::string> emit(const SweepReport& r, const std::string& format, const std::string& dir) {
    if (format != "csv" && format != "json") throw std::invalid_argument("emit: unknown format '" + format + "'");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create '" + dir + "': " + ec.message());
    const fs::path base(dir);
    std::vector<std::string> written;
    auto put = [&](const std::string& file, const std::string& text) {
        write_file(base / file, text);
        written.push_back((base / file).string());
    };
    if (format == "json") {
        put(r.name + ".json", to_json(r));
        return written;
    }
    put(r.name + ".csv", to_csv(r.table));
    put(r.name + "_verdicts.csv", to_csv(verdict_table(r)));
    Table est{{"name", "value"}, {}};
    for (const auto& [k, v] : r.estimates) est.add({k, v});
    put(r.name + "_estimates.csv", to_csv(est));
    for (const auto& [k, t] : r.extra) put(r.name + "_" + k + ".csv", to_csv(t));
    return written;
}

}  // namespace fraclab::lab
