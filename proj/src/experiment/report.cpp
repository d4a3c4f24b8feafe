#include "cuspfs/experiment/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include "cuspfs/error.hpp"

namespace cuspfs::experiment {

const std::vector<std::string>& check_csv_columns() {
    static const std::vector<std::string> cols{"check_id", "function_id", "k",     "q",
                                               "lambda",   "value",       "ratio", "refinement_level"};
    return cols;
}

bool RunResult::all_pass() const {
    for (const auto& c : checks)
        if (!c.pass) return false;
    return true;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

Json summary_json(const RunResult& result) {
    Json out = Json::object();
    for (const auto& c : result.checks) {
        Json entry;
        entry["pass"] = c.pass;
        entry["value"] = std::isfinite(c.value) ? Json(c.value) : Json(nullptr);
        entry["tolerance"] = c.tolerance.to_json();
        out[c.id] = std::move(entry);
    }
    return out;
}

namespace {

void write_joined(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) os << ',';
        os << cells[i];
    }
    os << '\n';
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    return os;
}

}  // namespace

void write_check_csv(std::ostream& os, const CheckResult& check) {
    write_joined(os, check_csv_columns());
    for (const auto& r : check.rows)
        write_joined(os, {check.id, r.function_id, format_number(r.k), format_number(r.q), format_number(r.lambda),
                          format_number(r.value), format_number(r.ratio), std::to_string(r.refinement_level)});
}

void write_table_csv(std::ostream& os, const Table& table) {
    write_joined(os, table.columns);
    for (const auto& row : table.rows) {
        std::vector<std::string> cells;
        cells.reserve(row.size());
        for (double x : row) cells.push_back(format_number(x));
        write_joined(os, cells);
    }
}

void write_report(const std::filesystem::path& dir, const RunResult& result) {
    std::filesystem::create_directories(dir);
    {
        auto os = open_out(dir / "summary.json");
        os << summary_json(result).dump(2) << '\n';
    }
    for (const auto& c : result.checks) {
        auto os = open_out(dir / (c.id + ".csv"));
        write_check_csv(os, c);
    }
    for (const auto& t : result.tables) {
        auto os = open_out(dir / (t.name + ".csv"));
        write_table_csv(os, t);
    }
}

}  // namespace cuspfs::experiment
