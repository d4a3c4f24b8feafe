#pragma once

#include <filesystem>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "cuspfs/experiment/config.hpp"

namespace cuspfs::experiment {

inline constexpr double kNone = std::numeric_limits<double>::quiet_NaN();

/// One row of a per-check CSV; NaN fields are written empty.
struct CsvRow {
    std::string function_id;
    double k = kNone;
    double q = kNone;
    double lambda = kNone;
    double value = kNone;
    double ratio = kNone;
    int refinement_level = 0;
};

/// Columns shared by every per-check CSV.
const std::vector<std::string>& check_csv_columns();

struct CheckResult {
    std::string id;
    double value = kNone;
    Tolerance tolerance;
    bool pass = false;
    std::vector<CsvRow> rows;
};

/// Command-specific table written as <name>.csv.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

struct RunResult {
    std::vector<CheckResult> checks;  ///< sorted by id
    std::vector<Table> tables;

    bool all_pass() const;
};

/// Shortest decimal form that round-trips; empty for NaN.
std::string format_number(double x);

/// {check_id: {pass, value, tolerance}}.
Json summary_json(const RunResult& result);

void write_check_csv(std::ostream& os, const CheckResult& check);
void write_table_csv(std::ostream& os, const Table& table);

/// summary.json, <check_id>.csv per check and <table>.csv per table.
void write_report(const std::filesystem::path& dir, const RunResult& result);

}  // namespace cuspfs::experiment
