#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "canopar/csv.hpp"
#include "canopar/geometry.hpp"

namespace canopar {

struct ValidationRecord {
    std::string genotype;
    double measured = 0.0;   // field-measured fraction of intercepted PAR
    double simulated = 0.0;  // simulated fraction
};

// Coefficient of determination of simulated vs measured values:
// R^2 = 1 - SS_res / SS_tot, SS_res about the simulated values, SS_tot about
// the measured mean. Requires at least 3 records and nonzero variance.
inline double r_squared(const std::vector<ValidationRecord>& records) {
    if (records.size() < 3) throw Error("validate: need at least 3 records");
    double mean = 0.0;
    for (const auto& r : records) {
        if (!std::isfinite(r.measured) || !std::isfinite(r.simulated))
            throw Error("validate: non-finite value for genotype '" + r.genotype + "'");
        mean += r.measured;
    }
    mean /= static_cast<double>(records.size());
    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto& r : records) {
        ss_res += (r.measured - r.simulated) * (r.measured - r.simulated);
        ss_tot += (r.measured - mean) * (r.measured - mean);
    }
    if (ss_tot <= 0.0) throw Error("validate: measured values have zero variance");
    return 1.0 - ss_res / ss_tot;
}

// Load (genotype, measured, simulated) records from a CSV with a header row.
// Column names: genotype, measured or measured_fraction, simulated or
// simulated_fraction.
inline std::vector<ValidationRecord> load_validation_csv(const std::string& path) {
    auto rows = csv::read_file(path);
    if (rows.size() < 2) throw Error("validate: '" + path + "' has no data rows");
    int col_g = -1, col_m = -1, col_s = -1;
    const auto& header = rows[0];
    for (std::size_t i = 0; i < header.size(); ++i) {
        const std::string& h = header[i];
        if (h == "genotype") col_g = static_cast<int>(i);
        else if (h == "measured" || h == "measured_fraction") col_m = static_cast<int>(i);
        else if (h == "simulated" || h == "simulated_fraction") col_s = static_cast<int>(i);
    }
    if (col_m < 0 || col_s < 0)
        throw Error("validate: '" + path + "' must have measured and simulated columns");
    std::vector<ValidationRecord> records;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (static_cast<int>(row.size()) <= std::max(col_m, col_s))
            throw Error("validate: short row " + std::to_string(r + 1) + " in '" + path + "'");
        ValidationRecord rec;
        rec.genotype = col_g >= 0 && col_g < static_cast<int>(row.size()) ? row[col_g]
                                                                          : std::to_string(r);
        try {
            rec.measured = std::stod(row[col_m]);
            rec.simulated = std::stod(row[col_s]);
        } catch (const std::exception&) {
            throw Error("validate: bad number in row " + std::to_string(r + 1) + " of '" + path + "'");
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace canopar
