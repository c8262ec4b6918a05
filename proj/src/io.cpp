#include "mindex/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mindex/kernel.hpp"

namespace mindex {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

double parse_cell(const std::string& raw, std::size_t row, const std::string& col) {
    const std::string s = trim(raw);
    if (s.empty())
        throw UsageError("csv: empty cell at row " + std::to_string(row) + ", column " + col);
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size())
        throw UsageError("csv: non-numeric value '" + s + "' at row " + std::to_string(row) +
                         ", column " + col);
    return v;
}

}  // namespace

IngestResult ingest_csv(const std::string& path, const CsvSchema& schema) {
    std::ifstream in(path);
    if (!in) throw UsageError("csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw UsageError("csv: missing header row in " + path);

    std::vector<std::string> header = split_csv_line(line);
    for (auto& hname : header) hname = trim(hname);

    auto column_of = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw UsageError("csv: no column named '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };

    if (schema.y_column.empty() || schema.x0_column.empty())
        throw UsageError("csv schema: y and x0 column names are required");
    const std::size_t yc = column_of(schema.y_column);
    const std::size_t x0c = column_of(schema.x0_column);
    if (yc == x0c) throw UsageError("csv schema: y and x0 must be distinct columns");

    std::vector<std::string> covnames = schema.covariate_columns;
    if (covnames.empty()) {
        for (const auto& hname : header)
            if (hname != schema.y_column && hname != schema.x0_column) covnames.push_back(hname);
    }
    if (covnames.empty()) throw UsageError("csv schema: no covariate columns");
    std::vector<std::size_t> covc(covnames.size());
    for (std::size_t j = 0; j < covnames.size(); ++j) {
        if (covnames[j] == schema.y_column)
            throw UsageError("csv schema: y column listed among covariates");
        covc[j] = column_of(covnames[j]);
    }

    IngestResult res;
    res.covariate_names = covnames;
    Dataset& d = res.data;
    d.p = covnames.size();

    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw UsageError("csv: row " + std::to_string(row) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(header.size()));
        const double yv = parse_cell(fields[yc], row, schema.y_column);
        if (yv != 0.0 && yv != 1.0)
            throw UsageError("csv: y value " + trim(fields[yc]) + " at row " +
                             std::to_string(row) + " is not binary");
        d.y.push_back(yv == 1.0 ? 1 : 0);
        d.x0.push_back(parse_cell(fields[x0c], row, schema.x0_column));
        for (std::size_t j = 0; j < covc.size(); ++j)
            d.x.push_back(parse_cell(fields[covc[j]], row, covnames[j]));
    }
    d.n = d.y.size();
    if (d.n < 2) throw UsageError("csv: need at least 2 data rows");

    auto transform_column = [&](const std::string& name, bool negate) {
        if (name == schema.y_column)
            throw UsageError("csv schema: cannot standardize the outcome column");
        Vec col(d.n);
        const bool is_x0 = (name == schema.x0_column);
        std::size_t jx = 0;
        if (!is_x0) {
            const auto it = std::find(covnames.begin(), covnames.end(), name);
            if (it == covnames.end())
                throw UsageError("csv schema: standardize target '" + name +
                                 "' is not an ingested column");
            jx = static_cast<std::size_t>(it - covnames.begin());
        }
        for (std::size_t i = 0; i < d.n; ++i) col[i] = is_x0 ? d.x0[i] : d.xat(i, jx);
        double mean = 0.0;
        for (double v : col) mean += v;
        mean /= static_cast<double>(d.n);
        const double sd = sample_std(col);
        if (!(sd > 0.0))
            throw DegenerateDataError("csv: column '" + name + "' has zero std; cannot standardize");
        const double sign = negate ? -1.0 : 1.0;
        for (std::size_t i = 0; i < d.n; ++i) {
            const double v = sign * (col[i] - mean) / sd;
            if (is_x0)
                d.x0[i] = v;
            else
                d.x[i * d.p + jx] = v;
        }
        res.transforms.push_back({name, mean, sd, negate});
    };
    for (const auto& name : schema.standardize) transform_column(name, false);
    for (const auto& name : schema.negate_standardize) transform_column(name, true);

    d.validate();
    return res;
}

}  // namespace mindex
