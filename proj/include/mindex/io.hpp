#ifndef MINDEX_IO_HPP
#define MINDEX_IO_HPP

#include <string>

#include "mindex/dataset.hpp"

namespace mindex {

struct CsvSchema {
    std::string y_column;
    std::string x0_column;
    std::vector<std::string> covariate_columns;  // empty: all remaining columns in header order
    std::vector<std::string> standardize;        // (a - mean)/std
    std::vector<std::string> negate_standardize;  // -(a - mean)/std
};

struct ColumnTransform {
    std::string column;
    double mean = 0.0;
    double std = 0.0;
    bool negated = false;
};

struct IngestResult {
    Dataset data;
    std::vector<std::string> covariate_names;
    std::vector<ColumnTransform> transforms;
};

// Parses a comma-separated file with a header row ('.' decimal point, UTF-8).
// Applies the requested standardizations with full-column mean and the n-1
// sample std. Throws UsageError on schema/parse problems (with row/column
// position), DegenerateDataError on a zero-std column under standardization.
IngestResult ingest_csv(const std::string& path, const CsvSchema& schema);

}  // namespace mindex

#endif
