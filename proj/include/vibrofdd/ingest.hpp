#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "vibrofdd/types.hpp"

namespace vibrofdd::ingest {

// CSV schema: header "t,ax,ay,az" with optional ",gx,gy,gz" (all three or
// none). '.' decimal point, LF or CRLF line endings, no quoting.
RecordBatch parse_csv(std::istream& in, double nominal_rate_hz = kDefaultRateHz);
RecordBatch parse_csv_text(const std::string& text, double nominal_rate_hz = kDefaultRateHz);
RecordBatch parse_csv_file(const std::filesystem::path& path, double nominal_rate_hz = kDefaultRateHz);

std::string to_csv(const RecordBatch& batch);

// Cuts the batch into contiguous windows of window_len samples every hop
// samples. Trailing samples that do not fill a window are dropped.
std::vector<VibrationWindow> segment(const RecordBatch& batch, std::size_t window_len, std::size_t hop);

struct RateReport {
    double median_interval_s = 0.0;
    double implied_rate_hz = 0.0;
    double nominal_rate_hz = 0.0;
    double deviation_fraction = 0.0;
    bool flagged = false;
};

RateReport validate_rate(const RecordBatch& batch, double tolerance_fraction);

// Label manifest: CSV with columns file,label. Labels are the class names
// structural_looseness / misalignment / bearing_problem.
std::map<std::string, FaultClass> read_manifest(const std::filesystem::path& path);
std::string manifest_to_csv(const std::vector<std::pair<std::string, FaultClass>>& entries);

struct DatasetFile {
    std::string name;
    RecordBatch batch;
    std::optional<FaultClass> label;
};

// Loads every manifest-listed CSV from a directory (or every *.csv except
// manifest.csv when no manifest exists), sorted by name.
std::vector<DatasetFile> load_dataset_dir(const std::filesystem::path& dir,
                                          double nominal_rate_hz = kDefaultRateHz,
                                          bool require_labels = false);

// Windows each file and attaches its label.
std::vector<VibrationWindow> window_dataset(const std::vector<DatasetFile>& files,
                                            std::size_t window_len,
                                            std::size_t hop);

}  // namespace vibrofdd::ingest
