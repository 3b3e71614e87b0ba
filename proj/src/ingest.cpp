#include "vibrofdd/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <istream>
#include <sstream>

#include "vibrofdd/errors.hpp"
#include "vibrofdd/io.hpp"

namespace vibrofdd::ingest {

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::vector<std::string> split_comma(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
    return s.substr(b, e - b);
}

bool parse_finite_double(const std::string& token, double& out) {
    const std::string t = trim(token);
    if (t.empty()) return false;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    const auto res = std::from_chars(first, last, out);
    if (res.ec != std::errc{} || res.ptr != last) return false;
    return std::isfinite(out);
}

constexpr const char* kRequired[] = {"t", "ax", "ay", "az"};
constexpr const char* kGyro[] = {"gx", "gy", "gz"};

}  // namespace

RecordBatch parse_csv(std::istream& in, double nominal_rate_hz) {
    std::string header_line;
    if (!std::getline(in, header_line)) throw EmptyFile("no header row");
    // UTF-8 BOM, if any
    if (header_line.size() >= 3 && header_line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
        header_line.erase(0, 3);
    }
    header_line = strip_cr(header_line);

    const std::vector<std::string> headers = split_comma(header_line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < headers.size(); ++i) col[trim(headers[i])] = i;

    for (const char* name : kRequired) {
        if (!col.count(name)) throw MissingColumn(name);
    }
    int gyro_present = 0;
    for (const char* name : kGyro) gyro_present += col.count(name) ? 1 : 0;
    if (gyro_present != 0 && gyro_present != 3) {
        for (const char* name : kGyro) {
            if (!col.count(name)) throw MissingColumn(name);
        }
    }
    const bool has_gyro = gyro_present == 3;

    RecordBatch batch;
    batch.nominal_rate_hz = nominal_rate_hz;

    std::string line;
    std::size_t row_index = 0;
    double prev_t = -std::numeric_limits<double>::infinity();
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        ++row_index;
        const std::vector<std::string> fields = split_comma(line);

        auto field = [&](const char* name, double& out) {
            const std::size_t idx = col.at(name);
            if (idx >= fields.size()) throw MalformedRow(row_index, name, "missing value");
            if (!parse_finite_double(fields[idx], out)) throw MalformedRow(row_index, name, "not a finite number");
        };

        VibrationRecord rec;
        field("t", rec.t);
        field("ax", rec.ax);
        field("ay", rec.ay);
        field("az", rec.az);
        if (has_gyro) {
            rec.has_gyro = true;
            field("gx", rec.gx);
            field("gy", rec.gy);
            field("gz", rec.gz);
        }
        if (rec.t < prev_t) throw MalformedRow(row_index, "t", "timestamp decreased");
        prev_t = rec.t;
        batch.records.push_back(rec);
    }
    if (batch.records.empty()) throw EmptyFile("no data rows");
    if (nominal_rate_hz <= 0.0) throw DataError("nominal_rate_hz must be positive");
    return batch;
}

RecordBatch parse_csv_text(const std::string& text, double nominal_rate_hz) {
    std::istringstream in(text);
    return parse_csv(in, nominal_rate_hz);
}

RecordBatch parse_csv_file(const std::filesystem::path& path, double nominal_rate_hz) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path.string());
    try {
        return parse_csv(in, nominal_rate_hz);
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

std::string to_csv(const RecordBatch& batch) {
    const bool gyro = !batch.records.empty() && batch.records.front().has_gyro;
    std::string out = gyro ? "t,ax,ay,az,gx,gy,gz\n" : "t,ax,ay,az\n";
    for (const auto& r : batch.records) {
        out += format_double(r.t);
        out += ',';
        out += format_double(r.ax);
        out += ',';
        out += format_double(r.ay);
        out += ',';
        out += format_double(r.az);
        if (gyro) {
            out += ',';
            out += format_double(r.gx);
            out += ',';
            out += format_double(r.gy);
            out += ',';
            out += format_double(r.gz);
        }
        out += '\n';
    }
    return out;
}

std::vector<VibrationWindow> segment(const RecordBatch& batch, std::size_t window_len, std::size_t hop) {
    if (!is_power_of_two(window_len) || window_len < 64) {
        throw BadWindowLen("window length must be a power of two >= 64, got " + std::to_string(window_len));
    }
    if (hop < 1) throw BadWindowLen("hop must be >= 1");
    const std::size_t n = batch.records.size();
    if (n < window_len) {
        throw TooShort("batch has " + std::to_string(n) + " records, window needs " + std::to_string(window_len));
    }
    const std::size_t count = (n - window_len) / hop + 1;
    std::vector<VibrationWindow> windows;
    windows.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        VibrationWindow win;
        win.rate_hz = batch.nominal_rate_hz;
        win.x.resize(window_len);
        win.y.resize(window_len);
        win.z.resize(window_len);
        const std::size_t base = w * hop;
        for (std::size_t i = 0; i < window_len; ++i) {
            const auto& r = batch.records[base + i];
            win.x[i] = r.ax;
            win.y[i] = r.ay;
            win.z[i] = r.az;
        }
        windows.push_back(std::move(win));
    }
    return windows;
}

RateReport validate_rate(const RecordBatch& batch, double tolerance_fraction) {
    std::vector<double> intervals;
    intervals.reserve(batch.records.size());
    for (std::size_t i = 1; i < batch.records.size(); ++i) {
        intervals.push_back(batch.records[i].t - batch.records[i - 1].t);
    }
    const bool any_distinct = std::any_of(intervals.begin(), intervals.end(), [](double d) { return d > 0.0; });
    if (intervals.empty() || !any_distinct) {
        throw InsufficientSamples("need at least 2 records with distinct timestamps");
    }
    std::sort(intervals.begin(), intervals.end());
    const std::size_t m = intervals.size();
    const double median = m % 2 == 1 ? intervals[m / 2] : 0.5 * (intervals[m / 2 - 1] + intervals[m / 2]);

    RateReport report;
    report.median_interval_s = median;
    report.nominal_rate_hz = batch.nominal_rate_hz;
    report.implied_rate_hz = median > 0.0 ? 1.0 / median : std::numeric_limits<double>::infinity();
    report.deviation_fraction = std::abs(report.implied_rate_hz - batch.nominal_rate_hz) / batch.nominal_rate_hz;
    report.flagged = !(report.deviation_fraction <= tolerance_fraction);
    return report;
}

std::map<std::string, FaultClass> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw EmptyFile("manifest has no header: " + path.string());
    line = strip_cr(line);
    const auto headers = split_comma(line);
    if (headers.size() < 2 || trim(headers[0]) != "file" || trim(headers[1]) != "label") {
        throw DatasetError("manifest header must be 'file,label': " + path.string());
    }
    std::map<std::string, FaultClass> out;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        ++row;
        const auto fields = split_comma(line);
        if (fields.size() < 2) throw MalformedRow(row, "label", "manifest row too short");
        const std::string file = trim(fields[0]);
        const std::string label = trim(fields[1]);
        const auto cls = fault_class_from_name(label);
        if (!cls) throw DatasetError("unknown label '" + label + "' in manifest " + path.string());
        out[file] = *cls;
    }
    return out;
}

std::string manifest_to_csv(const std::vector<std::pair<std::string, FaultClass>>& entries) {
    std::string out = "file,label\n";
    for (const auto& [file, cls] : entries) {
        out += file;
        out += ',';
        out += fault_class_name(cls);
        out += '\n';
    }
    return out;
}

std::vector<DatasetFile> load_dataset_dir(const std::filesystem::path& dir,
                                          double nominal_rate_hz,
                                          bool require_labels) {
    if (!std::filesystem::is_directory(dir)) throw DatasetError("not a directory: " + dir.string());

    const std::filesystem::path manifest_path = dir / "manifest.csv";
    std::map<std::string, FaultClass> labels;
    const bool has_manifest = std::filesystem::exists(manifest_path);
    if (has_manifest) {
        labels = read_manifest(manifest_path);
    } else if (require_labels) {
        throw DatasetError("labeled dataset requires " + manifest_path.string());
    }

    std::vector<std::string> names;
    if (has_manifest) {
        for (const auto& [name, cls] : labels) {
            (void)cls;
            names.push_back(name);
        }
    } else {
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (!entry.is_regular_file()) continue;
            const std::string name = entry.path().filename().string();
            if (entry.path().extension() == ".csv" && name != "manifest.csv") names.push_back(name);
        }
    }
    std::sort(names.begin(), names.end());

    std::vector<DatasetFile> out;
    out.reserve(names.size());
    for (const std::string& name : names) {
        const std::filesystem::path p = dir / name;
        if (!std::filesystem::exists(p)) throw DatasetError("manifest references missing file: " + p.string());
        DatasetFile f;
        f.name = name;
        f.batch = parse_csv_file(p, nominal_rate_hz);
        if (has_manifest) {
            const auto it = labels.find(name);
            if (it != labels.end()) f.label = it->second;
        }
        out.push_back(std::move(f));
    }
    return out;
}

std::vector<VibrationWindow> window_dataset(const std::vector<DatasetFile>& files,
                                            std::size_t window_len,
                                            std::size_t hop) {
    std::vector<VibrationWindow> windows;
    for (const auto& f : files) {
        auto ws = segment(f.batch, window_len, hop);
        for (auto& w : ws) {
            w.label = f.label;
            windows.push_back(std::move(w));
        }
    }
    return windows;
}

}  // namespace vibrofdd::ingest
