#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace vibrofdd {

// The three laboratory fault classes. Codes are stable and used on disk.
enum class FaultClass : int {
    StructuralLooseness = 0,
    Misalignment = 1,
    BearingProblem = 2,
};

inline constexpr int kNumClasses = 3;

const std::string& fault_class_name(FaultClass c);
std::optional<FaultClass> fault_class_from_name(const std::string& name);
FaultClass fault_class_from_code(int code);

// One accelerometer sample. Gyro channels are optional in the CSV schema
// and unused by the default feature pipeline.
struct VibrationRecord {
    double t = 0.0;
    double ax = 0.0;
    double ay = 0.0;
    double az = 0.0;
    bool has_gyro = false;
    double gx = 0.0;
    double gy = 0.0;
    double gz = 0.0;
};

struct RecordBatch {
    std::vector<VibrationRecord> records;
    double nominal_rate_hz = 1600.0;
};

// Fixed-length multi-axis segment, the unit of classification.
// x/y/z have equal power-of-two length >= 64.
struct VibrationWindow {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> z;
    double rate_hz = 1600.0;
    std::optional<FaultClass> label;

    std::size_t size() const { return x.size(); }
};

bool is_power_of_two(std::size_t n);
std::size_t next_power_of_two(std::size_t n);

inline constexpr std::size_t kDefaultWindowLen = 1024;
inline constexpr double kDefaultRateHz = 1600.0;

}  // namespace vibrofdd
