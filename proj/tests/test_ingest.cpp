#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "vibrofdd/errors.hpp"
#include "vibrofdd/ingest.hpp"
#include "vibrofdd/rng.hpp"

using namespace vibrofdd;
using namespace vibrofdd::ingest;

namespace {

std::string make_csv(std::size_t rows, double dt = 1.0 / 1600.0, bool gyro = false) {
    std::string text = gyro ? "t,ax,ay,az,gx,gy,gz\n" : "t,ax,ay,az\n";
    for (std::size_t i = 0; i < rows; ++i) {
        text += std::to_string(static_cast<double>(i) * dt) + ",1.0,2.0,3.0";
        if (gyro) text += ",0.1,0.2,0.3";
        text += "\n";
    }
    return text;
}

}  // namespace

TEST_CASE("parse_csv minimal well-formed file") {
    const RecordBatch batch = parse_csv_text("t,ax,ay,az\n0,1.5,-2,0.25\n0.000625,1,2,3\n0.00125,0,0,0\n");
    CHECK(batch.records.size() == 3);
    CHECK(batch.nominal_rate_hz == 1600.0);
    CHECK(batch.records[0].ax == 1.5);
    CHECK(batch.records[0].ay == -2.0);
    CHECK(batch.records[2].t == doctest::Approx(0.00125));
    CHECK_FALSE(batch.records[0].has_gyro);
}

TEST_CASE("parse_csv full schema populates gyro fields") {
    const RecordBatch batch = parse_csv_text(make_csv(4, 1.0 / 1600.0, true));
    CHECK(batch.records.size() == 4);
    for (const auto& r : batch.records) {
        CHECK(r.has_gyro);
        CHECK(r.gx == 0.1);
        CHECK(r.gz == 0.3);
    }
}

TEST_CASE("parse_csv malformed row reports index and column") {
    try {
        parse_csv_text("t,ax,ay,az\n0.001,1.2,abc,0.0\n");
        FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
        CHECK(e.row == 1);
        CHECK(e.column == "ay");
    }
}

TEST_CASE("parse_csv error taxonomy") {
    CHECK_THROWS_AS(parse_csv_text("t,ax,az\n0,1,2\n"), MissingColumn);
    CHECK_THROWS_AS(parse_csv_text(""), EmptyFile);
    CHECK_THROWS_AS(parse_csv_text("t,ax,ay,az\n"), EmptyFile);
    CHECK_THROWS_AS(parse_csv_text("t,ax,ay,az,gx\n0,1,2,3,4\n"), MissingColumn);
    CHECK_THROWS_AS(parse_csv_text("t,ax,ay,az\n0,1,2,3\n-1,1,2,3\n"), MalformedRow);  // t decreased
    CHECK_THROWS_AS(parse_csv_text("t,ax,ay,az\n0,inf,2,3\n"), MalformedRow);
    CHECK_THROWS_AS(parse_csv_text("t,ax,ay,az\n0,1,2\n"), MalformedRow);  // short row
}

TEST_CASE("parse_csv accepts CRLF and BOM") {
    const RecordBatch batch = parse_csv_text("\xEF\xBB\xBFt,ax,ay,az\r\n0,1,2,3\r\n0.1,4,5,6\r\n");
    CHECK(batch.records.size() == 2);
    CHECK(batch.records[1].az == 6.0);
}

TEST_CASE("csv round trip preserves every field") {
    SplitMix64 rng(99);
    RecordBatch batch;
    batch.nominal_rate_hz = 1600.0;
    double t = 0.0;
    for (int i = 0; i < 50; ++i) {
        VibrationRecord r;
        r.t = t;
        t += 1.0 / 1600.0;
        r.ax = rng.gaussian() * 3.7;
        r.ay = rng.gaussian();
        r.az = rng.gaussian() * 0.01;
        r.has_gyro = true;
        r.gx = rng.gaussian();
        r.gy = rng.gaussian();
        r.gz = rng.gaussian();
        batch.records.push_back(r);
    }
    const RecordBatch reparsed = parse_csv_text(to_csv(batch));
    REQUIRE(reparsed.records.size() == batch.records.size());
    for (std::size_t i = 0; i < batch.records.size(); ++i) {
        CHECK(reparsed.records[i].t == batch.records[i].t);
        CHECK(reparsed.records[i].ax == batch.records[i].ax);
        CHECK(reparsed.records[i].ay == batch.records[i].ay);
        CHECK(reparsed.records[i].az == batch.records[i].az);
        CHECK(reparsed.records[i].gx == batch.records[i].gx);
        CHECK(reparsed.records[i].gy == batch.records[i].gy);
        CHECK(reparsed.records[i].gz == batch.records[i].gz);
    }
}

TEST_CASE("segment exact tiling") {
    const RecordBatch batch = parse_csv_text(make_csv(4096));
    const auto windows = segment(batch, 1024, 1024);
    REQUIRE(windows.size() == 4);
    for (const auto& w : windows) {
        CHECK(w.size() == 1024);
        CHECK(w.rate_hz == 1600.0);
    }
}

TEST_CASE("segment single full window with smaller hop") {
    const RecordBatch batch = parse_csv_text(make_csv(1024));
    CHECK(segment(batch, 1024, 512).size() == 1);
}

TEST_CASE("segment error cases") {
    const RecordBatch small = parse_csv_text(make_csv(100));
    CHECK_THROWS_AS(segment(small, 1024, 1024), TooShort);
    const RecordBatch batch = parse_csv_text(make_csv(2048));
    CHECK_THROWS_AS(segment(batch, 1000, 1000), BadWindowLen);
    CHECK_THROWS_AS(segment(batch, 1024, 0), BadWindowLen);
}

TEST_CASE("segment concatenation reproduces the covered prefix") {
    SplitMix64 rng(5);
    RecordBatch batch;
    for (int i = 0; i < 300; ++i) {
        VibrationRecord r;
        r.t = i / 1600.0;
        r.ax = rng.gaussian();
        r.ay = rng.gaussian();
        r.az = rng.gaussian();
        batch.records.push_back(r);
    }
    const auto windows = segment(batch, 64, 64);
    REQUIRE(windows.size() == 4);
    for (std::size_t w = 0; w < windows.size(); ++w) {
        for (std::size_t i = 0; i < 64; ++i) {
            CHECK(windows[w].x[i] == batch.records[w * 64 + i].ax);
            CHECK(windows[w].y[i] == batch.records[w * 64 + i].ay);
            CHECK(windows[w].z[i] == batch.records[w * 64 + i].az);
        }
    }
}

TEST_CASE("validate_rate exact rate is not flagged") {
    const RecordBatch batch = parse_csv_text(make_csv(100));
    const RateReport report = validate_rate(batch, 0.05);
    CHECK_FALSE(report.flagged);
    CHECK(report.implied_rate_hz == doctest::Approx(1600.0).epsilon(1e-6));
}

TEST_CASE("validate_rate flags a 2x deviation") {
    const RecordBatch batch = parse_csv_text(make_csv(100, 1.0 / 800.0));
    const RateReport report = validate_rate(batch, 0.05);
    CHECK(report.flagged);
    CHECK(report.implied_rate_hz == doctest::Approx(800.0).epsilon(1e-6));
}

TEST_CASE("validate_rate needs two distinct timestamps") {
    const RecordBatch one = parse_csv_text("t,ax,ay,az\n0,1,2,3\n");
    CHECK_THROWS_AS(validate_rate(one, 0.05), InsufficientSamples);
    const RecordBatch same = parse_csv_text("t,ax,ay,az\n0,1,2,3\n0,1,2,3\n");
    CHECK_THROWS_AS(validate_rate(same, 0.05), InsufficientSamples);
}

TEST_CASE("manifest round trip and unknown label") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "vibrofdd_manifest_test";
    fs::create_directories(dir);
    const std::string csv = manifest_to_csv({{"a.csv", FaultClass::Misalignment}, {"b.csv", FaultClass::BearingProblem}});
    {
        std::ofstream out(dir / "manifest.csv");
        out << csv;
    }
    const auto labels = read_manifest(dir / "manifest.csv");
    CHECK(labels.at("a.csv") == FaultClass::Misalignment);
    CHECK(labels.at("b.csv") == FaultClass::BearingProblem);

    {
        std::ofstream out(dir / "manifest.csv");
        out << "file,label\nc.csv,cracked_shaft\n";
    }
    try {
        read_manifest(dir / "manifest.csv");
        FAIL("expected DatasetError");
    } catch (const DatasetError& e) {
        CHECK(std::string(e.what()).find("cracked_shaft") != std::string::npos);
    }
    fs::remove_all(dir);
}
