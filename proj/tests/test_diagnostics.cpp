#include <varmp/diagnostics.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

using namespace varmp;

namespace {

TraceRow row(long i, double J = 0.0)
{
    return {i, J, 1.0 / (1 + i), 1.0, 2.0, 0.5, 0.25, 0.1};
}

std::string tmp_path(const std::string& name) { return std::string(VARMP_TEST_TMP) + "/" + name; }

} // namespace

TEST(Diagnostics, RecordAppends)
{
    CpsTrace t;
    EXPECT_TRUE(t.empty());
    record(t, row(0));
    EXPECT_EQ(t.size(), 1u);
    record(t, row(3));
    EXPECT_EQ(t.back().iter, 3);
    EXPECT_THROW(record(t, row(3)), std::invalid_argument);
    EXPECT_THROW(record(t, row(1)), std::invalid_argument);
}

TEST(Diagnostics, LinfMonitor)
{
    CpsTrace t;
    for (long i = 0; i < 10; ++i)
        record(t, {i, 0, 0, 0, 0, 0, 0, 0});
    const auto ok = linf_monitor(t, 1.0);
    EXPECT_TRUE(ok.pass);
    EXPECT_EQ(ok.max_value, 0.0);

    t.rows[6].lv = 1e9;
    const auto bad = linf_monitor(t, 1e3);
    EXPECT_FALSE(bad.pass);
    EXPECT_EQ(bad.worst_row, 6);
    EXPECT_EQ(bad.max_value, 1e9);
    EXPECT_TRUE(linf_monitor(CpsTrace{}, 0.0).pass);
}

TEST(Diagnostics, EnergyMonotonicity)
{
    CpsTrace t;
    for (long i = 0; i < 5; ++i)
        record(t, row(i, -static_cast<double>(i)));
    EXPECT_TRUE(energy_nonincreasing(t));
    t.rows[3].J = 10.0;
    EXPECT_FALSE(energy_nonincreasing(t));
    EXPECT_TRUE(energy_nonincreasing(t, 0, 3));
}

TEST(Diagnostics, EmptyExportIsHeaderOnly)
{
    const std::string path = tmp_path("empty_trace.csv");
    export_trace(CpsTrace{}, path);
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    EXPECT_EQ(ss.str(), std::string(trace_header) + "\n");
    EXPECT_TRUE(import_trace(path).empty());
}

TEST(Diagnostics, ExportRoundTripIsExact)
{
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> unif(-1e3, 1e3);
    CpsTrace t;
    for (long i = 0; i < 1000; ++i)
        record(t, {i, unif(rng), std::abs(unif(rng)) * 1e-9, unif(rng), unif(rng), M_PI, std::exp(unif(rng) / 100),
                   1.0 / 3.0});
    const std::string path = tmp_path("trace_1000.csv");
    export_trace(t, path);
    std::ifstream in(path);
    int lines = 0;
    for (std::string l; std::getline(in, l);)
        ++lines;
    EXPECT_EQ(lines, 1001);
    EXPECT_EQ(import_trace(path), t);
}

TEST(Diagnostics, MalformedInput)
{
    std::istringstream no_header("1,2,3\n");
    EXPECT_THROW(read_trace(no_header), ConfigError);
    std::istringstream short_row(std::string(trace_header) + "\n1,2,3\n");
    EXPECT_THROW(read_trace(short_row), ConfigError);
    EXPECT_THROW(import_trace("/nonexistent/trace.csv"), ConfigError);
}

TEST(Diagnostics, Summary)
{
    EXPECT_EQ(summarize(CpsTrace{}).iters, 0);
    CpsTrace t;
    for (long i = 0; i < 4; ++i)
        record(t, row(i, 10.0 - i));
    t.rows[2].lu = 7.0;
    const auto s = summarize(t);
    EXPECT_EQ(s.iters, 3);
    EXPECT_EQ(s.final_J, 7.0);
    EXPECT_EQ(s.final_cps, 0.25);
    EXPECT_EQ(s.linf_max, 7.0);
}
