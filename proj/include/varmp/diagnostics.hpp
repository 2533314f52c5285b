#pragma once

// Per-iteration monitor rows (J, CPS quantity, norms, step) with CSV export
// and an empirical L-infinity boundedness check.

#include <varmp/errors.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <limits>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace varmp {

struct TraceRow {
    long iter = 0;
    double J = 0.0;
    double cps = 0.0;
    double wu = 0.0, wv = 0.0; ///< W-norms
    double lu = 0.0, lv = 0.0; ///< L-infinity norms
    double step = 0.0;

    bool operator==(const TraceRow&) const = default;
};

struct CpsTrace {
    std::vector<TraceRow> rows;

    std::size_t size() const { return rows.size(); }
    bool empty() const { return rows.empty(); }
    const TraceRow& back() const { return rows.back(); }
    bool operator==(const CpsTrace&) const = default;
};

inline constexpr const char* trace_header = "iter,J,cps,wu,wv,lu,lv,step";

inline void record(CpsTrace& trace, const TraceRow& row)
{
    if (!trace.rows.empty() && row.iter <= trace.rows.back().iter)
        throw std::invalid_argument("trace rows must have increasing iteration index");
    trace.rows.push_back(row);
}

struct LinfVerdict {
    bool pass = true;
    double max_value = 0.0;
    long worst_row = -1;
};

inline LinfVerdict linf_monitor(const CpsTrace& trace, double threshold)
{
    LinfVerdict out;
    for (std::size_t i = 0; i < trace.rows.size(); ++i) {
        const double m = std::max(trace.rows[i].lu, trace.rows[i].lv);
        if (out.worst_row < 0 || m > out.max_value) {
            out.max_value = m;
            out.worst_row = static_cast<long>(i);
        }
    }
    out.pass = out.max_value <= threshold;
    return out;
}

/// Whether J is nonincreasing over rows [first, last).
inline bool energy_nonincreasing(const CpsTrace& trace, std::size_t first = 0, std::size_t last = SIZE_MAX,
                                 double slack = 0.0)
{
    last = std::min(last, trace.rows.size());
    for (std::size_t i = first + 1; i < last; ++i)
        if (trace.rows[i].J > trace.rows[i - 1].J + slack)
            return false;
    return true;
}

inline void write_trace(std::ostream& os, const CpsTrace& trace)
{
    os << trace_header << '\n' << std::setprecision(17);
    for (const auto& r : trace.rows)
        os << r.iter << ',' << r.J << ',' << r.cps << ',' << r.wu << ',' << r.wv << ',' << r.lu << ',' << r.lv << ','
           << r.step << '\n';
}

inline CpsTrace read_trace(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line) || line != trace_header)
        throw ConfigError("trace file: missing or wrong header");
    CpsTrace t;
    while (std::getline(is, line)) {
        if (line.empty())
            continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        TraceRow r;
        if (!(ls >> r.iter >> r.J >> r.cps >> r.wu >> r.wv >> r.lu >> r.lv >> r.step))
            throw ConfigError("trace file: malformed row '" + line + "'");
        t.rows.push_back(r);
    }
    return t;
}

inline void export_trace(const CpsTrace& trace, const std::string& path)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write trace to '" + path + "'");
    write_trace(out, trace);
    if (!out)
        throw std::runtime_error("I/O error writing '" + path + "'");
}

inline CpsTrace import_trace(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open trace '" + path + "'");
    return read_trace(in);
}

struct TraceSummary {
    double final_J = 0.0;
    double final_cps = 0.0;
    long iters = 0;
    double linf_max = 0.0;
};

inline TraceSummary summarize(const CpsTrace& trace)
{
    TraceSummary s;
    if (trace.rows.empty())
        return s;
    s.final_J = trace.back().J;
    s.final_cps = trace.back().cps;
    s.iters = static_cast<long>(trace.rows.size()) - 1;
    s.linf_max = linf_monitor(trace, std::numeric_limits<double>::infinity()).max_value;
    return s;
}

} // namespace varmp
