#pragma once
// Scenario runner and file formats: CSV traces, key = value summaries,
// A/B comparison reports and plot-ready series from power-table fits.
// Given the same scenario and seed, outputs are byte-identical.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "controller.hpp"
#include "metrics.hpp"
#include "power_model.hpp"
#include "scenario.hpp"

namespace mpptsim {

struct IoError : std::runtime_error {
    explicit IoError(const std::filesystem::path& path, const std::string& what)
        : std::runtime_error(what + ": " + path.string()) {}
};

inline constexpr std::string_view kTraceHeader =
    "cycle,v_code,i_code,p_inst,p_avg,compare,step,direction,clock_request,active_ratio,pwm_out,duty";

// duty is always a multiple of 1/256, so 8 decimals print it exactly.
inline void write_trace_row(std::ostream& out, const TraceRecord& r) {
    char duty[16];
    std::snprintf(duty, sizeof duty, "%.8f", r.duty);
    out << r.cycle << ',' << unsigned(r.v_code) << ',' << unsigned(r.i_code) << ','
        << r.p_inst << ',';
    if (r.p_avg) out << *r.p_avg;
    out << ',' << unsigned(r.compare) << ',' << unsigned(r.step) << ',' << int(r.direction)
        << ',' << unsigned(r.clock_request) << ',' << r.active_ratio << ','
        << unsigned(r.pwm_out) << ',' << duty << '\n';
}

inline std::vector<TraceRecord> read_trace_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kTraceHeader)
        throw std::invalid_argument("trace csv: bad or missing header");
    std::vector<TraceRecord> out;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::array<std::string, 12> f;
        std::size_t field = 0, start = 0;
        for (std::size_t j = 0; j <= line.size(); ++j) {
            if (j == line.size() || line[j] == ',') {
                if (field >= f.size())
                    throw std::invalid_argument("trace csv line " + std::to_string(line_no) +
                                                ": too many fields");
                f[field++] = line.substr(start, j - start);
                start = j + 1;
            }
        }
        if (field != f.size())
            throw std::invalid_argument("trace csv line " + std::to_string(line_no) +
                                        ": expected 12 fields");
        TraceRecord r;
        r.cycle = std::stoull(f[0]);
        r.v_code = static_cast<std::uint8_t>(std::stoul(f[1]));
        r.i_code = static_cast<std::uint8_t>(std::stoul(f[2]));
        r.p_inst = static_cast<std::uint16_t>(std::stoul(f[3]));
        if (!f[4].empty()) r.p_avg = static_cast<std::uint16_t>(std::stoul(f[4]));
        r.compare = static_cast<std::uint8_t>(std::stoul(f[5]));
        r.step = static_cast<std::uint8_t>(std::stoul(f[6]));
        r.direction = static_cast<std::int8_t>(std::stoi(f[7]));
        r.clock_request = static_cast<std::uint8_t>(std::stoul(f[8]));
        r.active_ratio = static_cast<std::uint32_t>(std::stoul(f[9]));
        r.pwm_out = f[10] == "1";
        r.duty = std::strtod(f[11].c_str(), nullptr);
        out.push_back(r);
    }
    return out;
}

inline std::string format_summary(const RunSummary& s) {
    std::ostringstream out;
    out << "converged = " << (s.converged ? "true" : "false") << '\n'
        << "convergence_decisions = " << s.convergence_decisions << '\n'
        << "tracking_efficiency = " << detail::format_real(s.tracking_efficiency) << '\n'
        << "final_ratio = " << s.final_ratio << '\n'
        << "mean_estimated_controller_power = "
        << detail::format_real(s.mean_estimated_controller_power) << '\n'
        << "steady_state_band = " << s.steady_state_band << '\n';
    return out.str();
}

struct RunResult {
    RunSummary summary;
    std::filesystem::path trace_path;
    std::filesystem::path summary_path;
};

// Execute a scenario, streaming the trace to disk. Rows are retained
// on the decimation grid plus every decision cycle, so decision-based
// metrics stay exact at any decimation; metrics are computed from the
// retained rows and written alongside.
inline RunResult run_scenario(const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
    cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec && !std::filesystem::is_directory(out_dir))
        throw IoError(out_dir, "cannot create output directory");

    const auto trace_path = out_dir / cfg.trace_file;
    const auto summary_path = out_dir / cfg.summary_file;
    std::ofstream trace(trace_path, std::ios::binary);
    if (!trace) throw IoError(trace_path, "cannot open trace file");
    trace << kTraceHeader << '\n';

    const PlantModel plant = cfg.make_plant();
    Controller controller(cfg.make_controller_config());
    MetricsAccumulator metrics(cfg);
    controller.run(plant, cfg.n_cycles, [&](const TraceRecord& r) {
        if (r.cycle % cfg.decimate == 0 || r.p_avg) {
            write_trace_row(trace, r);
            metrics.add(r);
        }
    });
    trace.flush();
    if (!trace) throw IoError(trace_path, "write failed");

    RunResult result{metrics.finish(), trace_path, summary_path};
    std::ofstream summary(summary_path, std::ios::binary);
    if (!summary) throw IoError(summary_path, "cannot open summary file");
    summary << format_summary(result.summary);
    summary.flush();
    if (!summary) throw IoError(summary_path, "write failed");
    return result;
}

struct ComparisonReport {
    RunResult a;
    RunResult b;
};

// Run both scenarios into out_dir/a and out_dir/b.
inline ComparisonReport compare_runs(const ScenarioConfig& a, const ScenarioConfig& b,
                                     const std::filesystem::path& out_dir) {
    return {run_scenario(a, out_dir / "a"), run_scenario(b, out_dir / "b")};
}

inline std::string format_comparison(const ComparisonReport& r,
                                     const std::string& label_a, const std::string& label_b) {
    auto line = [](const std::string& key, const std::string& va, const std::string& vb) {
        return key + "_a = " + va + "\n" + key + "_b = " + vb + "\n";
    };
    const RunSummary& a = r.a.summary;
    const RunSummary& b = r.b.summary;
    std::string out;
    out += "# a = " + label_a + "\n";
    out += "# b = " + label_b + "\n";
    out += line("converged", a.converged ? "true" : "false", b.converged ? "true" : "false");
    out += line("convergence_decisions", std::to_string(a.convergence_decisions),
                std::to_string(b.convergence_decisions));
    out += line("tracking_efficiency", detail::format_real(a.tracking_efficiency),
                detail::format_real(b.tracking_efficiency));
    out += line("final_ratio", std::to_string(a.final_ratio), std::to_string(b.final_ratio));
    out += line("mean_estimated_controller_power",
                detail::format_real(a.mean_estimated_controller_power),
                detail::format_real(b.mean_estimated_controller_power));
    out += line("steady_state_band", std::to_string(a.steady_state_band),
                std::to_string(b.steady_state_band));
    return out;
}

// Two-column series of the fitted model over a supply range; mirrors a
// power-vs-supply sweep at fixed activity (1 MHz, full weights).
inline void write_power_vs_vdd_series(std::ostream& out, const PowerModelParams& p,
                                      double v_lo, double v_hi, int points) {
    for (int j = 0; j < points; ++j) {
        const double v = v_lo + (v_hi - v_lo) * j / (points - 1);
        const double uw_per_mhz = p.dynamic_coeff * 1e12 * v * v + p.leakage_coeff * 1e6 * v;
        out << detail::format_real(v) << ' ' << detail::format_real(uw_per_mhz) << '\n';
    }
}

// Two-column series of measured cells vs temperature at one supply.
inline void write_power_vs_temp_series(std::ostream& out, std::span<const PowerTableRow> rows,
                                       Corner corner, double v_dd) {
    for (const auto& r : rows)
        if (r.corner == corner && r.v_dd == v_dd)
            out << detail::format_real(r.temp_c) << ' '
                << detail::format_real(r.p_avg_uw_per_mhz) << '\n';
}

}  // namespace mpptsim
