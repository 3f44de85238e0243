#include "ecoevo/io.hpp"

#include <charconv>
#include <fstream>

#include "json.hpp"

namespace ecoevo {

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // LF line ends on every platform
    if (!out) throw IoError("cannot open output file for writing: " + path);
    return out;
}

void finish(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("short write to " + path);
}

}  // namespace

void write_heatmap_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out = open_out(path);
    out << "t";
    for (std::size_t b = 0; b + 1 < traj.bin_edges.size(); ++b)
        out << "," << format_double(0.5 * (traj.bin_edges[b] + traj.bin_edges[b + 1]));
    out << "\n";
    for (std::size_t i = 0; i < traj.snap_times.size(); ++i) {
        out << format_double(traj.snap_times[i]);
        for (double v : traj.histogram[i]) out << "," << format_double(v);
        out << "\n";
    }
    finish(out, path);
}

void write_mass_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out = open_out(path);
    const bool affine = traj.base_term.size() == traj.mass_times.size() && !traj.base_term.empty();
    out << "t,mass,drift_integral,bracket_integral";
    if (affine) out << ",base_minus_term,pair_term";
    out << "\n";
    for (std::size_t i = 0; i < traj.mass_times.size(); ++i) {
        out << format_double(traj.mass_times[i]) << "," << format_double(traj.mass[i]) << ","
            << format_double(traj.drift1[i]) << "," << format_double(traj.bracket1[i]);
        if (affine)
            out << "," << format_double(traj.base_term[i]) << ","
                << format_double(traj.pair_term[i]);
        out << "\n";
    }
    finish(out, path);
}

void write_events_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out = open_out(path);
    out << "time,kind,parent_trait,child_trait\n";
    for (const Event& e : traj.events)
        out << format_double(e.time) << "," << to_string(e.kind) << ","
            << format_double(e.parent_trait) << "," << format_double(e.child_trait) << "\n";
    finish(out, path);
}

void write_tss_csv(const std::string& path, const TssPath& path_data) {
    std::ofstream out = open_out(path);
    out << "t,from,to\n";
    for (const TssJump& j : path_data.jumps)
        out << format_double(j.time) << "," << format_double(j.from) << ","
            << format_double(j.to) << "\n";
    finish(out, path);
}

void write_invasion_csv(const std::string& path, const InvasionReport& rep) {
    std::ofstream out = open_out(path);
    out << "y,x,K,replicates,completed,timeouts,fixations,fix_freq,predicted,sigma,"
           "mean_theta0\n";
    out << format_double(rep.y) << "," << format_double(rep.x) << "," << format_double(rep.K)
        << "," << rep.replicates << "," << rep.completed << "," << rep.timeouts << ","
        << rep.fixations << "," << format_double(rep.fix_freq) << ","
        << format_double(rep.predicted) << "," << format_double(rep.sigma) << ","
        << format_double(rep.mean_theta0) << "\n";
    finish(out, path);
}

void write_field_csv(const std::string& path, const FieldSolution& sol) {
    std::ofstream out = open_out(path);
    out << "t";
    for (int i = 0; i < sol.grid.nodes(); ++i) out << "," << format_double(sol.grid.node(i));
    out << "\n";
    for (std::size_t ti = 0; ti < sol.times.size(); ++ti) {
        out << format_double(sol.times[ti]);
        for (double v : sol.xi[ti]) out << "," << format_double(v);
        out << "\n";
    }
    finish(out, path);
}

void write_ode_csv(const std::string& path, const OdeSeries& series) {
    std::ofstream out = open_out(path);
    out << "t";
    const std::size_t dim = series.values.empty() ? 0 : series.values.front().size();
    for (std::size_t d = 0; d < dim; ++d) out << ",n" << d + 1;
    out << "\n";
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        out << format_double(series.times[i]);
        for (double v : series.values[i]) out << "," << format_double(v);
        out << "\n";
    }
    finish(out, path);
}

void write_scaling_csv(const std::string& path, const ScalingReport& rep) {
    std::ofstream out = open_out(path);
    out << "K,replicates,var_mass,mean_mass,w1_vs_limit\n";
    for (const ScalingRow& row : rep.rows)
        out << format_double(row.K) << "," << row.replicates << "," << format_double(row.var_mass)
            << "," << format_double(row.mean_mass) << "," << format_double(row.w1_vs_limit)
            << "\n";
    out << "# slope," << format_double(rep.slope) << "\n";
    finish(out, path);
}

void write_sidecar(const std::string& path,
                   const std::map<std::string, std::string>& resolved_config,
                   const std::map<std::string, std::string>& metadata,
                   const std::vector<double>& bin_edges,
                   const std::vector<std::string>& warnings) {
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["config"] = resolved_config;
    for (const auto& [k, v] : metadata) j[k] = v;
    j["bin_edges"] = bin_edges;
    j["warnings"] = warnings;
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
    finish(out, path);
}

}  // namespace ecoevo
