#pragma once
// CSV and sidecar writers.  Float formatting is canonical (shortest
// round-trip), so identical runs produce byte-identical files; wall-clock
// metadata lives only in the sidecar.

#include <map>
#include <string>
#include <vector>

#include "ecoevo/diagnostics.hpp"
#include "ecoevo/solvers.hpp"
#include "ecoevo/trajectory.hpp"
#include "ecoevo/tss.hpp"

namespace ecoevo {

/// Shortest decimal string that round-trips the double.
std::string format_double(double v);

/// Heatmap matrix: header "t,<bin centers...>", one row per snapshot.
void write_heatmap_csv(const std::string& path, const Trajectory& traj);

/// Mass track "t,mass" plus the exact compensator and bracket columns.
void write_mass_csv(const std::string& path, const Trajectory& traj);

/// Event log "time,kind,parent_trait,child_trait".
void write_events_csv(const std::string& path, const Trajectory& traj);

/// Substitution log "t,from,to".
void write_tss_csv(const std::string& path, const TssPath& path_data);

/// One-line invasion summary table.
void write_invasion_csv(const std::string& path, const InvasionReport& rep);

/// Field solution: header "t,<nodes...>", one row per recorded time.
void write_field_csv(const std::string& path, const FieldSolution& sol);

/// ODE series: "t,n1[,n2,...]".
void write_ode_csv(const std::string& path, const OdeSeries& series);

/// Scaling table "K,replicates,var_mass,mean_mass,w1_vs_limit" + slope row.
void write_scaling_csv(const std::string& path, const ScalingReport& rep);

/// JSON sidecar: resolved config echo plus run metadata (seed, engine,
/// bin edges, version, warnings, timestamp).
void write_sidecar(const std::string& path,
                   const std::map<std::string, std::string>& resolved_config,
                   const std::map<std::string, std::string>& metadata,
                   const std::vector<double>& bin_edges,
                   const std::vector<std::string>& warnings);

}  // namespace ecoevo
