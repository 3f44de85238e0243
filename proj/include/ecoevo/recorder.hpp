#pragma once
// Trajectory recorder: turns the event stream into sampled time series.
//
// The engine announces each upcoming event time before applying it, so the
// recorder can emit snapshots and cadence points from the state that was in
// force on the elapsed interval, and can integrate the piecewise-constant
// drift and bracket integrands exactly.

#include "ecoevo/engine.hpp"

namespace ecoevo {

class Recorder {
public:
    Recorder(const AppliedModel& applied, const RecorderConfig& cfg, double t_end);

    /// Called once with the initial state and its rate totals.
    void begin(const Population& pop, double total_birth, double total_death,
               double base_minus, double pair);

    /// State `pop` persisted on [current_time, t); emits any snapshots and
    /// cadence points inside the interval, then advances the clock.
    void advance(double t, const Population& pop, double total_birth, double total_death,
                 double base_minus, double pair);

    void record_event(const Event& ev);

    /// Final snapshot handling at t_end and trajectory assembly.
    Trajectory finish(const Population& pop, const SimOptions& opts, EngineKind kind,
                      Trajectory::Stats stats, std::vector<std::string> warnings,
                      std::optional<double> extinction_time);

private:
    void emit_snapshot(double t, const Population& pop);
    void emit_mass_point(double t, const Population& pop);

    const AppliedModel* applied_;
    RecorderConfig cfg_;
    double t_end_;
    double now_ = 0.0;
    double next_snap_ = 0.0;
    double next_mass_ = 0.0;
    double drift_acc_ = 0.0;
    double bracket_acc_ = 0.0;
    double cur_base_ = 0.0;
    double cur_pair_ = 0.0;
    Trajectory out_;
};

}  // namespace ecoevo
