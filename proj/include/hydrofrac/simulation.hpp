#pragma once

#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "hydrofrac/diagnostics.hpp"
#include "hydrofrac/presets.hpp"

namespace hydrofrac {

struct RunResult {
  State final_state;
  std::vector<DiagnosticsRecord> records;
  bool halted = false;
  std::string halt_reason;
};

using CheckpointSink = std::function<void(const State&)>;

inline State initial_state(const SimConfig& cfg) {
  return State{make_initial(cfg.grid(), cfg.initial_data, cfg.seed).to_spectral(), 0.0, 0};
}

/// Steps from the preset to t_end, recording every `output_every` steps plus
/// the initial and final states. The last step and any step crossing a
/// checkpoint time are shortened to land on it exactly.
inline RunResult run(const SimConfig& cfg, const CheckpointSink& on_checkpoint = {}) {
  cfg.validate();
  RunResult res;
  State s = initial_state(cfg);
  Monitor mon(cfg, s);
  res.records.push_back(mon.record(s));

  std::vector<double> pending = cfg.checkpoint_times;
  std::sort(pending.begin(), pending.end());
  std::size_t next_cp = 0;
  while (next_cp < pending.size() && pending[next_cp] <= 0.0) {
    if (on_checkpoint) on_checkpoint(s);
    ++next_cp;
  }

  const double omega0 = mon.initial_omega_linf();
  const double t_eps = 1e-13 * cfg.t_end;
  while (cfg.t_end - s.t > t_eps) {
    double dt = cfg.dt_policy == DtPolicy::fixed ? cfg.dt : stable_dt(s, cfg);
    double target = cfg.t_end;
    if (next_cp < pending.size()) target = std::min(target, pending[next_cp]);
    bool lands = false;
    if (s.t + dt >= target - t_eps) {
      dt = target - s.t;
      lands = true;
    }
    State next;
    StepStages stages;
    try {
      next = step_ifrk4(s, dt, cfg, &stages);
    } catch (const BlowupError& e) {
      res.halted = true;
      res.halt_reason = e.what();
      break;
    }
    if (lands) next.t = target;
    const auto verdict = blowup_check(linf_norm(vorticity(next.u)), omega0, true, cfg.blowup_factor);
    if (verdict != BlowupVerdict::proceed) {
      res.halted = true;
      res.halt_reason = std::string(to_string(verdict)) + " at t = " + config_detail::format_double(next.t);
      break;
    }
    s = std::move(next);
    mon.advance(s, stages);
    const bool at_end = cfg.t_end - s.t <= t_eps;
    if (at_end || s.step_count % static_cast<long>(cfg.output_every) == 0) res.records.push_back(mon.record(s));
    while (next_cp < pending.size() && pending[next_cp] <= s.t + t_eps) {
      if (pending[next_cp] <= cfg.t_end && on_checkpoint) on_checkpoint(s);
      ++next_cp;
    }
  }
  if (res.halted && res.records.back().t != s.t) res.records.push_back(mon.record(s));
  res.final_state = std::move(s);
  return res;
}

}  // namespace hydrofrac
