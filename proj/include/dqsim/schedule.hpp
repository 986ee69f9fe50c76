#pragma once

// Lowering of a two-qubit circuit to a pulse timeline on four channels
// (drive-Q1, drive-Q2, flux-Q1, flux-Q2).
//
// Gates are placed one after another in circuit order. XY gates become a flux-Q1
// pulse wrapped in two buffers; z rotations become flux pulses on the target's
// flux line lasting the Trotter step's interaction time; x/y rotations are drive
// pulses. Every flux pulse is followed by a wait, and each XY pulse start is
// padded to a multiple of the relative-phase period after the previous one.

#include "dqsim/circuit.hpp"
#include "dqsim/timing.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace dqsim {

class ScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TimingParams {
  double single_qubit_ns = 24.0;
  double buffer_ns = 16.0;
  double post_flux_wait_ns = 40.0;
  double detuning_mhz = 200.0;
  double phase_period_ns = 5.0;  // 1000 / detuning_mhz
  bool refocus = false;

  bool consistent() const { return std::abs(phase_period_ns * detuning_mhz - 1000.0) <= 1e-9; }
};

enum class Channel { DriveQ1, DriveQ2, FluxQ1, FluxQ2 };

inline const char* to_string(Channel c) {
  switch (c) {
    case Channel::DriveQ1: return "drive-Q1";
    case Channel::DriveQ2: return "drive-Q2";
    case Channel::FluxQ1: return "flux-Q1";
    case Channel::FluxQ2: return "flux-Q2";
  }
  return "?";
}

inline bool is_flux(Channel c) { return c == Channel::FluxQ1 || c == Channel::FluxQ2; }

inline Channel drive_channel(int qubit) { return qubit == 0 ? Channel::DriveQ1 : Channel::DriveQ2; }
inline Channel flux_channel(int qubit) { return qubit == 0 ? Channel::FluxQ1 : Channel::FluxQ2; }

namespace label {
inline constexpr const char* kBuffer = "buffer";
inline constexpr const char* kXY = "xy";
inline constexpr const char* kRefocusPlus = "refocus_p";   // Rx(+pi) on Q2
inline constexpr const char* kRefocusMinus = "refocus_m";  // Rx(-pi) on Q2
}  // namespace label

struct PulseEvent {
  Channel channel = Channel::DriveQ1;
  double start_ns = 0.0;
  double duration_ns = 0.0;
  std::string label;
  int gate = -1;  // index of the originating gate, -1 for inserted pulses

  double end_ns() const { return start_ns + duration_ns; }
};

struct PulseTimeline {
  std::vector<PulseEvent> events;
  double total_ns = 0.0;
  std::vector<double> gate_start_ns;          // one per circuit gate
  std::vector<double> refocus_unscheduled;    // start times of steps lacking a refocus window
};

/// Rotation angle of an inserted refocusing pulse.
inline double refocus_angle(const std::string& lbl) {
  if (lbl == label::kRefocusPlus) return kPi;
  if (lbl == label::kRefocusMinus) return -kPi;
  throw ScheduleError("refocus_angle: '" + lbl + "' is not a refocusing pulse");
}

namespace detail {

inline double flux_rz_duration(const CircuitMeta& meta, const TimingParams& t, double theta_to_ns) {
  if (auto st = meta.step_theta()) return theta_to_ns * *st;
  return t.single_qubit_ns;
}

inline std::size_t gates_per_step(const Circuit& c) {
  const auto n = static_cast<std::size_t>(std::max(c.meta.n_steps, 1));
  if (c.gates.empty() || c.gates.size() % n != 0) return std::max<std::size_t>(c.gates.size(), 1);
  return c.gates.size() / n;
}

}  // namespace detail

inline PulseTimeline schedule(const Circuit& c, const TimingParams& t, double theta_to_ns) {
  c.validate();
  if (c.n_qubits != 2) throw ScheduleError("schedule: only two-qubit circuits map onto Q1/Q2");
  if (!t.consistent()) throw ScheduleError("schedule: phase_period_ns * detuning_mhz must equal 1000");
  if (!(theta_to_ns >= 0.0)) throw ScheduleError("schedule: theta_to_ns must be >= 0");

  PulseTimeline tl;
  double cursor = 0.0;
  std::optional<double> prev_xy_pulse;
  for (std::size_t i = 0; i < c.gates.size(); ++i) {
    const Gate& g = c.gates[i];
    const int gi = static_cast<int>(i);
    double start = cursor;
    switch (g.kind) {
      case GateKind::XY: {
        if (g.qubit + g.qubit2 != 1) throw ScheduleError("schedule: XY must act on (Q1, Q2)");
        if (prev_xy_pulse) start += commensurate_padding(start + t.buffer_ns - *prev_xy_pulse, t.phase_period_ns);
        const double pulse_start = start + t.buffer_ns;
        const double pulse = theta_to_ns * g.theta;
        prev_xy_pulse = pulse_start;
        tl.events.push_back({Channel::FluxQ1, start, t.buffer_ns, label::kBuffer, gi});
        tl.events.push_back({Channel::FluxQ1, pulse_start, pulse, label::kXY, gi});
        tl.events.push_back({Channel::FluxQ1, pulse_start + pulse, t.buffer_ns, label::kBuffer, gi});
        cursor = pulse_start + pulse + t.buffer_ns + t.post_flux_wait_ns;
        break;
      }
      case GateKind::Rot: {
        if (g.axis == Axis::Z) {
          const double d = detail::flux_rz_duration(c.meta, t, theta_to_ns);
          tl.events.push_back({flux_channel(g.qubit), start, d, "rz", gi});
          cursor = start + d + t.post_flux_wait_ns;
        } else {
          tl.events.push_back({drive_channel(g.qubit), start, t.single_qubit_ns, g.axis == Axis::X ? "rx" : "ry", gi});
          cursor = start + t.single_qubit_ns;
        }
        break;
      }
      case GateKind::Wait:
        cursor = start + g.wait_ns;
        break;
    }
    tl.gate_start_ns.push_back(start);
  }
  tl.total_ns = cursor;

  if (t.refocus && !c.gates.empty()) {
    const std::size_t per_step = detail::gates_per_step(c);
    for (std::size_t s = 0; s < c.gates.size(); s += per_step) {
      double best_lo = 0.0;
      double best_len = -1.0;
      for (std::size_t i = s; i < std::min(s + per_step, c.gates.size()); ++i) {
        if (c.gates[i].kind != GateKind::Wait) continue;
        const double lo = tl.gate_start_ns[i];
        const double hi = i + 1 < c.gates.size() ? tl.gate_start_ns[i + 1] : tl.total_ns;
        if (hi - lo > best_len) {
          best_len = hi - lo;
          best_lo = lo;
        }
      }
      if (best_len >= 2.0 * t.single_qubit_ns) {
        const double mid = best_lo + 0.5 * best_len;
        tl.events.push_back({Channel::DriveQ2, mid - t.single_qubit_ns, t.single_qubit_ns, label::kRefocusPlus, -1});
        tl.events.push_back({Channel::DriveQ2, mid, t.single_qubit_ns, label::kRefocusMinus, -1});
      } else {
        tl.refocus_unscheduled.push_back(tl.gate_start_ns[s]);
      }
    }
  }

  std::stable_sort(tl.events.begin(), tl.events.end(), [](const PulseEvent& a, const PulseEvent& b) {
    if (a.start_ns != b.start_ns) return a.start_ns < b.start_ns;
    return static_cast<int>(a.channel) < static_cast<int>(b.channel);
  });
  return tl;
}

/// Decoherence slot per gate: from its start to the next gate's start.
inline std::vector<double> timeline_slot_durations(const PulseTimeline& tl) {
  std::vector<double> out(tl.gate_start_ns.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double next = i + 1 < out.size() ? tl.gate_start_ns[i + 1] : tl.total_ns;
    out[i] = next - tl.gate_start_ns[i];
  }
  return out;
}

struct Violation {
  std::string rule;
  Channel channel = Channel::DriveQ1;
  double time_ns = 0.0;
  std::string detail;
};

inline std::string to_string(const Violation& v) {
  std::ostringstream out;
  out << v.rule << " on " << to_string(v.channel) << " at " << v.time_ns << " ns";
  if (!v.detail.empty()) out << ": " << v.detail;
  return out.str();
}

inline std::vector<Violation> validate(const PulseTimeline& tl, const TimingParams& t) {
  constexpr double eps = 1e-9;
  std::vector<Violation> out;
  if (!t.consistent()) out.push_back({"timing_params", Channel::DriveQ1, 0.0, "phase_period_ns * detuning_mhz != 1000"});

  std::vector<const PulseEvent*> order;
  for (const auto& e : tl.events) order.push_back(&e);
  std::stable_sort(order.begin(), order.end(),
                   [](const PulseEvent* a, const PulseEvent* b) { return a->start_ns < b->start_ns; });

  // No two events overlap on one channel.
  for (Channel ch : {Channel::DriveQ1, Channel::DriveQ2, Channel::FluxQ1, Channel::FluxQ2}) {
    const PulseEvent* prev = nullptr;
    for (const PulseEvent* e : order) {
      if (e->channel != ch) continue;
      if (prev && e->start_ns < prev->end_ns() - eps) {
        out.push_back({"overlap", ch, e->start_ns, "'" + e->label + "' starts before '" + prev->label + "' ends"});
      }
      if (!prev || e->end_ns() > prev->end_ns()) prev = e;
    }
  }

  auto contiguous_on = [&](Channel ch, double at, const char* lbl, bool ending_at) {
    return std::any_of(tl.events.begin(), tl.events.end(), [&](const PulseEvent& e) {
      if (e.channel != ch || e.label != lbl) return false;
      return std::abs((ending_at ? e.end_ns() : e.start_ns) - at) <= eps;
    });
  };

  for (const auto& e : tl.events) {
    // Every XY flux pulse sits between two buffers.
    if (e.channel == Channel::FluxQ1 && e.label == label::kXY) {
      if (!contiguous_on(Channel::FluxQ1, e.start_ns, label::kBuffer, true)) {
        out.push_back({"buffer", e.channel, e.start_ns, "XY pulse not preceded by a buffer"});
      }
      if (!contiguous_on(Channel::FluxQ1, e.end_ns(), label::kBuffer, false)) {
        out.push_back({"buffer", e.channel, e.end_ns(), "XY pulse not followed by a buffer"});
      }
    }
    if (e.label == label::kBuffer && std::abs(e.duration_ns - t.buffer_ns) > eps) {
      out.push_back({"buffer", e.channel, e.start_ns, "buffer length differs from buffer_ns"});
    }
  }

  // Quiet period after each flux pulse (a buffer-XY-buffer chain counts as one pulse).
  for (const auto& e : tl.events) {
    if (!is_flux(e.channel)) continue;
    const bool chained = std::any_of(tl.events.begin(), tl.events.end(), [&](const PulseEvent& f) {
      return &f != &e && f.channel == e.channel && std::abs(f.start_ns - e.end_ns()) <= eps &&
             (f.label == label::kBuffer || f.label == label::kXY) &&
             (e.label == label::kBuffer || e.label == label::kXY);
    });
    if (chained) continue;
    for (const auto& f : tl.events) {
      if (&f == &e) continue;
      if (f.start_ns >= e.end_ns() - eps && f.start_ns < e.end_ns() + t.post_flux_wait_ns - eps) {
        std::ostringstream msg;
        msg << "'" << f.label << "' starts " << (f.start_ns - e.end_ns()) << " ns after flux pulse '" << e.label << "'";
        out.push_back({"post_flux_wait", f.channel, f.start_ns, msg.str()});
      }
    }
  }

  // Consecutive XY pulses are a whole number of phase periods apart.
  const PulseEvent* prev_xy = nullptr;
  for (const PulseEvent* e : order) {
    if (e->label != label::kXY) continue;
    if (prev_xy) {
      const double gap = e->start_ns - prev_xy->start_ns;
      const double r = std::fmod(gap, t.phase_period_ns);
      if (r > eps && t.phase_period_ns - r > eps) {
        std::ostringstream msg;
        msg << "XY gap " << gap << " ns is " << (t.phase_period_ns - r) << " ns short of a multiple of "
            << t.phase_period_ns << " ns";
        out.push_back({"commensurability", e->channel, e->start_ns, msg.str()});
      }
    }
    prev_xy = e;
  }

  // Refocusing pulses come as adjacent (+pi, -pi) pairs.
  for (const auto& e : tl.events) {
    if (e.label == label::kRefocusPlus && !contiguous_on(e.channel, e.end_ns(), label::kRefocusMinus, false)) {
      out.push_back({"refocus_pair", e.channel, e.start_ns, "unpaired refocusing pulse"});
    }
    if (e.label == label::kRefocusMinus && !contiguous_on(e.channel, e.start_ns, label::kRefocusPlus, true)) {
      out.push_back({"refocus_pair", e.channel, e.start_ns, "unpaired refocusing pulse"});
    }
  }
  for (double at : tl.refocus_unscheduled) {
    out.push_back({"refocus", Channel::DriveQ2, at, "no idle window of 2 x single_qubit_ns in this step"});
  }
  return out;
}

namespace detail {

inline std::string format_csv_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  std::string s = buf;
  if (s == "-0") s = "0";
  return s;
}

}  // namespace detail

/// CSV `channel,start_ns,duration_ns,label`, sorted by start then channel.
inline void write_timeline_csv(std::ostream& out, const PulseTimeline& tl) {
  std::vector<const PulseEvent*> order;
  for (const auto& e : tl.events) order.push_back(&e);
  std::stable_sort(order.begin(), order.end(), [](const PulseEvent* a, const PulseEvent* b) {
    if (a->start_ns != b->start_ns) return a->start_ns < b->start_ns;
    return static_cast<int>(a->channel) < static_cast<int>(b->channel);
  });
  out << "channel,start_ns,duration_ns,label\n";
  for (const PulseEvent* e : order) {
    out << to_string(e->channel) << ',' << detail::format_csv_number(e->start_ns) << ','
        << detail::format_csv_number(e->duration_ns) << ',' << e->label << '\n';
  }
}

inline std::string timeline_csv(const PulseTimeline& tl) {
  std::ostringstream out;
  write_timeline_csv(out, tl);
  return out.str();
}

}  // namespace dqsim
