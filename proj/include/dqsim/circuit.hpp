#pragma once

// Gate set and circuit IR.
//
// Text format, one gate per line:
//   XY theta=<rad> [pair=<i>,<j>]
//   ROT axis=<x|y|z> angle=<rad> q=<idx>
//   WAIT ns=<float>
// Lines starting with '#' are comments; "# key=value ..." lines carry metadata.

#include "dqsim/linalg.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace dqsim {

class CircuitError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class GateKind { XY, Rot, Wait };
enum class Axis { X, Y, Z };

inline char axis_char(Axis a) {
  switch (a) {
    case Axis::X: return 'x';
    case Axis::Y: return 'y';
    case Axis::Z: return 'z';
  }
  return '?';
}

inline Axis parse_axis(const std::string& s) {
  if (s == "x" || s == "X") return Axis::X;
  if (s == "y" || s == "Y") return Axis::Y;
  if (s == "z" || s == "Z") return Axis::Z;
  throw CircuitError("unknown rotation axis '" + s + "'");
}

struct Gate {
  GateKind kind = GateKind::Wait;
  double theta = 0.0;     // XY: quantum phase angle 2|J|tau
  Axis axis = Axis::X;    // Rot
  double angle = 0.0;     // Rot: radians
  int qubit = 0;          // Rot: target; XY: first qubit of the pair
  int qubit2 = 1;         // XY: second qubit of the pair
  double wait_ns = 0.0;   // Wait

  static Gate xy(double theta, int a = 0, int b = 1) {
    Gate g;
    g.kind = GateKind::XY;
    g.theta = theta;
    g.qubit = a;
    g.qubit2 = b;
    return g;
  }
  static Gate rot(Axis axis, double angle, int qubit) {
    Gate g;
    g.kind = GateKind::Rot;
    g.axis = axis;
    g.angle = angle;
    g.qubit = qubit;
    return g;
  }
  static Gate rx(double angle, int q) { return rot(Axis::X, angle, q); }
  static Gate ry(double angle, int q) { return rot(Axis::Y, angle, q); }
  static Gate rz(double angle, int q) { return rot(Axis::Z, angle, q); }
  static Gate wait(double ns) {
    Gate g;
    g.kind = GateKind::Wait;
    g.wait_ns = ns;
    return g;
  }

  bool is_flux() const { return kind == GateKind::XY || (kind == GateKind::Rot && axis == Axis::Z); }

  bool operator==(const Gate&) const = default;
};

/// Provenance of a compiled circuit.
struct CircuitMeta {
  std::string protocol;   // "xy", "heisenberg", "ising" or empty for hand-built circuits
  double theta = 0.0;
  int n_steps = 0;
  double b_over_j = 0.0;

  /// Phase angle allotted to one Trotter step, or nullopt without metadata.
  std::optional<double> step_theta() const {
    if (n_steps <= 0) return std::nullopt;
    return theta / n_steps;
  }

  bool operator==(const CircuitMeta&) const = default;
};

struct Circuit {
  int n_qubits = 2;
  int j_sign = -1;
  std::vector<Gate> gates;
  CircuitMeta meta;

  void validate() const {
    if (n_qubits < 1) throw CircuitError("circuit: n_qubits must be >= 1");
    if (j_sign != 1 && j_sign != -1) throw CircuitError("circuit: j_sign must be +1 or -1");
    for (std::size_t i = 0; i < gates.size(); ++i) {
      const Gate& g = gates[i];
      const std::string where = "gate " + std::to_string(i) + ": ";
      switch (g.kind) {
        case GateKind::XY:
          if (!(g.theta >= 0.0) || !std::isfinite(g.theta)) throw CircuitError(where + "XY theta must be finite and >= 0");
          if (g.qubit == g.qubit2 || g.qubit < 0 || g.qubit2 < 0 || g.qubit >= n_qubits || g.qubit2 >= n_qubits) {
            throw CircuitError(where + "invalid XY pair");
          }
          break;
        case GateKind::Rot:
          if (!std::isfinite(g.angle)) throw CircuitError(where + "rotation angle must be finite");
          if (g.qubit < 0 || g.qubit >= n_qubits) throw CircuitError(where + "qubit index out of range");
          break;
        case GateKind::Wait:
          if (!(g.wait_ns >= 0.0) || !std::isfinite(g.wait_ns)) throw CircuitError(where + "wait must be finite and >= 0");
          break;
      }
    }
  }

  bool operator==(const Circuit&) const = default;
};

namespace detail {

/// Two-qubit XY block exp(-i (J/2)(XX+YY) tau) with J tau = j_sign theta / 2, on qubits (a, b).
inline ComplexMatrix xy_unitary(double theta, int a, int b, int n_qubits, int j_sign) {
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  const double c = std::cos(0.5 * theta);
  const Complex s = -kI * static_cast<double>(j_sign) * std::sin(0.5 * theta);
  const Eigen::Index bit_a = Eigen::Index{1} << (n_qubits - 1 - a);
  const Eigen::Index bit_b = Eigen::Index{1} << (n_qubits - 1 - b);
  ComplexMatrix u = ComplexMatrix::Identity(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const bool on_a = (k & bit_a) != 0;
    const bool on_b = (k & bit_b) != 0;
    if (on_a == on_b) continue;  // |up up>, |down down> untouched
    const Eigen::Index partner = k ^ bit_a ^ bit_b;
    u(k, k) = c;
    u(partner, k) = s;
  }
  return u;
}

}  // namespace detail

/// exp(-i angle sigma_axis / 2).
inline ComplexMatrix rotation_2x2(Axis axis, double angle) {
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  ComplexMatrix r(2, 2);
  switch (axis) {
    case Axis::X: r << c, -kI * s, -kI * s, c; break;
    case Axis::Y: r << c, -s, s, c; break;
    case Axis::Z: r << std::exp(-kI * 0.5 * angle), 0.0, 0.0, std::exp(kI * 0.5 * angle); break;
  }
  return r;
}

inline ComplexMatrix gate_unitary(const Gate& g, int n_qubits, int j_sign = -1) {
  const Eigen::Index d = Eigen::Index{1} << n_qubits;
  switch (g.kind) {
    case GateKind::XY:
      if (g.qubit < 0 || g.qubit2 < 0 || g.qubit >= n_qubits || g.qubit2 >= n_qubits || g.qubit == g.qubit2) {
        throw CircuitError("gate_unitary: invalid XY pair");
      }
      return detail::xy_unitary(g.theta, g.qubit, g.qubit2, n_qubits, j_sign);
    case GateKind::Rot:
      return embed(rotation_2x2(g.axis, g.angle), g.qubit, n_qubits);
    case GateKind::Wait:
      return ComplexMatrix::Identity(d, d);
  }
  throw CircuitError("gate_unitary: unknown gate kind");
}

/// Product of gate unitaries, first gate rightmost.
inline ComplexMatrix circuit_unitary(const Circuit& c) {
  c.validate();
  const Eigen::Index d = Eigen::Index{1} << c.n_qubits;
  ComplexMatrix u = ComplexMatrix::Identity(d, d);
  for (const Gate& g : c.gates) u = gate_unitary(g, c.n_qubits, c.j_sign) * u;
  return u;
}

// ---------------------------------------------------------------------------
// Text serialization

namespace detail {

inline std::string format_exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);
  return buf;
}

inline std::map<std::string, std::string> parse_fields(std::istringstream& in, int line_no) {
  std::map<std::string, std::string> fields;
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw CircuitError("line " + std::to_string(line_no) + ": malformed field '" + tok + "'");
    }
    fields[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return fields;
}

inline double parse_double(const std::string& s, int line_no) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw CircuitError("line " + std::to_string(line_no) + ": bad number '" + s + "'");
  return v;
}

inline int parse_int(const std::string& s, int line_no) {
  const double v = parse_double(s, line_no);
  if (v != std::floor(v)) throw CircuitError("line " + std::to_string(line_no) + ": expected integer '" + s + "'");
  return static_cast<int>(v);
}

inline const std::string& require_field(const std::map<std::string, std::string>& f, const char* key, int line_no) {
  auto it = f.find(key);
  if (it == f.end()) throw CircuitError("line " + std::to_string(line_no) + ": missing field '" + key + "'");
  return it->second;
}

}  // namespace detail

inline void write_circuit(std::ostream& out, const Circuit& c) {
  out << "# n_qubits=" << c.n_qubits << " j_sign=" << c.j_sign << '\n';
  if (!c.meta.protocol.empty()) {
    out << "# protocol=" << c.meta.protocol << " theta=" << detail::format_exact(c.meta.theta)
        << " n_steps=" << c.meta.n_steps << " b_over_j=" << detail::format_exact(c.meta.b_over_j) << '\n';
  }
  for (const Gate& g : c.gates) {
    switch (g.kind) {
      case GateKind::XY:
        out << "XY theta=" << detail::format_exact(g.theta);
        if (g.qubit != 0 || g.qubit2 != 1) out << " pair=" << g.qubit << ',' << g.qubit2;
        break;
      case GateKind::Rot:
        out << "ROT axis=" << axis_char(g.axis) << " angle=" << detail::format_exact(g.angle) << " q=" << g.qubit;
        break;
      case GateKind::Wait:
        out << "WAIT ns=" << detail::format_exact(g.wait_ns);
        break;
    }
    out << '\n';
  }
}

inline std::string to_text(const Circuit& c) {
  std::ostringstream out;
  write_circuit(out, c);
  return out.str();
}

inline Circuit read_circuit(std::istream& in) {
  Circuit c;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream rest(line.substr(1));
      std::map<std::string, std::string> f;
      try {
        f = detail::parse_fields(rest, line_no);
      } catch (const CircuitError&) {
        continue;  // free-form comment
      }
      for (const auto& [k, v] : f) {
        if (k == "n_qubits") c.n_qubits = detail::parse_int(v, line_no);
        else if (k == "j_sign") c.j_sign = detail::parse_int(v, line_no);
        else if (k == "protocol") c.meta.protocol = v;
        else if (k == "theta") c.meta.theta = detail::parse_double(v, line_no);
        else if (k == "n_steps") c.meta.n_steps = detail::parse_int(v, line_no);
        else if (k == "b_over_j") c.meta.b_over_j = detail::parse_double(v, line_no);
      }
      continue;
    }
    std::istringstream ls(line);
    std::string op;
    ls >> op;
    const auto f = detail::parse_fields(ls, line_no);
    if (op == "XY") {
      Gate g = Gate::xy(detail::parse_double(detail::require_field(f, "theta", line_no), line_no));
      if (auto it = f.find("pair"); it != f.end()) {
        const auto comma = it->second.find(',');
        if (comma == std::string::npos) throw CircuitError("line " + std::to_string(line_no) + ": bad pair");
        g.qubit = detail::parse_int(it->second.substr(0, comma), line_no);
        g.qubit2 = detail::parse_int(it->second.substr(comma + 1), line_no);
      }
      c.gates.push_back(g);
    } else if (op == "ROT") {
      c.gates.push_back(Gate::rot(parse_axis(detail::require_field(f, "axis", line_no)),
                                  detail::parse_double(detail::require_field(f, "angle", line_no), line_no),
                                  detail::parse_int(detail::require_field(f, "q", line_no), line_no)));
    } else if (op == "WAIT") {
      c.gates.push_back(Gate::wait(detail::parse_double(detail::require_field(f, "ns", line_no), line_no)));
    } else {
      throw CircuitError("line " + std::to_string(line_no) + ": unknown gate '" + op + "'");
    }
  }
  c.validate();
  return c;
}

inline Circuit circuit_from_text(const std::string& text) {
  std::istringstream in(text);
  return read_circuit(in);
}

}  // namespace dqsim
