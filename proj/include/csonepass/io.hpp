// Line-oriented text formats (UTF-8, LF): signal/recon/truth/meas files with
// 17-significant-digit reals, the flat key=value reconstruction report, and
// the systolic trace log.
#pragma once

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "csonepass/complexity.hpp"
#include "csonepass/detection.hpp"
#include "csonepass/errors.hpp"
#include "csonepass/lsq_solver.hpp"
#include "csonepass/signal_model.hpp"
#include "csonepass/systolic.hpp"
#include "csonepass/types.hpp"

namespace csonepass::io {

inline constexpr std::string_view kMagic = "# cs-onepass v1";

enum class FileKind { kSignal, kMeas, kTruth, kRecon };

inline std::string_view kind_name(FileKind kind) {
  switch (kind) {
    case FileKind::kSignal: return "signal";
    case FileKind::kMeas: return "meas";
    case FileKind::kTruth: return "truth";
    case FileKind::kRecon: return "recon";
  }
  throw IoError("unknown file kind");
}

/// %.17g — round-trips every double exactly.
inline std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline double parse_real(const std::string& tok) {
  std::size_t used = 0;
  double value = 0;
  try {
    value = std::stod(tok, &used);
  } catch (const std::exception&) {
    throw IoError("malformed real value: " + tok);
  }
  if (used != tok.size()) throw IoError("malformed real value: " + tok);
  return value;
}

inline Index parse_index(const std::string& tok) {
  std::size_t used = 0;
  long long value = 0;
  try {
    value = std::stoll(tok, &used);
  } catch (const std::exception&) {
    throw IoError("malformed integer: " + tok);
  }
  if (used != tok.size()) throw IoError("malformed integer: " + tok);
  return static_cast<Index>(value);
}

struct Header {
  FileKind kind;
  Index n_total;
  std::optional<Index> m;
  std::vector<std::string> data_lines;
};

inline Header read_lines(std::istream& in, FileKind expected) {
  Header header{expected, 0, std::nullopt, {}};
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty file");
  const std::string expected_head =
      std::string(kMagic) + " " + std::string(kind_name(expected));
  if (line != expected_head)
    throw IoError("bad header: expected '" + expected_head + "', got '" + line + "'");
  if (!std::getline(in, line)) throw IoError("missing length line");
  auto toks = split_ws(line);
  if (toks.size() != 2 || toks[0] != "n") throw IoError("malformed length line: " + line);
  header.n_total = parse_index(toks[1]);
  if (expected == FileKind::kMeas) {
    if (!std::getline(in, line)) throw IoError("missing measurement count line");
    toks = split_ws(line);
    if (toks.size() != 2 || toks[0] != "m") throw IoError("malformed count line: " + line);
    header.m = parse_index(toks[1]);
  }
  while (std::getline(in, line)) {
    if (!line.empty()) header.data_lines.push_back(line);
  }
  return header;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: LF endings everywhere
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

}  // namespace detail

inline void write_signal(std::ostream& out, const TimeSignal<double>& x, FileKind kind) {
  if (kind != FileKind::kSignal && kind != FileKind::kRecon)
    throw IoError("write_signal: kind must be signal or recon");
  out << kMagic << ' ' << kind_name(kind) << '\n';
  out << "n " << x.length() << '\n';
  for (Index t = 0; t < x.length(); ++t)
    out << t << ' ' << format_real(x.samples[t].real()) << ' '
        << format_real(x.samples[t].imag()) << '\n';
}

inline void write_signal(const std::string& path, const TimeSignal<double>& x, FileKind kind) {
  auto out = detail::open_out(path);
  write_signal(out, x, kind);
}

inline TimeSignal<double> read_signal(std::istream& in, FileKind kind) {
  const auto header = detail::read_lines(in, kind);
  if (header.n_total < 1) throw IoError("signal length must be positive");
  if (static_cast<Index>(header.data_lines.size()) != header.n_total)
    throw IoError("signal file: sample count does not match header");
  ComplexVector<double> samples(header.n_total);
  for (Index t = 0; t < header.n_total; ++t) {
    const auto toks = detail::split_ws(header.data_lines[static_cast<std::size_t>(t)]);
    if (toks.size() != 3) throw IoError("signal file: malformed sample line");
    if (detail::parse_index(toks[0]) != t) throw IoError("signal file: indices must be 0..N-1 in order");
    samples[t] = {detail::parse_real(toks[1]), detail::parse_real(toks[2])};
  }
  return {std::move(samples)};
}

inline TimeSignal<double> read_signal(const std::string& path, FileKind kind) {
  auto in = detail::open_in(path);
  return read_signal(in, kind);
}

inline void write_truth(std::ostream& out, const SparseSignal<double>& spec) {
  out << kMagic << ' ' << kind_name(FileKind::kTruth) << '\n';
  out << "n " << spec.n_total() << '\n';
  for (const auto& c : spec.components())
    out << c.freq_index << ' ' << format_real(c.amplitude.real()) << ' '
        << format_real(c.amplitude.imag()) << '\n';
}

inline void write_truth(const std::string& path, const SparseSignal<double>& spec) {
  auto out = detail::open_out(path);
  write_truth(out, spec);
}

inline SparseSignal<double> read_truth(std::istream& in) {
  const auto header = detail::read_lines(in, FileKind::kTruth);
  std::vector<SignalComponent<double>> components;
  for (const auto& line : header.data_lines) {
    const auto toks = detail::split_ws(line);
    if (toks.size() != 3) throw IoError("truth file: malformed component line");
    components.push_back({detail::parse_index(toks[0]),
                          {detail::parse_real(toks[1]), detail::parse_real(toks[2])}});
  }
  return SparseSignal<double>(header.n_total, std::move(components));
}

inline SparseSignal<double> read_truth(const std::string& path) {
  auto in = detail::open_in(path);
  return read_truth(in);
}

inline void write_measurements(std::ostream& out, const MeasurementSet<double>& meas) {
  out << kMagic << ' ' << kind_name(FileKind::kMeas) << '\n';
  out << "n " << meas.n_total() << '\n';
  out << "m " << meas.size() << '\n';
  for (Index a = 0; a < meas.size(); ++a)
    out << meas.pattern().positions()[static_cast<std::size_t>(a)] << ' '
        << format_real(meas.values()[a].real()) << ' '
        << format_real(meas.values()[a].imag()) << '\n';
}

inline void write_measurements(const std::string& path, const MeasurementSet<double>& meas) {
  auto out = detail::open_out(path);
  write_measurements(out, meas);
}

inline MeasurementSet<double> read_measurements(std::istream& in) {
  const auto header = detail::read_lines(in, FileKind::kMeas);
  if (!header.m) throw IoError("measurement file: missing m line");
  if (static_cast<Index>(header.data_lines.size()) != *header.m)
    throw IoError("measurement file: value count does not match header");
  std::vector<Index> positions;
  ComplexVector<double> values(*header.m);
  for (Index a = 0; a < *header.m; ++a) {
    const auto toks = detail::split_ws(header.data_lines[static_cast<std::size_t>(a)]);
    if (toks.size() != 3) throw IoError("measurement file: malformed line");
    positions.push_back(detail::parse_index(toks[0]));
    values[a] = {detail::parse_real(toks[1]), detail::parse_real(toks[2])};
  }
  return MeasurementSet<double>(SamplingPattern(header.n_total, std::move(positions)),
                                std::move(values));
}

inline MeasurementSet<double> read_measurements(const std::string& path) {
  auto in = detail::open_in(path);
  return read_measurements(in);
}

/// Flat key=value report for one reconstruction run.
inline void write_report(std::ostream& out, const ReconstructionReport<double>& report) {
  const Index k = report.detected_support.count();
  out << "schema=cs-onepass.report.v1\n";
  out << "status=" << (report.empty_support ? "empty-support" : "ok") << '\n';
  out << "n=" << report.n_total << '\n';
  out << "m=" << report.m << '\n';
  out << "k=" << k << '\n';
  out << "probability=" << format_real(report.probability) << '\n';
  out << "threshold.mode="
      << (report.threshold_mode == ThresholdMode::kExact ? "exact" : "approx") << '\n';
  out << "sigma_sq=" << format_real(report.sigma_sq) << '\n';
  out << "threshold=" << format_real(report.threshold_used) << '\n';
  out << "support=";
  for (Index i = 0; i < k; ++i) {
    if (i > 0) out << ',';
    out << report.detected_support.indices()[static_cast<std::size_t>(i)];
  }
  out << '\n';
  for (Index i = 0; i < k; ++i) {
    out << "amp." << i << ".re=" << format_real(report.amplitudes[i].real()) << '\n';
    out << "amp." << i << ".im=" << format_real(report.amplitudes[i].imag()) << '\n';
  }
  out << "residual_norm=" << format_real(report.residual_norm) << '\n';
  if (k >= 1) {
    const FlopReport qfree = flops_qfree(k, report.m);
    const FlopReport direct = flops_direct(k, report.m);
    out << "flops.qfree.add=" << qfree.additions << '\n';
    out << "flops.qfree.mul=" << qfree.multiplications << '\n';
    out << "flops.direct.add=" << direct.additions << '\n';
    out << "flops.direct.mul=" << direct.multiplications << '\n';
    out << "flops.direct.extra=" << direct.extra << '\n';
    if (report.m > k) {
      const QrFlops qr = flops_qr(report.m, k);
      out << "flops.qr.r=" << qr.r_flops << '\n';
      out << "flops.qr.q_avoided=" << qr.q_flops_avoided << '\n';
    }
    const CycleReport cycles = cycle_report(k, report.m);
    out << "cycles.threshold=" << cycles.threshold_block << '\n';
    out << "cycles.comparator=" << cycles.comparator << '\n';
    out << "cycles.r=" << cycles.r_block << '\n';
    out << "cycles.inversion=" << cycles.inversion_block << '\n';
    out << "cycles.solver=" << cycles.solver_block << '\n';
    out << "cycles.estimates=comparator,solver\n";
  }
}

inline void write_report(const std::string& path, const ReconstructionReport<double>& report) {
  auto out = detail::open_out(path);
  write_report(out, report);
}

inline std::string format_complex(const Complex<double>& z) {
  return "(" + format_real(z.real()) + "," + format_real(z.imag()) + ")";
}

/// Per-cycle event log of a systolic run.
inline void write_trace(std::ostream& out, const SystolicTrace<double>& trace,
                        std::string_view array_name, Index n_max) {
  out << kMagic << " trace\n";
  out << "array " << array_name << '\n';
  out << "nmax " << n_max << '\n';
  out << "cycles " << trace.cycles << '\n';
  out << "cells.boundary " << trace.active_boundary_cells << '\n';
  out << "cells.internal " << trace.active_internal_cells << '\n';
  out << "events " << trace.events.size() << '\n';
  for (const auto& e : trace.events) {
    out << "event c=" << e.cycle << " cell=" << e.row << ',' << e.col << " kind="
        << (e.kind == CellKind::kBoundary ? "boundary" : "internal") << " in=";
    for (const auto& v : e.inputs) out << format_complex(v);
    out << " out=";
    for (const auto& v : e.outputs) out << format_complex(v);
    out << " stored=" << format_complex(e.stored) << '\n';
  }
}

}  // namespace csonepass::io
