// Shared configuration and tracing for the two systolic-array simulators.
#pragma once

#include <utility>
#include <vector>

#include "csonepass/errors.hpp"
#include "csonepass/types.hpp"

namespace csonepass {

/// Cell taxonomy shared by both arrays. kBoundary is the coefficient /
/// divider generator on the array's feed diagonal (circular in the QR array,
/// rectangular in the inversion array); kInternal is the array body.
enum class CellKind { kBoundary, kInternal };

struct CellLatency {
  Index boundary{1};
  Index internal{1};
};

/// Array sizing and control. The array is instantiated at order n_max;
/// per-column enable signals gate cells off, and the active columns must
/// form a prefix [true x K, false x (n_max - K)].
struct SystolicConfig {
  Index n_max{0};
  std::vector<bool> enables;
  CellLatency latency{};
  bool record_events{true};

  static SystolicConfig exact(Index order) { return padded(order, order); }

  static SystolicConfig padded(Index order, Index n_max) {
    SystolicConfig config;
    config.n_max = n_max;
    config.enables.assign(static_cast<std::size_t>(n_max), false);
    for (Index i = 0; i < order && i < n_max; ++i)
      config.enables[static_cast<std::size_t>(i)] = true;
    return config;
  }

  Index active_order() const {
    Index k = 0;
    while (k < static_cast<Index>(enables.size()) && enables[static_cast<std::size_t>(k)]) ++k;
    return k;
  }

  void validate() const {
    if (n_max < 1) throw ConfigError("SystolicConfig: n_max must be positive");
    if (static_cast<Index>(enables.size()) != n_max)
      throw ConfigError("SystolicConfig: enables length must equal n_max");
    const Index k = active_order();
    for (Index i = k; i < n_max; ++i)
      if (enables[static_cast<std::size_t>(i)])
        throw ConfigError("SystolicConfig: enables must be a true-prefix mask");
    if (k < 1) throw ConfigError("SystolicConfig: no enabled columns");
    if (latency.boundary < 1 || latency.internal < 1)
      throw ConfigError("SystolicConfig: cell latencies must be >= 1");
  }
};

/// One cell firing: the values consumed, the values produced, and the value
/// left stored in the cell afterwards.
template <typename Scalar = double>
struct TraceEvent {
  Index cycle{0};
  Index row{0};
  Index col{0};
  CellKind kind{CellKind::kBoundary};
  std::vector<Complex<Scalar>> inputs;
  std::vector<Complex<Scalar>> outputs;
  Complex<Scalar> stored{};

  bool operator==(const TraceEvent&) const = default;
};

template <typename Scalar = double>
struct SystolicTrace {
  Index cycles{0};
  Index active_boundary_cells{0};
  Index active_internal_cells{0};
  std::vector<TraceEvent<Scalar>> events;
};

}  // namespace csonepass
