// Command-line driver: generate / sample / reconstruct / simulate /
// complexity / sweep, with deterministic text file formats.
//
// Exit codes: 0 success, 2 usage, 3 I/O, 4 empty support, 5 singular solve.

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "csonepass/complexity.hpp"
#include "csonepass/cs_matrix.hpp"
#include "csonepass/detection.hpp"
#include "csonepass/errors.hpp"
#include "csonepass/givens_qr.hpp"
#include "csonepass/io.hpp"
#include "csonepass/lsq_solver.hpp"
#include "csonepass/signal_model.hpp"
#include "csonepass/systolic.hpp"
#include "csonepass/tri_inv.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitEmptySupport = 4;
constexpr int kExitSingular = 5;

using csonepass::Index;

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("CS_ONEPASS_SEED")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw csonepass::RangeError("CS_ONEPASS_SEED is not a valid integer");
    return value;
  }
  return 1;
}

// Accepts "1", "-0.5", "1+0j", "0.5-0.25j", "1.5j", "-j".
std::complex<double> parse_complex(const std::string& text) {
  if (text.empty()) throw csonepass::RangeError("empty complex literal");
  if (text.back() != 'j') {
    return {csonepass::io::detail::parse_real(text), 0.0};
  }
  std::string body = text.substr(0, text.size() - 1);
  // split at the last +/- that is not a leading sign or an exponent sign
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) {
    if (body.empty() || body == "+" || body == "-") body += "1";
    return {0.0, csonepass::io::detail::parse_real(body)};
  }
  std::string im = body.substr(split);
  if (im == "+" || im == "-") im += "1";
  return {csonepass::io::detail::parse_real(body.substr(0, split)),
          csonepass::io::detail::parse_real(im)};
}

std::vector<Index> parse_index_list(const std::string& text) {
  std::vector<Index> out;
  std::string tok;
  std::istringstream in(text);
  while (std::getline(in, tok, ','))
    if (!tok.empty()) out.push_back(csonepass::io::detail::parse_index(tok));
  if (out.empty()) throw csonepass::RangeError("empty index list");
  return out;
}

int cmd_generate(Index n, std::optional<Index> k, const std::vector<std::string>& component_args,
                 std::optional<std::uint64_t> seed_flag, const std::string& out_path,
                 const std::string& truth_path) {
  std::vector<csonepass::SignalComponent<double>> components;
  if (k && !component_args.empty())
    throw csonepass::RangeError("give either --k or --components, not both");
  if (!k && component_args.empty())
    throw csonepass::RangeError("one of --k or --components is required");
  if (k) {
    const auto support = csonepass::draw_pattern(n, *k, resolve_seed(seed_flag));
    for (Index freq : support.positions()) components.push_back({freq, {1.0, 0.0}});
  } else {
    for (const auto& arg : component_args) {
      std::string item;
      std::istringstream in(arg);
      while (std::getline(in, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos)
          throw csonepass::RangeError("component must look like k:re+imj, got " + item);
        components.push_back({csonepass::io::detail::parse_index(item.substr(0, colon)),
                              parse_complex(item.substr(colon + 1))});
      }
    }
  }
  const csonepass::SparseSignal<double> spec(n, std::move(components));
  csonepass::io::write_signal(out_path, csonepass::synthesize(spec),
                              csonepass::io::FileKind::kSignal);
  csonepass::io::write_truth(truth_path, spec);
  return kExitOk;
}

int cmd_sample(const std::string& signal_path, Index m, std::optional<std::uint64_t> seed_flag,
               const std::string& out_path) {
  const auto x = csonepass::io::read_signal(signal_path, csonepass::io::FileKind::kSignal);
  const auto pattern = csonepass::draw_pattern(x.length(), m, resolve_seed(seed_flag));
  csonepass::io::write_measurements(out_path, csonepass::sample(x, pattern));
  return kExitOk;
}

int cmd_reconstruct(const std::string& meas_path, double probability, const std::string& mode,
                    std::optional<double> constant, const std::string& out_path,
                    const std::string& report_path) {
  const auto meas = csonepass::io::read_measurements(meas_path);
  csonepass::ThresholdParams<double> params;
  params.probability = probability;
  if (mode == "approx") {
    params.mode = csonepass::ThresholdMode::kApproxConstant;
    params.approx_constant =
        constant ? *constant : csonepass::approx_constant(probability, meas.n_total());
  } else if (mode != "exact") {
    throw csonepass::RangeError("--mode must be exact or approx");
  }
  const auto result = csonepass::run_pipeline(meas, meas.n_total(), params);
  csonepass::io::write_signal(out_path, result.reconstruction, csonepass::io::FileKind::kRecon);
  csonepass::io::write_report(report_path, result.report);
  return result.report.empty_support ? kExitEmptySupport : kExitOk;
}

int cmd_simulate(const std::string& meas_path, const std::string& support_arg,
                 const std::string& support_from, const std::string& array, Index n_max_flag,
                 Index latency_boundary, Index latency_internal, const std::string& trace_path,
                 bool no_events) {
  const auto meas = csonepass::io::read_measurements(meas_path);
  std::vector<Index> indices;
  if (!support_arg.empty() && !support_from.empty())
    throw csonepass::RangeError("give either --support or --support-from, not both");
  if (!support_arg.empty()) {
    indices = parse_index_list(support_arg);
  } else if (!support_from.empty()) {
    const auto truth = csonepass::io::read_truth(support_from);
    if (truth.n_total() != meas.n_total())
      throw csonepass::DimensionError("truth and measurement N differ");
    for (const auto& c : truth.components()) indices.push_back(c.freq_index);
    std::sort(indices.begin(), indices.end());
  } else {
    throw csonepass::RangeError("one of --support or --support-from is required");
  }
  const auto support = csonepass::SupportSet::from_indices(meas.n_total(), indices);
  const auto a = csonepass::build_cs_matrix<double>(meas.pattern(), support, meas.n_total());
  const Index k = support.count();
  const Index n_max = n_max_flag > 0 ? n_max_flag : k;
  if (n_max < k) throw csonepass::ConfigError("--nmax must be >= the support size");
  auto config = csonepass::SystolicConfig::padded(k, n_max);
  config.latency = {latency_boundary, latency_internal};
  config.record_events = !no_events;

  std::optional<std::ofstream> trace_out;
  if (!trace_path.empty()) trace_out = csonepass::io::detail::open_out(trace_path);

  const bool run_qr = array == "qr" || array == "both";
  const bool run_inv = array == "inv" || array == "both";
  if (!run_qr && !run_inv) throw csonepass::RangeError("--array must be qr, inv, or both");

  std::optional<csonepass::RFactor<double>> r;
  if (run_qr) {
    auto qr = csonepass::systolic_qr(a, config);
    std::cout << "qr.cycles=" << qr.trace.cycles << '\n';
    std::cout << "qr.cells.boundary=" << qr.trace.active_boundary_cells << '\n';
    std::cout << "qr.cells.internal=" << qr.trace.active_internal_cells << '\n';
    std::cout << "qr.events=" << qr.trace.events.size() << '\n';
    if (trace_out) csonepass::io::write_trace(*trace_out, qr.trace, "qr", n_max);
    r = std::move(qr.r);
  } else {
    r = csonepass::givens_r(a);
  }
  if (run_inv) {
    auto inv = csonepass::systolic_invert(*r, config);
    std::cout << "inv.steps=" << inv.trace.cycles << '\n';
    std::cout << "inv.cells.boundary=" << inv.trace.active_boundary_cells << '\n';
    std::cout << "inv.cells.internal=" << inv.trace.active_internal_cells << '\n';
    std::cout << "inv.events=" << inv.trace.events.size() << '\n';
    if (trace_out) csonepass::io::write_trace(*trace_out, inv.trace, "inv", n_max);
  }
  return kExitOk;
}

int cmd_complexity(Index k, Index m) {
  const auto qfree = csonepass::flops_qfree(k, m);
  const auto direct = csonepass::flops_direct(k, m);
  const auto cycles = csonepass::cycle_report(k, m);
  std::cout << "schema=cs-onepass.complexity.v1\n";
  std::cout << "k=" << k << '\n';
  std::cout << "m=" << m << '\n';
  std::cout << "flops.qfree.add=" << qfree.additions << '\n';
  std::cout << "flops.qfree.mul=" << qfree.multiplications << '\n';
  std::cout << "flops.direct.add=" << direct.additions << '\n';
  std::cout << "flops.direct.mul=" << direct.multiplications << '\n';
  std::cout << "flops.direct.extra=" << direct.extra << '\n';
  if (m > k) {
    const auto qr = csonepass::flops_qr(m, k);
    std::cout << "flops.qr.r=" << qr.r_flops << '\n';
    std::cout << "flops.qr.q_avoided=" << qr.q_flops_avoided << '\n';
  }
  std::cout << "cycles.threshold=" << cycles.threshold_block << '\n';
  std::cout << "cycles.comparator=" << cycles.comparator << '\n';
  std::cout << "cycles.r=" << cycles.r_block << '\n';
  std::cout << "cycles.inversion=" << cycles.inversion_block << '\n';
  std::cout << "cycles.solver=" << cycles.solver_block << '\n';
  std::cout << "cycles.estimates=comparator,solver\n";
  return kExitOk;
}

int cmd_sweep(Index n, Index k, Index m, double probability, Index trials,
              std::optional<std::uint64_t> seed_flag, const std::string& mode) {
  csonepass::ThresholdParams<double> params;
  params.probability = probability;
  if (mode == "approx") {
    params.mode = csonepass::ThresholdMode::kApproxConstant;
    params.approx_constant = csonepass::approx_constant(probability, n);
  } else if (mode != "exact") {
    throw csonepass::RangeError("--mode must be exact or approx");
  }
  const std::uint64_t base = resolve_seed(seed_flag);
  Index successes = 0;
  for (Index trial = 0; trial < trials; ++trial) {
    const auto support =
        csonepass::draw_pattern(n, k, csonepass::derive_seed(base, 2 * trial));
    std::vector<csonepass::SignalComponent<double>> components;
    for (Index freq : support.positions()) components.push_back({freq, {1.0, 0.0}});
    const csonepass::SparseSignal<double> spec(n, std::move(components));
    const auto x = csonepass::synthesize(spec);
    const auto pattern =
        csonepass::draw_pattern(n, m, csonepass::derive_seed(base, 2 * trial + 1));
    const auto result = csonepass::run_pipeline(csonepass::sample(x, pattern), n, params);

    csonepass::ComplexVector<double> truth = csonepass::ComplexVector<double>::Zero(n);
    for (const auto& c : spec.components()) truth[c.freq_index] = c.amplitude;
    csonepass::ComplexVector<double> estimate = csonepass::ComplexVector<double>::Zero(n);
    for (Index i = 0; i < result.report.detected_support.count(); ++i)
      estimate[result.report.detected_support.indices()[static_cast<std::size_t>(i)]] =
          result.report.amplitudes[i];
    const double amp_err = (estimate - truth).cwiseAbs().maxCoeff();
    const bool support_exact =
        result.report.detected_support.indices() == support.positions();
    const bool ok = support_exact && amp_err <= 1e-8;
    successes += ok ? 1 : 0;
    std::cout << "trial." << trial << ".ok=" << (ok ? 1 : 0) << '\n';
    std::cout << "trial." << trial << ".amp_err=" << csonepass::io::format_real(amp_err)
              << '\n';
  }
  std::cout << "sweep.trials=" << trials << '\n';
  std::cout << "sweep.successes=" << successes << '\n';
  std::cout << "sweep.rate="
            << csonepass::io::format_real(static_cast<double>(successes) /
                                          static_cast<double>(trials))
            << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold-based one-pass compressive-sensing reconstruction"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand("generate", "Synthesize a sparse test signal");
  Index gen_n = 0;
  std::optional<Index> gen_k;
  std::vector<std::string> gen_components;
  std::optional<std::uint64_t> gen_seed;
  std::string gen_out, gen_truth;
  generate->add_option("--n", gen_n, "Signal length N")->required();
  generate->add_option("--k", gen_k, "Draw K random unit-amplitude components");
  generate->add_option("--components", gen_components, "Explicit components k:re+imj[,...]");
  generate->add_option("--seed", gen_seed, "RNG seed (fallback: CS_ONEPASS_SEED, then 1)");
  generate->add_option("--out", gen_out, "Signal file to write")->required();
  generate->add_option("--truth", gen_truth, "Ground-truth file to write")->required();

  // sample
  auto* smp = app.add_subcommand("sample", "Randomly undersample a signal file");
  std::string smp_signal, smp_out;
  Index smp_m = 0;
  std::optional<std::uint64_t> smp_seed;
  smp->add_option("--signal", smp_signal, "Signal file to read")->required();
  smp->add_option("--m", smp_m, "Number of available samples")->required();
  smp->add_option("--seed", smp_seed, "RNG seed");
  smp->add_option("--out", smp_out, "Measurement file to write")->required();

  // reconstruct
  auto* rec = app.add_subcommand("reconstruct", "Run the one-pass reconstruction");
  std::string rec_meas, rec_out, rec_report;
  double rec_p = 0.99;
  std::string rec_mode = "exact";
  std::optional<double> rec_constant;
  rec->add_option("--meas", rec_meas, "Measurement file to read")->required();
  rec->add_option("--p", rec_p, "Detection probability P");
  rec->add_option("--mode", rec_mode, "Threshold mode: exact | approx");
  rec->add_option("--constant", rec_constant, "Approx-mode constant C override (negative)");
  rec->add_option("--out", rec_out, "Reconstructed signal file to write")->required();
  rec->add_option("--report", rec_report, "Report file to write")->required();

  // simulate
  auto* sim = app.add_subcommand("simulate", "Cycle-level systolic array simulation");
  std::string sim_meas, sim_support, sim_support_from, sim_trace;
  std::string sim_array = "both";
  Index sim_nmax = 0, sim_lat_boundary = 1, sim_lat_internal = 1;
  bool sim_no_events = false;
  sim->add_option("--meas", sim_meas, "Measurement file to read")->required();
  sim->add_option("--support", sim_support, "Support indices, comma separated");
  sim->add_option("--support-from", sim_support_from, "Take the support from a truth file");
  sim->add_option("--array", sim_array, "Which array to run: qr | inv | both");
  sim->add_option("--nmax", sim_nmax, "Array order (default: support size)");
  sim->add_option("--latency-boundary", sim_lat_boundary, "Boundary-cell cycle cost");
  sim->add_option("--latency-internal", sim_lat_internal, "Internal-cell cycle cost");
  sim->add_option("--trace", sim_trace, "Trace file to write");
  sim->add_flag("--no-events", sim_no_events, "Skip per-event recording");

  // complexity
  auto* cx = app.add_subcommand("complexity", "Print flop and cycle counts");
  Index cx_k = 0, cx_m = 0;
  cx->add_option("--k", cx_k, "Sparsity K")->required();
  cx->add_option("--m", cx_m, "Available samples M")->required();

  // sweep
  auto* sweep = app.add_subcommand("sweep", "Monte Carlo recovery sweep");
  Index sw_n = 0, sw_k = 0, sw_m = 0, sw_trials = 100;
  double sw_p = 0.99;
  std::optional<std::uint64_t> sw_seed;
  std::string sw_mode = "exact";
  sweep->add_option("--n", sw_n, "Signal length N")->required();
  sweep->add_option("--k", sw_k, "Sparsity K")->required();
  sweep->add_option("--m", sw_m, "Available samples M")->required();
  sweep->add_option("--p", sw_p, "Detection probability P");
  sweep->add_option("--trials", sw_trials, "Trial count");
  sweep->add_option("--seed", sw_seed, "Base seed");
  sweep->add_option("--mode", sw_mode, "Threshold mode: exact | approx");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (generate->parsed())
      return cmd_generate(gen_n, gen_k, gen_components, gen_seed, gen_out, gen_truth);
    if (smp->parsed()) return cmd_sample(smp_signal, smp_m, smp_seed, smp_out);
    if (rec->parsed())
      return cmd_reconstruct(rec_meas, rec_p, rec_mode, rec_constant, rec_out, rec_report);
    if (sim->parsed())
      return cmd_simulate(sim_meas, sim_support, sim_support_from, sim_array, sim_nmax,
                          sim_lat_boundary, sim_lat_internal, sim_trace, sim_no_events);
    if (cx->parsed()) return cmd_complexity(cx_k, cx_m);
    if (sweep->parsed())
      return cmd_sweep(sw_n, sw_k, sw_m, sw_p, sw_trials, sw_seed, sw_mode);
  } catch (const csonepass::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const csonepass::SingularMatrixError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitSingular;
  } catch (const csonepass::EmptySupportError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitEmptySupport;
  } catch (const csonepass::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitUsage;
}
