#pragma once

// Batch front-end: argument parsing into an AnalysisPlan and dispatch to the library.
// Exit codes: 0 success, 1 a theorem or precondition does not apply (the report is still
// written), 2 bad arguments or unreadable input.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace aqec::cli {

enum class Command {
  lll_bound,
  lll_verify,
  code_variance,
  code_distinguish,
  code_certify,
  wstate_report,
  mps_analyze,
  mps_ring,
  lsm_check
};

enum class Format { json, csv };

inline constexpr int kExitOk = 0;
inline constexpr int kExitInapplicable = 1;
inline constexpr int kExitBadInput = 2;

std::string command_name(Command c);

struct AnalysisPlan {
  Command command = Command::lll_bound;

  // input files
  std::string params;       // lll-bound
  std::string dist;         // lll-verify
  std::string graph;        // lll-verify
  std::string code;         // code-variance
  std::string circuit1;     // code-distinguish
  std::string circuit2;
  std::string input;        // code-certify
  std::string mps;          // mps-analyze, mps-ring
  std::string observables;  // mps-analyze
  std::string observable;   // mps-ring
  std::string state;        // lsm-check
  std::string charge;

  // numeric flags
  std::optional<int> n;
  std::optional<int> d;
  std::optional<int> t;
  std::optional<int> w;
  std::optional<int> samples;
  std::optional<int> grid;
  std::optional<int> refine;
  std::optional<double> delta;
  std::optional<double> c;
  std::optional<double> lambda;
  std::string connectivity;  // line | all
  std::vector<int> lengths;
  bool basis_only = false;

  std::string out;  // empty writes to standard output
  Format format = Format::json;
  std::uint64_t seed = 0;
  std::optional<int> threads;  // 0 = hardware concurrency; falls back to AQEC_LLL_THREADS
};

struct ParseResult {
  std::optional<AnalysisPlan> plan;
  int exit_code = kExitOk;  // meaningful when plan is empty: 0 after --help, 2 on usage errors
  std::string message;      // help text or the usage error
};

/// argv without the program name.
ParseResult parse_command(const std::vector<std::string>& args);

/// Executes a plan, writing the report to plan.out (or `out` when empty) and diagnostics to `err`.
int run(const AnalysisPlan& plan, std::ostream& out, std::ostream& err);

/// parse_command followed by run, for main().
int main_entry(int argc, const char* const* argv);

}  // namespace aqec::cli
