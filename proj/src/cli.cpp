#include "aqec/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>

#include "aqec/io.hpp"

namespace aqec::cli {

using io::Json;

namespace {

struct CommandInfo {
  Command command;
  const char* name;
  const char* summary;
  bool tabular;
};

constexpr CommandInfo kCommands[] = {
    {Command::lll_bound, "lll-bound", "Local-lemma lower bound from a parameter file (symmetric or glll)", false},
    {Command::lll_verify, "lll-verify", "Check the lopsided condition on an explicit distribution", false},
    {Command::code_variance, "code-variance", "Subsystem variance of a code, one d or a sweep over d", true},
    {Command::code_distinguish, "code-distinguish", "Distinguishing operator for two circuits", false},
    {Command::code_certify, "code-certify", "Commuting-projector certificate for a state", false},
    {Command::wstate_report, "wstate-report", "Depth lower bound for preparing the W state", false},
    {Command::mps_analyze, "mps-analyze", "Canonical form, spectrum and clustering of a tensor", false},
    {Command::mps_ring, "mps-ring", "Ring truncations compared with the infinite chain", true},
    {Command::lsm_check, "lsm-check", "Large gauge transformation check for a charge eigenstate", true},
};

const CommandInfo& info(Command c) {
  for (const auto& i : kCommands)
    if (i.command == c) return i;
  throw std::logic_error("unknown command");
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Outcome {
  Json report;
  int code = kExitOk;
  std::optional<Table> table;
};

std::string num(double x) {
  std::ostringstream s;
  s << std::setprecision(15) << x;
  return s.str();
}

std::string region_text(const Region& r) {
  std::string s;
  for (int site : r) s += (s.empty() ? "" : " ") + std::to_string(site);
  return s;
}

Json flags(const AnalysisPlan& p) {
  Json f = Json::object();
  auto file = [&](const char* key, const std::string& v) {
    if (!v.empty()) f[key] = v;
  };
  file("params", p.params);
  file("dist", p.dist);
  file("graph", p.graph);
  file("code", p.code);
  file("circuit1", p.circuit1);
  file("circuit2", p.circuit2);
  file("input", p.input);
  file("mps", p.mps);
  file("observables", p.observables);
  file("observable", p.observable);
  file("state", p.state);
  file("charge", p.charge);
  auto opt = [&](const char* key, const auto& v) {
    if (v) f[key] = *v;
  };
  opt("n", p.n);
  opt("d", p.d);
  opt("t", p.t);
  opt("w", p.w);
  opt("samples", p.samples);
  opt("grid", p.grid);
  opt("refine", p.refine);
  opt("delta", p.delta);
  opt("c", p.c);
  opt("lambda", p.lambda);
  if (!p.connectivity.empty()) f["connectivity"] = p.connectivity;
  if (!p.lengths.empty()) f["lengths"] = p.lengths;
  if (p.basis_only) f["basis_only"] = true;
  f["seed"] = p.seed;
  f["format"] = p.format == Format::json ? "json" : "csv";
  return f;
}

// Loads an input file and records its contents in the report's inputs block.
class Inputs {
 public:
  explicit Inputs(const AnalysisPlan& plan, int threads) {
    block_["command"] = command_name(plan.command);
    block_["flags"] = flags(plan);
    block_["threads"] = threads;
    block_["files"] = Json::object();
  }
  Json load(const char* role, const std::string& path) {
    Json j = io::load_file(path);
    block_["files"][role] = j;
    return j;
  }
  const Json& block() const { return block_; }

 private:
  Json block_;
};

Outcome run_lll_bound(const AnalysisPlan& plan, Inputs& in) {
  const Json p = in.load("params", plan.params);
  const std::string mode = p.value("mode", "symmetric");
  const double c = plan.c.value_or(p.value("c", 1.0));
  auto probs_of = [&] {
    if (!p.contains("probs") || !p["probs"].is_array()) throw io::FormatError("missing field \"probs\"");
    return p["probs"].get<std::vector<double>>();
  };
  lll::BoundResult r;
  if (mode == "symmetric") {
    if (p.contains("probs")) {
      if (!p.contains("graph")) throw io::FormatError("missing field \"graph\"");
      r = lll::symmetric_bound(probs_of(), io::graph_from_json(p["graph"]), c);
    } else {
      if (!p.contains("p") || !p.contains("d")) throw io::FormatError("symmetric mode needs \"p\" and \"d\" or \"probs\"");
      r = lll::symmetric_bound(p["p"].get<double>(), p["d"].get<std::size_t>(), p.value("n", std::size_t{1}), c);
    }
  } else if (mode == "glll") {
    if (!p.contains("graph") || !p.contains("x")) throw io::FormatError("glll mode needs \"probs\", \"graph\" and \"x\"");
    r = lll::glll_bound(probs_of(), io::graph_from_json(p["graph"]), lll::LllAssignment{c, p["x"].get<std::vector<double>>()});
  } else {
    throw io::FormatError("\"mode\" must be \"symmetric\" or \"glll\"");
  }
  Json rep{{"mode", mode}, {"c", c}};
  rep.update(io::to_json(r));
  return {rep, r.ok() ? kExitOk : kExitInapplicable, std::nullopt};
}

Outcome run_lll_verify(const AnalysisPlan& plan, Inputs& in) {
  const lll::JointDistribution dist = io::distribution_from_json(in.load("dist", plan.dist));
  const lll::DependencyGraph graph = io::graph_from_json(in.load("graph", plan.graph));
  std::vector<std::size_t> events(dist.event_count());
  std::iota(events.begin(), events.end(), std::size_t{0});
  const lll::LopsidedReport r = lll::verify_lopsided_condition(dist, events, graph, plan.c.value_or(1.0));
  Json rep = io::to_json(r);
  rep["exact_none_probability"] = lll::exact_none_probability(dist, events);
  return {rep, r.passes ? kExitOk : kExitInapplicable, std::nullopt};
}

Outcome run_code_variance(const AnalysisPlan& plan, Inputs& in, int threads) {
  const Code code = io::code_from_json(in.load("code", plan.code));
  VarianceSearch search;
  if (plan.grid) search.grid_points = *plan.grid;
  if (plan.samples) search.random_samples = *plan.samples;
  if (plan.refine) search.refine_iters = *plan.refine;
  search.seed = plan.seed;
  search.threads = threads;
  search.basis_only = plan.basis_only;

  std::vector<int> ds;
  if (plan.d)
    ds.push_back(*plan.d);
  else
    for (int d = 1; d <= code.n; ++d) ds.push_back(d);

  Json results = Json::array();
  Table table{{"d", "epsilon", "samples_evaluated", "argmax_region"}, {}};
  for (int d : ds) {
    const VarianceReport r = subsystem_variance(code, d, search);
    results.push_back(io::to_json(r));
    table.rows.push_back({std::to_string(r.d), num(r.epsilon), std::to_string(r.samples_evaluated),
                          region_text(r.argmax_region)});
  }
  return {Json{{"n", code.n}, {"k", code.k}, {"results", results}}, kExitOk, table};
}

Outcome run_code_distinguish(const AnalysisPlan& plan, Inputs& in) {
  const Circuit c1 = io::circuit_from_json(in.load("circuit1", plan.circuit1));
  const Circuit c2 = io::circuit_from_json(in.load("circuit2", plan.circuit2));
  const DistinguishReport r = verify_distinguishability(c1, c2, *plan.delta);
  return {io::to_json(r), r.precondition_ok && r.inequality_holds ? kExitOk : kExitInapplicable, std::nullopt};
}

Outcome run_code_certify(const AnalysisPlan& plan, Inputs& in) {
  const Json doc = in.load("input", plan.input);
  std::vector<LocalOperator> projectors;
  std::vector<Region> regions;
  std::optional<StateVector> state;
  if (doc.contains("circuit")) {
    const Circuit circuit = io::circuit_from_json(doc["circuit"]);
    for (int i = 0; i < circuit.n; ++i) projectors.push_back(conjugated_parent_projector(circuit, i));
    if (!doc.contains("state")) state = prepare(circuit);
  } else {
    if (!doc.contains("projectors") || !doc["projectors"].is_array())
      throw io::FormatError("input needs \"circuit\" or \"projectors\"");
    for (const auto& p : doc["projectors"]) projectors.push_back(io::operator_from_json(p));
  }
  if (doc.contains("regions")) {
    if (!doc["regions"].is_array()) throw io::FormatError("\"regions\" must be an array of site lists");
    for (const auto& r : doc["regions"]) regions.emplace_back(r.get<std::vector<int>>());
  } else {
    for (const auto& p : projectors) regions.push_back(p.support);
  }
  if (!state) {
    if (!doc.contains("state")) throw io::FormatError("missing field \"state\"");
    state = io::state_from_json(doc["state"]);
  }
  const double c = plan.c.value_or(doc.value("c", 1.0));
  const CertificateReport r = commuting_projector_certificate(projectors, regions, *state, c);
  Json rep = io::to_json(r);
  rep["c"] = c;
  Json ps = Json::array();
  for (std::size_t i = 0; i < projectors.size(); ++i)
    ps.push_back(Json{{"support", io::to_json(projectors[i].support)}, {"region", io::to_json(regions[i])}});
  rep["projectors"] = ps;
  return {rep, r.status == CertificateStatus::inapplicable ? kExitInapplicable : kExitOk, std::nullopt};
}

Outcome run_wstate_report(const AnalysisPlan& plan) {
  const Connectivity conn = plan.connectivity == "all" ? Connectivity::all_to_all() : Connectivity::chain(*plan.n);
  return {io::to_json(w_bound_report(*plan.n, *plan.delta, conn)), kExitOk, std::nullopt};
}

Outcome run_mps_analyze(const AnalysisPlan& plan, Inputs& in) {
  const MPSTensor a = io::mps_from_json(in.load("mps", plan.mps));
  const CanonicalForm form = canonicalize(a);
  Json rep{{"canonical_form", io::to_json(form)}};
  if (!form.is_normal) {
    rep["note"] = "tensor is not normal; clustering analysis skipped";
    return {rep, kExitInapplicable, std::nullopt};
  }
  if (!plan.observables.empty()) {
    const Json obs = in.load("observables", plan.observables);
    if (!obs.contains("p") || !obs.contains("q")) throw io::FormatError("observables need \"p\" and \"q\"");
    const ClusteringResult r =
        clustering_constant(form, io::matrix_from_json(obs["p"]), io::matrix_from_json(obs["q"]), plan.lambda);
    rep["clustering"] = io::to_json(r);
    if (!r.all_hold) return {rep, kExitInapplicable, std::nullopt};
  }
  return {rep, kExitOk, std::nullopt};
}

Outcome run_mps_ring(const AnalysisPlan& plan, Inputs& in) {
  const MPSTensor a = io::mps_from_json(in.load("mps", plan.mps));
  CMatrix op;
  if (!plan.observable.empty()) {
    const Json j = in.load("observable", plan.observable);
    if (!j.contains("matrix")) throw io::FormatError("missing field \"matrix\"");
    op = io::matrix_from_json(j["matrix"]);
  } else {
    op = CMatrix::Zero(a.phys_dim, a.phys_dim);
    for (int s = 0; s < a.phys_dim; ++s) op(s, s) = static_cast<double>(s);
  }
  if (op.rows() != a.phys_dim || op.cols() != a.phys_dim)
    throw std::invalid_argument("observable must be a phys_dim x phys_dim matrix");

  const CanonicalForm form = canonicalize(a);
  if (!form.is_normal) throw std::domain_error("tensor is not normal");
  const double imps = imps_expectation(form, op).real();

  Json rows = Json::array();
  Table table{{"length", "ring_expectation", "imps_expectation", "error", "lambda2_power", "momentum"}, {}};
  for (int length : plan.lengths) {
    const StateVector ring = ring_truncation(a, length);
    const double value = expectation(ring, LocalOperator::on(Region{0}, op, a.phys_dim)).real();
    const double power = std::pow(form.lambda2, length - 1);
    const double momentum = momentum_phase(ring, length);
    rows.push_back(Json{{"length", length},
                        {"ring_expectation", value},
                        {"imps_expectation", imps},
                        {"error", std::abs(value - imps)},
                        {"lambda2_power", power},
                        {"momentum", momentum}});
    table.rows.push_back(
        {std::to_string(length), num(value), num(imps), num(std::abs(value - imps)), num(power), num(momentum)});
  }
  Json rep{{"lambda2", form.lambda2}, {"observable", io::to_json(op)}, {"rows", rows}};
  return {rep, kExitOk, table};
}

Outcome run_lsm_check(const AnalysisPlan& plan, Inputs& in) {
  const StateVector state = plan.w ? build_w(*plan.w) : io::state_from_json(in.load("state", plan.state));
  const int length = state.num_sites();
  const ChargeAssignment charges =
      plan.charge.empty() ? ChargeAssignment::default_for(length) : io::charges_from_json(in.load("charge", plan.charge), length);
  const LsmReport r = lsm_report(state, charges, plan.t, plan.delta);
  Table table{{"region_size", "trace_distance"}, {}};
  for (const auto& [size, dist] : r.indistinguishability) table.rows.push_back({std::to_string(size), num(dist)});
  Json rep{{"length", length}};
  rep.update(io::to_json(r));
  return {rep, r.applicable ? kExitOk : kExitInapplicable, table};
}

Outcome dispatch(const AnalysisPlan& plan, Inputs& in, int threads) {
  switch (plan.command) {
    case Command::lll_bound: return run_lll_bound(plan, in);
    case Command::lll_verify: return run_lll_verify(plan, in);
    case Command::code_variance: return run_code_variance(plan, in, threads);
    case Command::code_distinguish: return run_code_distinguish(plan, in);
    case Command::code_certify: return run_code_certify(plan, in);
    case Command::wstate_report: return run_wstate_report(plan);
    case Command::mps_analyze: return run_mps_analyze(plan, in);
    case Command::mps_ring: return run_mps_ring(plan, in);
    case Command::lsm_check: return run_lsm_check(plan, in);
  }
  throw std::logic_error("unknown command");
}

std::string render(const Outcome& o, const Json& inputs, Format format) {
  if (format == Format::csv && o.table) {
    std::string s = "# inputs: " + inputs.dump() + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + cells[i];
      s += "\n";
    };
    line(o.table->header);
    for (const auto& row : o.table->rows) line(row);
    return s;
  }
  Json doc{{"inputs", inputs}};
  for (auto it = o.report.begin(); it != o.report.end(); ++it) doc[it.key()] = it.value();
  return doc.dump(2) + "\n";
}

int resolve_threads(const AnalysisPlan& plan) {
  if (plan.threads) return *plan.threads;
  if (const char* env = std::getenv("AQEC_LLL_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 0) throw std::invalid_argument("AQEC_LLL_THREADS must be a non-negative integer");
    return static_cast<int>(v);
  }
  return 1;
}

std::string catalog() {
  std::string s = "usage: aqec <command> [flags]\n\ncommands:\n";
  for (const auto& c : kCommands) {
    std::string name = c.name;
    name.resize(18, ' ');
    s += "  " + name + c.summary + "\n";
  }
  s += "\nRun 'aqec <command> --help' for the flags of one command.\n";
  return s;
}

}  // namespace

std::string command_name(Command c) { return info(c).name; }

ParseResult parse_command(const std::vector<std::string>& args) {
  AnalysisPlan plan;
  CLI::App app{"Approximate error correction and circuit complexity analyses", "aqec"};
  app.require_subcommand(0, 1);
  std::string format = "json";
  std::vector<std::pair<CLI::App*, Command>> subs;

  for (const auto& ci : kCommands) {
    CLI::App* sub = app.add_subcommand(ci.name, ci.summary);
    subs.emplace_back(sub, ci.command);
    sub->add_option("--out", plan.out, "Report path (default: standard output)");
    sub->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--seed", plan.seed, "Random seed");
    sub->add_option("--threads", plan.threads, "Worker threads, 0 = auto");
    switch (ci.command) {
      case Command::lll_bound:
        sub->add_option("--params", plan.params, "Parameter file")->required();
        sub->add_option("--c", plan.c, "Slack constant c >= 1 (overrides the file)");
        break;
      case Command::lll_verify:
        sub->add_option("--dist", plan.dist, "Distribution file")->required();
        sub->add_option("--graph", plan.graph, "Dependency graph file")->required();
        sub->add_option("--c", plan.c, "Slack constant c >= 1");
        break;
      case Command::code_variance:
        sub->add_option("--code", plan.code, "Code file")->required();
        sub->add_option("--d", plan.d, "Region size (sweep 1..n when omitted)");
        sub->add_option("--samples", plan.samples, "Random code states for k >= 2");
        sub->add_option("--grid", plan.grid, "Grid points per angle for k = 1");
        sub->add_option("--refine", plan.refine, "Coordinate-ascent rounds");
        sub->add_flag("--basis-only", plan.basis_only, "Evaluate the basis states alone");
        break;
      case Command::code_distinguish:
        sub->add_option("--circuit1", plan.circuit1, "First circuit file")->required();
        sub->add_option("--circuit2", plan.circuit2, "Second circuit file")->required();
        sub->add_option("--delta", plan.delta, "Overlap bound")->required();
        break;
      case Command::code_certify:
        sub->add_option("--input", plan.input, "Projector setup file")->required();
        sub->add_option("--c", plan.c, "Slack constant c >= 1 (overrides the file)");
        break;
      case Command::wstate_report:
        sub->add_option("--n", plan.n, "Number of qubits")->required();
        sub->add_option("--delta", plan.delta, "Approximation error")->required();
        sub->add_option("--connectivity", plan.connectivity, "line or all")
            ->required()
            ->check(CLI::IsMember({"line", "all"}));
        break;
      case Command::mps_analyze:
        sub->add_option("--mps", plan.mps, "Tensor file")->required();
        sub->add_option("--lambda", plan.lambda, "Decay rate in (lambda2, 1)");
        sub->add_option("--observables", plan.observables, "File with PSD observables p and q");
        break;
      case Command::mps_ring:
        sub->add_option("--mps", plan.mps, "Tensor file")->required();
        sub->add_option("--lengths", plan.lengths, "Ring lengths, comma separated")->required()->delimiter(',');
        sub->add_option("--observable", plan.observable, "Single-site observable file");
        break;
      case Command::lsm_check: {
        auto* state = sub->add_option("--state", plan.state, "State file");
        auto* w = sub->add_option("--w", plan.w, "Use the W state on this many sites");
        state->excludes(w);
        sub->add_option("--charge", plan.charge, "Per-site charge file");
        sub->add_option("--t", plan.t, "Circuit depth");
        sub->add_option("--delta", plan.delta, "Approximation error");
        break;
      }
    }
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    for (const auto& [sub, cmd] : subs)
      if (sub->parsed()) return {std::nullopt, kExitOk, sub->help()};
    return {std::nullopt, kExitOk, catalog()};
  } catch (const CLI::CallForAllHelp&) {
    return {std::nullopt, kExitOk, catalog()};
  } catch (const CLI::ParseError& e) {
    return {std::nullopt, kExitBadInput, e.what()};
  }

  const CLI::App* chosen = nullptr;
  for (const auto& [sub, cmd] : subs)
    if (sub->parsed()) {
      plan.command = cmd;
      chosen = sub;
    }
  if (!chosen) return {std::nullopt, kExitBadInput, "missing command\n\n" + catalog()};

  plan.format = format == "csv" ? Format::csv : Format::json;
  if (plan.format == Format::csv && !info(plan.command).tabular)
    return {std::nullopt, kExitBadInput, "--format csv is not available for " + command_name(plan.command)};
  if (plan.command == Command::lsm_check && plan.state.empty() && !plan.w)
    return {std::nullopt, kExitBadInput, "--state or --w is required"};
  if (plan.threads && *plan.threads < 0) return {std::nullopt, kExitBadInput, "--threads must be non-negative"};
  return {plan, kExitOk, ""};
}

int run(const AnalysisPlan& plan, std::ostream& out, std::ostream& err) {
  int threads = 1;
  try {
    threads = resolve_threads(plan);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }
  Inputs inputs(plan, threads);
  Outcome outcome;
  try {
    outcome = dispatch(plan, inputs, threads);
  } catch (const std::domain_error& e) {
    outcome = {Json{{"status", "inapplicable"}, {"reason", e.what()}}, kExitInapplicable, std::nullopt};
    err << "inapplicable: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitBadInput;
  }

  const std::string text = render(outcome, inputs.block(), plan.format);
  if (plan.out.empty()) {
    out << text;
  } else {
    std::ofstream file(plan.out, std::ios::binary);
    if (!(file << text)) {
      err << "error: cannot write " << plan.out << "\n";
      return kExitBadInput;
    }
  }
  return outcome.code;
}

int main_entry(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const ParseResult parsed = parse_command(args);
  if (!parsed.plan) {
    (parsed.exit_code == kExitOk ? std::cout : std::cerr) << parsed.message << (parsed.message.ends_with('\n') ? "" : "\n");
    return parsed.exit_code;
  }
  return run(*parsed.plan, std::cout, std::cerr);
}

}  // namespace aqec::cli
