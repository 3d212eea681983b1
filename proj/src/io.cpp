#include "aqec/io.hpp"

#include <cmath>
#include <fstream>

namespace aqec::io {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field \"") + key + "\"");
  return j.at(key);
}

template <typename T>
T number(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) throw FormatError(std::string("field \"") + key + "\" must be a number");
  return v.get<T>();
}

std::vector<int> int_list(const Json& j, const char* what) {
  if (!j.is_array()) throw FormatError(std::string(what) + " must be an array of integers");
  std::vector<int> out;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw FormatError(std::string(what) + " must be an array of integers");
    out.push_back(v.get<int>());
  }
  return out;
}

Json finite(double x) {
  if (std::isfinite(x)) return x;
  return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
}

const char* status_name(lll::BoundStatus s) { return s == lll::BoundStatus::ok ? "ok" : "condition-violation"; }

}  // namespace

Json load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
}

cplx complex_from_json(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw FormatError("complex number must be a number or an [re, im] pair");
}

CVector vector_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("vector must be an array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return v;
}

CMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw FormatError("matrix must be a non-empty array of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  CMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) throw FormatError("matrix rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(j[r][c]);
  }
  return m;
}

Json to_json(cplx z) { return Json::array({finite(z.real()), finite(z.imag())}); }

Json to_json(const CVector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

Json to_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    out.push_back(row);
  }
  return out;
}

Json to_json(const Region& r) { return Json(std::vector<int>(r.begin(), r.end())); }

// ---------------------------------------------------------------- Probability spaces

lll::JointDistribution distribution_from_json(const Json& j) {
  const Json& probs = field(j, "probs");
  if (!probs.is_array()) throw FormatError("\"probs\" must be an array");
  std::vector<double> p;
  for (const auto& v : probs) {
    if (!v.is_number()) throw FormatError("\"probs\" must hold numbers");
    p.push_back(v.get<double>());
  }
  std::vector<lll::Event> events;
  const Json& ev = field(j, "events");
  if (!ev.is_array()) throw FormatError("\"events\" must be an array");
  for (std::size_t i = 0; i < ev.size(); ++i) {
    lll::Event e;
    e.name = ev[i].contains("name") ? ev[i]["name"].get<std::string>() : "A" + std::to_string(i);
    for (int o : int_list(field(ev[i], "outcomes"), "\"outcomes\"")) {
      if (o < 0) throw FormatError("outcome indices must be non-negative");
      e.outcomes.push_back(static_cast<std::size_t>(o));
    }
    events.push_back(std::move(e));
  }
  return lll::JointDistribution(std::move(p), std::move(events));
}

lll::DependencyGraph graph_from_json(const Json& j) {
  const Json& gamma = field(j, "gamma");
  if (!gamma.is_array()) throw FormatError("\"gamma\" must be an array of arrays");
  lll::DependencyGraph g;
  for (const auto& row : gamma) {
    std::vector<std::size_t> adj;
    for (int v : int_list(row, "\"gamma\" rows")) {
      if (v < 0) throw FormatError("\"gamma\" entries must be non-negative");
      adj.push_back(static_cast<std::size_t>(v));
    }
    g.gamma.push_back(std::move(adj));
  }
  g.validate();
  return g;
}

// ---------------------------------------------------------------- Circuits and states

Connectivity connectivity_from_json(const Json& j) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "all_to_all" || kind == "all") return Connectivity::all_to_all();
  if (kind != "lattice") throw FormatError("connectivity kind must be \"all_to_all\" or \"lattice\"");
  std::vector<int> dims = int_list(field(j, "dims"), "\"dims\"");
  if (j.contains("D") && j["D"].get<int>() != static_cast<int>(dims.size()))
    throw FormatError("connectivity \"D\" does not match the length of \"dims\"");
  const bool periodic = j.contains("periodic") && j["periodic"].get<bool>();
  return Connectivity::lattice(std::move(dims), periodic);
}

Json to_json(const Connectivity& c) {
  if (c.kind == Connectivity::Kind::all_to_all) return Json{{"kind", "all_to_all"}};
  return Json{{"kind", "lattice"}, {"D", c.dimension()}, {"dims", c.dims}, {"periodic", c.periodic}};
}

Circuit circuit_from_json(const Json& j) {
  Circuit c;
  c.n = number<int>(j, "n");
  c.connectivity = j.contains("connectivity") ? connectivity_from_json(j["connectivity"]) : Connectivity::all_to_all();
  const Json& layers = field(j, "layers");
  if (!layers.is_array()) throw FormatError("\"layers\" must be an array of layers");
  for (const auto& layer : layers) {
    if (!layer.is_array()) throw FormatError("each layer must be an array of gates");
    Layer out;
    for (const auto& g : layer) {
      const std::string name = field(g, "gate").get<std::string>();
      std::vector<int> qubits = int_list(field(g, "qubits"), "\"qubits\"");
      if (name == "U")
        out.push_back(Gate::unitary(matrix_from_json(field(g, "matrix")), std::move(qubits)));
      else
        out.push_back(Gate::named(name, std::move(qubits)));
    }
    c.layers.push_back(std::move(out));
  }
  c.validate();
  return c;
}

Json to_json(const Circuit& c) {
  Json layers = Json::array();
  for (const auto& layer : c.layers) {
    Json out = Json::array();
    for (const auto& g : layer) {
      Json gate{{"gate", g.name}, {"qubits", g.qubits}};
      if (g.name == "U") gate["matrix"] = to_json(g.matrix);
      out.push_back(gate);
    }
    layers.push_back(out);
  }
  return Json{{"n", c.n}, {"connectivity", to_json(c.connectivity)}, {"layers", layers}};
}

StateVector state_from_json(const Json& j) {
  if (j.is_object() && j.contains("circuit")) return prepare(circuit_from_json(j["circuit"]));
  if (j.is_object() && j.contains("w")) return build_w(number<int>(j, "w"));
  const int d = j.is_object() && j.contains("local_dim") ? j["local_dim"].get<int>() : 2;
  return StateVector::from_amplitudes(vector_from_json(field(j, "amplitudes")), d);
}

Code code_from_json(const Json& j) {
  Code c;
  c.n = number<int>(j, "n");
  c.k = number<int>(j, "k");
  const Json& basis = field(j, "basis");
  if (!basis.is_array()) throw FormatError("\"basis\" must be an array of states");
  for (const auto& s : basis) c.basis.push_back(state_from_json(s));
  c.validate();
  return c;
}

LocalOperator operator_from_json(const Json& j) {
  const int d = j.contains("local_dim") ? j["local_dim"].get<int>() : 2;
  return LocalOperator::on(Region(int_list(field(j, "support"), "\"support\"")), matrix_from_json(field(j, "matrix")), d);
}

Json to_json(const LocalOperator& op) {
  return Json{{"support", to_json(op.support)}, {"local_dim", op.local_dim}, {"matrix", to_json(op.matrix)}};
}

// ---------------------------------------------------------------- Matrix product states

MPSTensor mps_from_json(const Json& j) {
  MPSTensor a;
  a.phys_dim = number<int>(j, "phys_dim");
  a.bond_dim = number<int>(j, "bond_dim");
  const Json& ms = field(j, "matrices");
  if (!ms.is_array()) throw FormatError("\"matrices\" must be an array of matrices");
  for (const auto& m : ms) a.matrices.push_back(matrix_from_json(m));
  a.validate();
  return a;
}

Json to_json(const MPSTensor& a) {
  Json ms = Json::array();
  for (const auto& m : a.matrices) ms.push_back(to_json(m));
  return Json{{"phys_dim", a.phys_dim}, {"bond_dim", a.bond_dim}, {"matrices", ms}};
}

ChargeAssignment charges_from_json(const Json& j, int length) {
  return ChargeAssignment{matrix_from_json(field(j, "q")), length};
}

// ---------------------------------------------------------------- Reports

Json to_json(const lll::BoundResult& r) {
  Json out{{"status", status_name(r.status)}};
  if (r.ok()) out["bound"] = finite(r.value);
  if (r.failing_index) out["failing_index"] = *r.failing_index;
  out["condition_lhs"] = finite(r.condition_lhs);
  out["condition_rhs"] = finite(r.condition_rhs);
  return out;
}

Json to_json(const lll::LopsidedReport& r) {
  return Json{{"max_ratio", finite(r.max_ratio)},
              {"c", r.c},
              {"passes", r.passes},
              {"argmax_event", r.argmax_event},
              {"argmax_set", r.argmax_set},
              {"sets_checked", r.sets_checked},
              {"degenerate_sets", r.degenerate_sets}};
}

Json to_json(const VarianceReport& r) {
  return Json{{"d", r.d},
              {"epsilon", r.epsilon},
              {"argmax_region", to_json(r.argmax_region)},
              {"argmax_coeffs", to_json(r.argmax_coeffs)},
              {"samples_evaluated", r.samples_evaluated}};
}

Json to_json(const CertificateReport& r) {
  const char* status = r.status == CertificateStatus::certified       ? "certified"
                       : r.status == CertificateStatus::contradiction ? "contradiction"
                                                                      : "inapplicable";
  return Json{{"p", r.p}, {"K", r.K}, {"lll", to_json(r.bound)}, {"exact", r.exact}, {"status", status}};
}

Json to_json(const DistinguishReport& r) {
  return Json{{"operator", to_json(r.op)},
              {"site", r.site},
              {"source_circuit", r.source},
              {"value", r.value},
              {"bound", r.bound},
              {"t", r.t},
              {"delta", r.delta},
              {"overlap", r.overlap},
              {"connectivity", to_json(r.connectivity)},
              {"precondition_ok", r.precondition_ok},
              {"inequality_holds", r.inequality_holds}};
}

Json to_json(const WBoundReport& r) {
  Json paths = Json::array();
  for (const auto& p : r.paths) {
    Json pj{{"method", p.method},         {"valid", p.valid},
            {"parameter", p.parameter},   {"validity_lhs", finite(p.validity_lhs)},
            {"validity_rhs", p.validity_rhs}, {"t_min", p.t_min},
            {"condition_lhs", finite(p.condition_lhs)}, {"condition_rhs", p.condition_rhs}};
    if (!p.note.empty()) pj["note"] = p.note;
    paths.push_back(pj);
  }
  return Json{{"n", r.n},
              {"delta", r.delta},
              {"connectivity", to_json(r.connectivity)},
              {"patch_size", r.patch_size},
              {"condition_lhs", finite(r.condition_lhs)},
              {"condition_rhs", r.condition_rhs},
              {"selected_method", r.selected_method},
              {"t_min", r.implied_depth_bound},
              {"paths", paths}};
}

Json to_json(const CanonicalForm& f) {
  return Json{{"is_normal", f.is_normal},
              {"spectral_radius", f.spectral_radius},
              {"lambda2", f.lambda2},
              {"spectrum", to_json(f.spectrum)},
              {"rho", to_json(f.rho)},
              {"right_residual", f.right_residual},
              {"left_residual", f.left_residual},
              {"tensor", to_json(f.tensor)}};
}

Json to_json(const ClusteringResult& r) {
  Json pairs = Json::array();
  for (const auto& p : r.verified_pairs)
    pairs.push_back(Json{{"gap", p.gap}, {"pq", p.pq}, {"p_times_q", p.p_times_q}, {"holds", p.holds}});
  return Json{{"lambda", r.lambda}, {"ell", r.ell}, {"c", r.c}, {"all_hold", r.all_hold}, {"verified_pairs", pairs}};
}

Json to_json(const LsmReport& r) {
  Json out{{"momentum", r.momentum}, {"alpha", r.alpha}, {"applicable", r.applicable}};
  if (!r.note.empty()) out["note"] = r.note;
  out["charge_norm"] = r.charge_norm;
  auto threshold = [&](const char* key, const std::optional<double>& v) {
    if (!v) return;
    out[key] = *v;
    out["depth_threshold_note"] = "L/4; the 1/4 is specific to the ring-tiling argument";
  };
  threshold("depth_threshold", r.depth_threshold);
  if (!r.applicable) return out;
  threshold("transformed_depth_threshold", r.transformed_depth_threshold);
  out["transformed_momentum"] = r.transformed_momentum;
  out["momentum_shift"] = r.momentum_shift;
  out["shift_matches"] = r.shift_matches;
  out["overlap"] = r.overlap;
  out["overlap_vanishes"] = r.overlap_vanishes;
  Json table = Json::array();
  for (const auto& [size, dist] : r.indistinguishability) table.push_back(Json{{"region_size", size}, {"trace_distance", dist}});
  out["indistinguishability"] = table;
  auto cond = [](const LsmCondition& c) { return Json{{"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}}; };
  if (r.cond1) out["cond1"] = cond(*r.cond1);
  if (r.cond2) out["cond2"] = cond(*r.cond2);
  return out;
}

}  // namespace aqec::io
