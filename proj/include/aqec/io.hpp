#pragma once

// JSON readers for the input formats and writers for every report. Complex numbers are
// [re, im] pairs (a bare number is read as real); matrices are row-major arrays of rows.

#include <json.hpp>

#include "aqec/analysis.hpp"
#include "aqec/circuit.hpp"
#include "aqec/lll.hpp"
#include "aqec/mps.hpp"
#include "aqec/wstate.hpp"

namespace aqec::io {

using Json = nlohmann::ordered_json;

/// Thrown for malformed input documents.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Json load_file(const std::string& path);

cplx complex_from_json(const Json& j);
CVector vector_from_json(const Json& j);
CMatrix matrix_from_json(const Json& j);
Json to_json(cplx z);
Json to_json(const CVector& v);
Json to_json(const CMatrix& m);
Json to_json(const Region& r);

lll::JointDistribution distribution_from_json(const Json& j);
lll::DependencyGraph graph_from_json(const Json& j);

/// {"kind":"all_to_all"} or {"kind":"lattice","D":1,"dims":[4],"periodic":true}.
Connectivity connectivity_from_json(const Json& j);
Json to_json(const Connectivity& c);
/// {"n":..,"connectivity":..,"layers":[[{"gate":"H","qubits":[0]}, {"gate":"U","qubits":[0,1],"matrix":..}]]}.
Circuit circuit_from_json(const Json& j);
Json to_json(const Circuit& c);
/// {"amplitudes":[..], "local_dim":2}, {"circuit":{..}} or {"w":n}.
StateVector state_from_json(const Json& j);
/// {"n":4,"k":1,"basis":[state, ...]}.
Code code_from_json(const Json& j);
LocalOperator operator_from_json(const Json& j);  // {"support":[..],"matrix":..}
Json to_json(const LocalOperator& op);

MPSTensor mps_from_json(const Json& j);
Json to_json(const MPSTensor& a);
ChargeAssignment charges_from_json(const Json& j, int length);  // {"q": matrix}

Json to_json(const lll::BoundResult& r);
Json to_json(const lll::LopsidedReport& r);
Json to_json(const VarianceReport& r);
Json to_json(const CertificateReport& r);
Json to_json(const DistinguishReport& r);
Json to_json(const WBoundReport& r);
Json to_json(const CanonicalForm& f);
Json to_json(const ClusteringResult& r);
Json to_json(const LsmReport& r);

}  // namespace aqec::io
