#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "qntk/circuit.hpp"
#include "qntk/regression.hpp"

namespace qntk::io {

using json = nlohmann::json;

/// Circuit template schema:
///   {
///     "n": 2,
///     "input_bits": 2,                      // optional, default 0
///     "layers": [ [ {"gate": "h", "qubits": [0]},
///                   {"gate": "cnot", "qubits": [0,1], "if_bit": 0} ],
///                 ... L+1 entries ... ],
///     "generators": ["ZZ", "XI"],
///     "observable": [ {"coeff": 1.0, "pauli": "ZI"} ]
///   }
/// A layer may alternatively upload explicit tableaux per input bitstring:
///   {"tableaux": {"01": {"columns": [...2n bitstrings...],
///                         "d": "...", "h": "..."}}}
/// Parsing and serialization round-trip bit-exactly.
CircuitTemplate parse_circuit_json(const json& j, bool strict_coefficients = true);
CircuitTemplate load_circuit_file(const std::string& path,
                                  bool strict_coefficients = true);
json circuit_to_json(const CircuitTemplate& tmpl);

/// CSV with one "bitstring,label" row per example; '#' comments and an
/// optional "input,label" header line are skipped.
TrainingSet load_training_csv(const std::string& path);

/// Serializes with every float printed at 17 significant digits so result
/// files round-trip exactly.
std::string dump_json_17(const json& j, int indent = 2);

void write_text_file(const std::string& path, const std::string& contents);

}  // namespace qntk::io
