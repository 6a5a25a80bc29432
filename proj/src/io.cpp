#include "qntk/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "qntk/errors.hpp"

namespace qntk::io {

namespace {

[[noreturn]] void parse_fail(const std::string& where, const std::string& what) {
  throw ParseError(where + ": " + what);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// nlohmann reports a byte offset; convert to line/column for the exit-2
// error contract
std::pair<int, int> line_col(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

json parse_json_text(const std::string& text, const std::string& path) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_col(text, e.byte ? e.byte - 1 : 0);
    parse_fail(path + ":" + std::to_string(line) + ":" + std::to_string(col),
               e.what());
  }
}

BitVec bitvec_from_string(const std::string& s, const std::string& where) {
  BitVec v(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '1') {
      v.set(i, true);
    } else if (s[i] != '0') {
      parse_fail(where, "expected a 0/1 bitstring, got \"" + s + "\"");
    }
  }
  return v;
}

std::string bitvec_to_string(const BitVec& v) {
  std::string s(v.size(), '0');
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v.get(i)) {
      s[i] = '1';
    }
  }
  return s;
}

CliffordTableau parse_tableau(const json& j, std::size_t n, const std::string& where) {
  if (!j.is_object() || !j.contains("columns") || !j.contains("d") || !j.contains("h")) {
    parse_fail(where, "tableau upload needs \"columns\", \"d\", \"h\"");
  }
  const auto& cols = j.at("columns");
  if (!cols.is_array() || cols.size() != 2 * n) {
    parse_fail(where, "tableau needs exactly 2n columns");
  }
  const BitVec d = bitvec_from_string(j.at("d").get<std::string>(), where + ".d");
  const BitVec h = bitvec_from_string(j.at("h").get<std::string>(), where + ".h");
  if (d.size() != 2 * n || h.size() != 2 * n) {
    parse_fail(where, "phase vectors d, h must have length 2n");
  }
  std::vector<PauliElement> images;
  images.reserve(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) {
    const std::string bits = cols[k].get<std::string>();
    if (bits.size() != 2 * n) {
      parse_fail(where, "each tableau column must have 2n bits");
    }
    BitVec z(n), x(n);
    for (std::size_t r = 0; r < n; ++r) {
      z.set(r, bits[r] == '1');
      x.set(r, bits[n + r] == '1');
    }
    images.emplace_back(n, d.get(k), h.get(k), std::move(z), std::move(x));
  }
  try {
    return CliffordTableau::from_generator_images(n, std::move(images));
  } catch (const std::invalid_argument& e) {
    parse_fail(where, e.what());
  }
}

json tableau_to_json(const CliffordTableau& t) {
  const std::size_t n = t.num_qubits();
  json cols = json::array();
  BitVec d(2 * n), h(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) {
    const PauliElement& img = t.generator_image(k);
    std::string bits(2 * n, '0');
    for (std::size_t r = 0; r < n; ++r) {
      if (img.z_bits().get(r)) {
        bits[r] = '1';
      }
      if (img.x_bits().get(r)) {
        bits[n + r] = '1';
      }
    }
    cols.push_back(bits);
    d.set(k, img.delta());
    h.set(k, img.epsilon());
  }
  return json{{"columns", cols}, {"d", bitvec_to_string(d)}, {"h", bitvec_to_string(h)}};
}

GateApplication parse_gate(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("gate") || !j.contains("qubits")) {
    parse_fail(where, "gate object needs \"gate\" and \"qubits\"");
  }
  GateApplication g;
  try {
    g.kind = gate_from_name(j.at("gate").get<std::string>());
  } catch (const std::invalid_argument& e) {
    parse_fail(where, e.what());
  }
  const auto& qs = j.at("qubits");
  const std::size_t want = gate_is_two_qubit(g.kind) ? 2 : 1;
  if (!qs.is_array() || qs.size() != want) {
    parse_fail(where, std::string(gate_name(g.kind)) + " takes exactly " +
                          std::to_string(want) + " qubit index(es)");
  }
  g.q0 = qs[0].get<std::size_t>();
  if (want == 2) {
    g.q1 = qs[1].get<std::size_t>();
  }
  if (j.contains("if_bit")) {
    g.if_bit = j.at("if_bit").get<std::size_t>();
  }
  return g;
}

}  // namespace

CircuitTemplate parse_circuit_json(const json& j, bool strict_coefficients) {
  if (!j.is_object()) {
    parse_fail("circuit", "top level must be an object");
  }
  for (const char* key : {"n", "layers", "generators", "observable"}) {
    if (!j.contains(key)) {
      parse_fail("circuit", std::string("missing required field \"") + key + "\"");
    }
  }
  CircuitTemplate tmpl;
  tmpl.n = j.at("n").get<std::size_t>();
  tmpl.input_bits = j.value("input_bits", std::size_t(0));

  const auto& layers = j.at("layers");
  if (!layers.is_array()) {
    parse_fail("circuit.layers", "must be an array of layers");
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const std::string where = "circuit.layers[" + std::to_string(l) + "]";
    const auto& jl = layers[l];
    CliffordLayerSpec layer;
    if (jl.is_array()) {
      for (std::size_t g = 0; g < jl.size(); ++g) {
        layer.gates.push_back(parse_gate(jl[g], where + "[" + std::to_string(g) + "]"));
      }
    } else if (jl.is_object() && jl.contains("tableaux")) {
      std::map<std::string, CliffordTableau> uploads;
      for (const auto& [key, value] : jl.at("tableaux").items()) {
        bitvec_from_string(key, where + " key");
        uploads.emplace(key, parse_tableau(value, tmpl.n, where + "[\"" + key + "\"]"));
      }
      layer.tableaux = std::move(uploads);
    } else {
      parse_fail(where, "layer must be a gate array or a tableaux upload object");
    }
    tmpl.layers.push_back(std::move(layer));
  }

  for (const auto& jg : j.at("generators")) {
    try {
      tmpl.generators.push_back(from_pauli_string(jg.get<std::string>()));
    } catch (const std::invalid_argument& e) {
      parse_fail("circuit.generators", e.what());
    }
  }

  std::vector<Observable::Term> terms;
  for (const auto& jt : j.at("observable")) {
    if (!jt.is_object() || !jt.contains("coeff") || !jt.contains("pauli")) {
      parse_fail("circuit.observable", "each term needs \"coeff\" and \"pauli\"");
    }
    try {
      terms.push_back(
          {jt.at("coeff").get<double>(), from_pauli_string(jt.at("pauli").get<std::string>())});
    } catch (const std::invalid_argument& e) {
      parse_fail("circuit.observable", e.what());
    }
  }
  try {
    tmpl.observable = std::make_shared<const Observable>(std::move(terms), strict_coefficients);
    tmpl.validate();
  } catch (const std::invalid_argument& e) {
    parse_fail("circuit", e.what());
  }
  return tmpl;
}

CircuitTemplate load_circuit_file(const std::string& path, bool strict_coefficients) {
  return parse_circuit_json(parse_json_text(read_file(path), path), strict_coefficients);
}

json circuit_to_json(const CircuitTemplate& tmpl) {
  json j;
  j["n"] = tmpl.n;
  j["input_bits"] = tmpl.input_bits;
  json layers = json::array();
  for (const auto& layer : tmpl.layers) {
    if (layer.is_explicit()) {
      json uploads = json::object();
      for (const auto& [key, tab] : *layer.tableaux) {
        uploads[key] = tableau_to_json(tab);
      }
      layers.push_back(json{{"tableaux", uploads}});
    } else {
      json gates = json::array();
      for (const auto& g : layer.gates) {
        json jg{{"gate", gate_name(g.kind)}};
        jg["qubits"] = gate_is_two_qubit(g.kind) ? json::array({g.q0, g.q1})
                                                 : json::array({g.q0});
        if (g.if_bit) {
          jg["if_bit"] = *g.if_bit;
        }
        gates.push_back(jg);
      }
      layers.push_back(gates);
    }
  }
  j["layers"] = layers;
  json gens = json::array();
  for (const auto& g : tmpl.generators) {
    gens.push_back(to_string(g));
  }
  j["generators"] = gens;
  json obs = json::array();
  for (const auto& t : tmpl.observable->terms()) {
    obs.push_back(json{{"coeff", t.coeff}, {"pauli", to_string(t.pauli)}});
  }
  j["observable"] = obs;
  return j;
}

TrainingSet load_training_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError(path + ": cannot open file");
  }
  std::vector<InputPoint> inputs;
  std::vector<double> labels;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = path + ":" + std::to_string(line_no);
    std::string trimmed = line;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) {
      trimmed.pop_back();
    }
    if (trimmed.empty() || trimmed[0] == '#') {
      continue;
    }
    const auto comma = trimmed.find(',');
    if (comma == std::string::npos) {
      parse_fail(where, "expected \"bitstring,label\"");
    }
    const std::string bits = trimmed.substr(0, comma);
    const std::string label = trimmed.substr(comma + 1);
    if (bits.find_first_not_of("01") != std::string::npos) {
      if (line_no == 1) {
        continue;  // header row
      }
      parse_fail(where, "input column must be a 0/1 bitstring");
    }
    try {
      std::size_t used = 0;
      const double y = std::stod(label, &used);
      if (used != label.size()) {
        parse_fail(where, "trailing characters after label");
      }
      inputs.emplace_back(bits);
      labels.push_back(y);
    } catch (const std::invalid_argument&) {
      parse_fail(where, "label column must be a real number");
    } catch (const std::out_of_range&) {
      parse_fail(where, "label out of range");
    }
  }
  if (inputs.empty()) {
    throw ParseError(path + ": training set is empty");
  }
  TrainingSet ts;
  ts.inputs = std::move(inputs);
  ts.labels = Eigen::Map<Eigen::VectorXd>(labels.data(), Eigen::Index(labels.size()));
  try {
    ts.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(path + ": " + e.what());
  }
  return ts;
}

namespace {

std::string format_double_17(double v) {
  if (std::isnan(v)) {
    return "null";
  }
  if (std::isinf(v)) {
    return v > 0 ? "1e999" : "-1e999";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void dump_rec(const json& j, std::string& out, int indent, int depth) {
  const std::string pad(std::size_t(indent) * std::size_t(depth), ' ');
  const std::string pad_in(std::size_t(indent) * std::size_t(depth + 1), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      std::size_t i = 0;
      for (const auto& [key, value] : j.items()) {
        out += pad_in + json(key).dump() + ": ";
        dump_rec(value, out, indent, depth + 1);
        if (++i != j.size()) {
          out += ",";
        }
        out += "\n";
      }
      out += pad + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad_in;
        dump_rec(j[i], out, indent, depth + 1);
        if (i + 1 != j.size()) {
          out += ",";
        }
        out += "\n";
      }
      out += pad + "]";
      return;
    }
    case json::value_t::number_float:
      out += format_double_17(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace

std::string dump_json_17(const json& j, int indent) {
  std::string out;
  dump_rec(j, out, indent, 0);
  out += "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write to " + path);
  }
  out << contents;
}

}  // namespace qntk::io
