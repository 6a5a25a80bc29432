#include "qntk/circuit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace qntk {

const char* gate_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "h";
    case GateKind::S: return "s";
    case GateKind::Cnot: return "cnot";
    case GateKind::Cz: return "cz";
    case GateKind::Swap: return "swap";
    case GateKind::X: return "x";
    case GateKind::Y: return "y";
    case GateKind::Z: return "z";
  }
  return "?";
}

GateKind gate_from_name(const std::string& name) {
  std::string s;
  s.reserve(name.size());
  for (char c : name) {
    s.push_back(char(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s == "h") return GateKind::H;
  if (s == "s") return GateKind::S;
  if (s == "cnot" || s == "cx") return GateKind::Cnot;
  if (s == "cz") return GateKind::Cz;
  if (s == "swap") return GateKind::Swap;
  if (s == "x") return GateKind::X;
  if (s == "y") return GateKind::Y;
  if (s == "z") return GateKind::Z;
  throw std::invalid_argument("unknown gate name: " + name);
}

bool gate_is_two_qubit(GateKind kind) {
  return kind == GateKind::Cnot || kind == GateKind::Cz || kind == GateKind::Swap;
}

namespace {

CliffordTableau gate_tableau(std::size_t n, const GateApplication& g) {
  switch (g.kind) {
    case GateKind::H: return CliffordTableau::hadamard(n, g.q0);
    case GateKind::S: return CliffordTableau::phase_s(n, g.q0);
    case GateKind::Cnot: return CliffordTableau::cnot(n, g.q0, g.q1);
    case GateKind::Cz: return CliffordTableau::cz(n, g.q0, g.q1);
    case GateKind::Swap: return CliffordTableau::swap_gate(n, g.q0, g.q1);
    case GateKind::X: {
      std::string s(n, 'I');
      s[g.q0] = 'X';
      return CliffordTableau::pauli_gate(from_pauli_string(s));
    }
    case GateKind::Y: {
      std::string s(n, 'I');
      s[g.q0] = 'Y';
      return CliffordTableau::pauli_gate(from_pauli_string(s));
    }
    case GateKind::Z: {
      std::string s(n, 'I');
      s[g.q0] = 'Z';
      return CliffordTableau::pauli_gate(from_pauli_string(s));
    }
  }
  throw std::logic_error("unreachable gate kind");
}

}  // namespace

Observable::Observable(std::vector<Term> terms, bool strict_coefficients)
    : terms_(std::move(terms)) {
  if (terms_.empty()) {
    throw std::invalid_argument("observable needs at least one term");
  }
  const std::size_t n = terms_.front().pauli.num_qubits();
  for (const auto& t : terms_) {
    if (t.pauli.num_qubits() != n) {
      throw std::invalid_argument("observable terms act on different qubit counts");
    }
    if (!t.pauli.is_hermitian()) {
      throw std::invalid_argument("observable terms must be hermitian");
    }
    if (!std::isfinite(t.coeff)) {
      throw std::invalid_argument("observable coefficient must be finite");
    }
    if (strict_coefficients && std::abs(t.coeff) > 1.0) {
      throw std::invalid_argument(
          "observable coefficient " + std::to_string(t.coeff) +
          " outside [-1, 1]; the sample-size analysis assumes |c_k| <= 1 "
          "(pass strict_coefficients=false to override)");
    }
  }
}

double Observable::sum_abs_coeff() const {
  double s = 0;
  for (const auto& t : terms_) {
    s += std::abs(t.coeff);
  }
  return s;
}

InputPoint::InputPoint(std::string bits) : bits_(std::move(bits)) {
  for (char c : bits_) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("input point must be a bitstring of 0/1");
    }
  }
}

void CircuitTemplate::validate() const {
  if (n == 0) {
    throw std::invalid_argument("circuit needs at least one qubit");
  }
  if (layers.size() != generators.size() + 1) {
    throw std::invalid_argument("expected L+1 Clifford layers for L generators, got " +
                                std::to_string(layers.size()) + " layers / " +
                                std::to_string(generators.size()) + " generators");
  }
  if (!observable) {
    throw std::invalid_argument("circuit has no observable");
  }
  for (const auto& g : generators) {
    if (g.num_qubits() != n) {
      throw std::invalid_argument("generator qubit count mismatch");
    }
    if (!g.is_hermitian()) {
      throw std::invalid_argument("rotation generators must be hermitian");
    }
  }
  for (const auto& t : observable->terms()) {
    if (t.pauli.num_qubits() != n) {
      throw std::invalid_argument("observable qubit count mismatch");
    }
  }
  for (const auto& layer : layers) {
    if (layer.is_explicit()) {
      for (const auto& [key, tab] : *layer.tableaux) {
        if (tab.num_qubits() != n) {
          throw std::invalid_argument("uploaded tableau qubit count mismatch");
        }
        if (key.size() != input_bits) {
          throw std::invalid_argument("uploaded tableau key length must equal input_bits");
        }
      }
      continue;
    }
    for (const auto& g : layer.gates) {
      if (g.q0 >= n || (gate_is_two_qubit(g.kind) && g.q1 >= n)) {
        throw std::invalid_argument("gate qubit index out of range");
      }
      if (g.if_bit && *g.if_bit >= input_bits) {
        throw std::invalid_argument("gate guard references input bit " +
                                    std::to_string(*g.if_bit) + " but input_bits=" +
                                    std::to_string(input_bits));
      }
    }
  }
}

InstantiatedCircuit instantiate(const CircuitTemplate& tmpl, const InputPoint& x) {
  if (x.bit_length() != tmpl.input_bits) {
    throw std::invalid_argument("input point has " + std::to_string(x.bit_length()) +
                                " bits, template expects " +
                                std::to_string(tmpl.input_bits));
  }
  InstantiatedCircuit inst;
  inst.forward.reserve(tmpl.layers.size());
  inst.inverted.reserve(tmpl.layers.size());
  for (const auto& layer : tmpl.layers) {
    if (layer.is_explicit()) {
      auto it = layer.tableaux->find(x.bits());
      if (it == layer.tableaux->end()) {
        throw std::invalid_argument("no uploaded tableau for input \"" + x.bits() + "\"");
      }
      inst.forward.push_back(it->second);
    } else {
      CliffordTableau acc = CliffordTableau::identity(tmpl.n);
      for (const auto& g : layer.gates) {
        if (g.if_bit && !x.bit(*g.if_bit)) {
          continue;
        }
        acc = compose(gate_tableau(tmpl.n, g), acc);
      }
      inst.forward.push_back(std::move(acc));
    }
    inst.inverted.push_back(inverse(inst.forward.back()));
  }
  return inst;
}

std::shared_ptr<const InstantiatedCircuit> CircuitCache::get(const InputPoint& x) {
  {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(x.bits());
    if (it != entries_.end()) {
      return it->second;
    }
  }
  auto inst = std::make_shared<const InstantiatedCircuit>(instantiate(*tmpl_, x));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.emplace(x.bits(), std::move(inst));
  return it->second;
}

void CircuitCache::invalidate() {
  std::unique_lock lock(mutex_);
  entries_.clear();
}

Evaluator::Evaluator(const CircuitTemplate& tmpl,
                     std::shared_ptr<const InstantiatedCircuit> inst)
    : tmpl_(&tmpl), inst_(std::move(inst)), work_(tmpl.n), tmp_(tmpl.n) {
  tmpl.validate();
  if (inst_->forward.size() != tmpl.layers.size()) {
    throw std::invalid_argument("instantiation does not match template layer count");
  }
}

double Evaluator::value(const ParameterVector& theta) {
  const std::size_t L = tmpl_->num_parameters();
  if (theta.size() != L) {
    throw std::invalid_argument("parameter vector has wrong length");
  }
  double acc = 0.0;
  for (const auto& term : tmpl_->observable->terms()) {
    work_ = term.pauli;
    // U^dag P U: walk the circuit from the last layer back to the first
    inst_->inverted[L].conjugate_into(work_, tmp_);
    std::swap(work_, tmp_);
    for (std::size_t l = L; l >= 1; --l) {
      rotation_conjugate_in_place(tmpl_->generators[l - 1], theta[l - 1], work_);
      inst_->inverted[l - 1].conjugate_into(work_, tmp_);
      std::swap(work_, tmp_);
    }
    acc += term.coeff * expectation_zero_state(work_);
  }
  return acc;
}

void Evaluator::gradient(const ParameterVector& theta, std::span<double> out) {
  const std::size_t L = tmpl_->num_parameters();
  if (out.size() != L) {
    throw std::invalid_argument("gradient output has wrong length");
  }
  shifted_ = theta;
  for (std::size_t i = 0; i < L; ++i) {
    shifted_[i] = theta[i].plus_quarter();
    const double plus = value(shifted_);
    shifted_[i] = theta[i].minus_quarter();
    const double minus = value(shifted_);
    shifted_[i] = theta[i];
    out[i] = 0.5 * (plus - minus);
  }
}

double evaluate_model(const CircuitTemplate& tmpl, const InputPoint& x,
                      const ParameterVector& theta) {
  Evaluator ev(tmpl, std::make_shared<const InstantiatedCircuit>(instantiate(tmpl, x)));
  return ev.value(theta);
}

std::vector<double> gradient(const CircuitTemplate& tmpl, const InputPoint& x,
                             const ParameterVector& theta) {
  Evaluator ev(tmpl, std::make_shared<const InstantiatedCircuit>(instantiate(tmpl, x)));
  std::vector<double> out(tmpl.num_parameters());
  ev.gradient(theta, out);
  return out;
}

}  // namespace qntk
