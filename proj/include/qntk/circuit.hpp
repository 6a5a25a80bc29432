#pragma once

#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "qntk/tableau.hpp"

namespace qntk {

enum class GateKind { H, S, Cnot, Cz, Swap, X, Y, Z };

const char* gate_name(GateKind kind);
GateKind gate_from_name(const std::string& name);
bool gate_is_two_qubit(GateKind kind);

/// One gate application, optionally guarded by an input bit: the gate is
/// applied only when that bit of the input point is 1 (basis encoding and
/// friends).
struct GateApplication {
  GateKind kind;
  std::size_t q0 = 0;
  std::size_t q1 = 0;  // second operand for two-qubit gates
  std::optional<std::size_t> if_bit;
};

/// A Clifford layer: either an ordered gate list (possibly input-guarded)
/// or explicit tableaux uploaded per input bitstring.
struct CliffordLayerSpec {
  std::vector<GateApplication> gates;
  std::optional<std::map<std::string, CliffordTableau>> tableaux;

  bool is_explicit() const { return tableaux.has_value(); }
};

/// Measured observable: a real linear combination of hermitian Pauli
/// elements with coefficients in [-1, 1] (the strict flag relaxes the
/// coefficient range check).
class Observable {
public:
  struct Term {
    double coeff;
    PauliElement pauli;
  };

  Observable(std::vector<Term> terms, bool strict_coefficients = true);

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  /// Reported alongside the term count m; the concentration constants use
  /// m while this is the (possibly tighter) actual bound on |f|.
  double sum_abs_coeff() const;

private:
  std::vector<Term> terms_;
};

/// A feature value: a fixed-length bitstring.
class InputPoint {
public:
  InputPoint() = default;
  explicit InputPoint(std::string bits);

  const std::string& bits() const { return bits_; }
  std::size_t bit_length() const { return bits_.size(); }
  bool bit(std::size_t i) const { return bits_[i] == '1'; }

  friend bool operator==(const InputPoint& a, const InputPoint& b) {
    return a.bits_ == b.bits_;
  }
  friend auto operator<=>(const InputPoint& a, const InputPoint& b) {
    return a.bits_ <=> b.bits_;
  }

private:
  std::string bits_;
};

using ParameterVector = std::vector<DiscreteAngle>;

/// The ansatz: L+1 input-conditioned Clifford layers interleaved with L
/// hermitian Pauli rotation generators, plus the measured observable.
struct CircuitTemplate {
  std::size_t n = 0;
  std::size_t input_bits = 0;
  std::vector<CliffordLayerSpec> layers;
  std::vector<PauliElement> generators;
  std::shared_ptr<const Observable> observable;

  std::size_t num_parameters() const { return generators.size(); }
  void validate() const;
};

/// Concrete layer unitaries for one input point. Evaluation conjugates
/// observables backward through the circuit, so the inverse tableaux are
/// precomputed here.
struct InstantiatedCircuit {
  std::vector<CliffordTableau> forward;
  std::vector<CliffordTableau> inverted;
};

InstantiatedCircuit instantiate(const CircuitTemplate& tmpl, const InputPoint& x);

/// Per-input instantiation cache: concurrent reads, single-writer
/// population, explicit invalidation.
class CircuitCache {
public:
  explicit CircuitCache(const CircuitTemplate& tmpl) : tmpl_(&tmpl) {}

  std::shared_ptr<const InstantiatedCircuit> get(const InputPoint& x);
  void invalidate();

private:
  const CircuitTemplate* tmpl_;
  std::map<std::string, std::shared_ptr<const InstantiatedCircuit>> entries_;
  std::shared_mutex mutex_;
};

/// Reusable model-function evaluator bound to one (template, input) pair.
/// Owns scratch buffers; not thread-safe, create one per worker.
class Evaluator {
public:
  Evaluator(const CircuitTemplate& tmpl, std::shared_ptr<const InstantiatedCircuit> inst);

  /// f_theta(x) = <0^n| U^dag O U |0^n> at discrete angles.
  double value(const ParameterVector& theta);
  /// Parameter-shift gradient: out[i] = (f(theta + pi/2 e_i) - f(theta - pi/2 e_i)) / 2.
  void gradient(const ParameterVector& theta, std::span<double> out);

private:
  const CircuitTemplate* tmpl_;
  std::shared_ptr<const InstantiatedCircuit> inst_;
  PauliElement work_;
  PauliElement tmp_;
  ParameterVector shifted_;
};

double evaluate_model(const CircuitTemplate& tmpl, const InputPoint& x,
                      const ParameterVector& theta);
std::vector<double> gradient(const CircuitTemplate& tmpl, const InputPoint& x,
                             const ParameterVector& theta);

}  // namespace qntk
