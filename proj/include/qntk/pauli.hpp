#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "qntk/bitvec.hpp"

namespace qntk {

/// A signed n-qubit Pauli operator in the binary parameterization
/// i^delta (-1)^epsilon tau_a, with a = (z | x) over F2 and the per-qubit
/// convention tau_00 = I, tau_01 = X, tau_10 = Z, tau_11 = ZX (= iY).
///
/// Immutable value type; all group operations are pure.
class PauliElement {
public:
  PauliElement() = default;

  // identity on n qubits
  explicit PauliElement(std::size_t n)
      : n_(n), z_(n), x_(n) {}

  PauliElement(std::size_t n, bool delta, bool epsilon, BitVec z, BitVec x);

  std::size_t num_qubits() const { return n_; }
  bool delta() const { return delta_; }
  bool epsilon() const { return epsilon_; }
  const BitVec& z_bits() const { return z_; }
  const BitVec& x_bits() const { return x_; }

  bool is_identity_string() const { return !z_.any() && !x_.any(); }

  // delta == z.x (mod 2), i.e. i^delta compensates the anti-hermitian
  // tau_11 factors exactly
  bool is_hermitian() const;

  // in-place phase adjustments; used by rotation conjugation
  void negate() { epsilon_ = !epsilon_; }
  void times_i();

  friend bool operator==(const PauliElement& a, const PauliElement& b) {
    return a.n_ == b.n_ && a.delta_ == b.delta_ && a.epsilon_ == b.epsilon_ &&
           a.z_ == b.z_ && a.x_ == b.x_;
  }

private:
  std::size_t n_ = 0;
  bool delta_ = false;
  bool epsilon_ = false;
  BitVec z_;
  BitVec x_;

  friend PauliElement pauli_mul(const PauliElement&, const PauliElement&);
  friend void mul_left_in_place(const PauliElement&, PauliElement&);
  friend class CliffordTableau;
};

/// q <- left * q without allocating.
void mul_left_in_place(const PauliElement& left, PauliElement& q);

/// Group product p*q via the binary multiplication rule:
/// delta and a add componentwise, epsilon picks up the i*i carry and the
/// reordering sign z(q).x(p).
PauliElement pauli_mul(const PauliElement& p, const PauliElement& q);

/// Symplectic-form commutation test: true iff p and q commute.
bool commutes(const PauliElement& p, const PauliElement& q);

/// <0^n| p |0^n>: 0 unless the X part vanishes, otherwise (-1)^epsilon.
/// Requires a hermitian input; a non-hermitian one indicates a
/// phase-tracking bug upstream and throws.
int expectation_zero_state(const PauliElement& p);

/// Parse "XIZY"-style strings. An optional prefix of '+'/'-' and 'i' fixes
/// the scalar in {+1,-1,+i,-i}; bare letters denote the hermitian element.
PauliElement from_pauli_string(std::string_view s);
PauliElement from_pauli_string(std::string_view letters, int sign, bool imaginary);

/// Canonical form: sign prefix, 'i' when non-hermitian, then one letter per
/// qubit. Round-trips through from_pauli_string exactly.
std::string to_string(const PauliElement& p);

}  // namespace qntk
