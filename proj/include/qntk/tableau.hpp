#pragma once

#include <cstdint>
#include <vector>

#include "qntk/pauli.hpp"

namespace qntk {

/// Rotation angle restricted to {0, pi/2, pi, 3pi/2}, stored exactly as a
/// quarter-turn count. The estimator never touches floating-point angles.
class DiscreteAngle {
public:
  constexpr DiscreteAngle() = default;
  constexpr explicit DiscreteAngle(int quarter_turns)
      : q_(static_cast<std::uint8_t>(((quarter_turns % 4) + 4) % 4)) {}

  constexpr int quarter_turns() const { return q_; }
  double radians() const;

  constexpr DiscreteAngle plus_quarter() const { return DiscreteAngle(q_ + 1); }
  constexpr DiscreteAngle minus_quarter() const { return DiscreteAngle(q_ + 3); }

  friend constexpr bool operator==(DiscreteAngle a, DiscreteAngle b) {
    return a.q_ == b.q_;
  }

private:
  std::uint8_t q_ = 0;
};

/// A Clifford unitary up to global phase, represented by the images of the
/// 2n hermitian generators Z_0..Z_{n-1}, X_0..X_{n-1} under Q . Q^dag.
/// Equivalently the binary data (C, d, h): column k of C is the bit pattern
/// of image k, d_k/h_k its phase bits.
///
/// Immutable after construction. Conjugation runs in O(n^2) bit operations
/// using the cached strictly-lower-triangular form lows(C^T U C + d d^T).
class CliffordTableau {
public:
  static CliffordTableau identity(std::size_t n);
  static CliffordTableau hadamard(std::size_t n, std::size_t q);
  static CliffordTableau phase_s(std::size_t n, std::size_t q);
  static CliffordTableau cnot(std::size_t n, std::size_t control, std::size_t target);
  static CliffordTableau cz(std::size_t n, std::size_t a, std::size_t b);
  static CliffordTableau swap_gate(std::size_t n, std::size_t a, std::size_t b);
  /// Conjugation by the (possibly non-hermitian) Pauli unitary p; the phase
  /// of p cancels, only its bit pattern matters.
  static CliffordTableau pauli_gate(const PauliElement& p);
  /// Build from explicit generator images; validates hermiticity and the
  /// symplectic condition.
  static CliffordTableau from_generator_images(std::size_t n,
                                               std::vector<PauliElement> images);

  std::size_t num_qubits() const { return n_; }

  /// Image of generator k (k < n: Z_k, k >= n: X_{k-n}).
  const PauliElement& generator_image(std::size_t k) const { return images_[k]; }

  PauliElement conjugate(const PauliElement& p) const;
  /// Hot-path variant: writes Q p Q^dag into `out` (must not alias `p`).
  void conjugate_into(const PauliElement& p, PauliElement& out) const;

  /// C^T J C = J, i.e. conjugation preserves all commutation relations.
  bool is_symplectic() const;

  friend bool operator==(const CliffordTableau& a, const CliffordTableau& b) {
    return a.n_ == b.n_ && a.images_ == b.images_;
  }

  friend CliffordTableau compose(const CliffordTableau& outer,
                                 const CliffordTableau& inner);
  friend CliffordTableau inverse(const CliffordTableau& t);

private:
  CliffordTableau() = default;

  std::size_t n_ = 0;
  std::vector<PauliElement> images_;

  // packed copies of d and h, split over the Z/X generator blocks
  BitVec d_lo_, d_hi_, h_lo_, h_hi_;
  // rows of lows(C^T U C + d d^T), indexed like the generators
  struct Row {
    BitVec lo, hi;
  };
  std::vector<Row> quad_rows_;

  void build_caches();
  bool quad_form(const BitVec& z, const BitVec& x) const;
};

/// Heisenberg action of the rotation gate exp(-i theta/2 P):
/// returns exp(+i theta/2 P) q exp(-i theta/2 P), which is q when [P,q]=0
/// and otherwise q, iPq, -q, -iPq for theta = 0, pi/2, pi, 3pi/2.
PauliElement rotation_conjugate(const PauliElement& generator, DiscreteAngle theta,
                                const PauliElement& q);
/// In-place variant for the evaluation hot path.
void rotation_conjugate_in_place(const PauliElement& generator, DiscreteAngle theta,
                                 PauliElement& q);

}  // namespace qntk
