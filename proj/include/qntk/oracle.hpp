#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "qntk/circuit.hpp"
#include "qntk/regression.hpp"

namespace qntk::oracle {

/// Resource limits for the brute-force paths. QNTK_ORACLE_CAP_N in the
/// environment overrides the qubit cap.
struct OracleCaps {
  std::size_t max_qubits = 10;
  std::int64_t max_enumeration = 65536;   // 4^L grid size
  std::int64_t max_grid_points = 1 << 20; // P^L quadrature grid size
};

OracleCaps default_caps();

/// Dense 2^n-amplitude state, double precision. Norm is checked after every
/// gate application; this path is for verification only, clarity over speed.
class DenseState {
public:
  static DenseState zero_state(std::size_t n);

  std::size_t num_qubits() const { return n_; }
  const std::vector<std::complex<double>>& amplitudes() const { return amp_; }

  void apply_gate(GateKind kind, std::size_t q0, std::size_t q1 = 0);
  /// |psi> -> P |psi> (not unitary-checked; P carries its own phase)
  void apply_pauli(const PauliElement& p);
  /// exp(-i theta/2 P) |psi> at an arbitrary real angle
  void apply_rotation(const PauliElement& generator, double theta);

  std::complex<double> expectation(const PauliElement& p) const;
  double norm() const;

private:
  explicit DenseState(std::size_t n);
  void check_norm() const;

  std::size_t n_ = 0;
  std::vector<std::complex<double>> amp_;
};

/// f_theta(x) by direct matrix action at arbitrary real angles. Throws when
/// the expectation has a non-negligible imaginary part (a bug signal).
double statevector_model(const CircuitTemplate& tmpl, const InputPoint& x,
                         const std::vector<double>& theta,
                         const OracleCaps& caps = default_caps());

/// Parameter-shift gradient on the dense path.
std::vector<double> statevector_gradient(const CircuitTemplate& tmpl, const InputPoint& x,
                                         const std::vector<double>& theta,
                                         const OracleCaps& caps = default_caps());

/// Central finite differences, the independent cross-check for the shift rule.
std::vector<double> finite_difference_gradient(const CircuitTemplate& tmpl,
                                               const InputPoint& x,
                                               const std::vector<double>& theta,
                                               double h = 1e-5,
                                               const OracleCaps& caps = default_caps());

/// Exact discrete average of the empirical kernel over the full
/// {0, pi/2, pi, 3pi/2}^L grid, via the stabilizer path (summed in reverse
/// grid order relative to the estimator's enumeration).
double exact_ntk_enumeration(const CircuitTemplate& tmpl, const InputPoint& x,
                             const InputPoint& xp,
                             const OracleCaps& caps = default_caps());

/// Continuous-uniform expectation of the empirical kernel by equispaced
/// quadrature with points_per_dim >= 5 on the dense path. The integrand has
/// harmonic degree <= 2 per parameter, so any such grid integrates it
/// exactly, independently of the 4-point argument under test.
double exact_ntk_quadrature(const CircuitTemplate& tmpl, const InputPoint& x,
                            const InputPoint& xp, int points_per_dim = 8,
                            const OracleCaps& caps = default_caps());

/// Continuous-uniform expectations of f and of f(x) f(x') by the same grid.
double exact_mean_quadrature(const CircuitTemplate& tmpl, const InputPoint& x,
                             int points_per_dim = 8,
                             const OracleCaps& caps = default_caps());
double exact_k0_quadrature(const CircuitTemplate& tmpl, const InputPoint& x,
                           const InputPoint& xp, int points_per_dim = 8,
                           const OracleCaps& caps = default_caps());

/// Ground-truth trained mean from enumeration-exact kernels.
double exact_mu_infinity(const CircuitTemplate& tmpl, const InputPoint& x,
                         const TrainingSet& training,
                         const OracleCaps& caps = default_caps());

/// Seed-deterministic random instances shared by the verification and
/// acceptance suites.
struct RandomTemplateSpec {
  std::size_t n = 2;
  std::size_t num_parameters = 2;
  std::size_t num_terms = 1;
  std::size_t gates_per_layer = 4;
  std::size_t input_bits = 2;
  bool allow_guards = true;
};

CircuitTemplate random_template(std::uint64_t seed, const RandomTemplateSpec& spec);
InputPoint random_input(std::uint64_t seed, std::size_t bits);
ParameterVector random_discrete_angles(std::uint64_t seed, std::size_t L);
std::vector<double> random_continuous_angles(std::uint64_t seed, std::size_t L);
/// Uniform over the whole signed Pauli group (any phase).
PauliElement random_signed_pauli(std::uint64_t seed, std::size_t n);
/// Uniform over non-identity hermitian Pauli strings.
PauliElement random_hermitian_pauli_element(std::uint64_t seed, std::size_t n);

/// The single-qubit H - Rz(theta) - H circuit measuring Z: f_theta = cos(theta).
/// Used as a pinned closed-form instance throughout the test suites.
CircuitTemplate cos_theta_template();

/// Norm of the dense state after running the whole circuit (unitarity probe).
double final_state_norm(const CircuitTemplate& tmpl, const InputPoint& x,
                        const std::vector<double>& theta,
                        const OracleCaps& caps = default_caps());

}  // namespace qntk::oracle
