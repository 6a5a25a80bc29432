// Test-only dense-matrix reference built directly from 2x2 Pauli matrices
// and Kronecker products. Deliberately independent of both the tableau
// engine and the statevector oracle so cross-checks are two-sided.
#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qntk/circuit.hpp"

namespace dense_ref {

using Mat = Eigen::MatrixXcd;
using qntk::CircuitTemplate;
using qntk::GateKind;
using qntk::InputPoint;
using qntk::PauliElement;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline Mat sigma(int which) {
  Mat m(2, 2);
  const std::complex<double> i(0, 1);
  switch (which) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;          // X
    case 2: m << 0, -i, i, 0; break;         // Y
    default: m << 1, 0, 0, -1; break;        // Z
  }
  return m;
}

// tau_{vw} = Z^v X^w
inline Mat tau(bool v, bool w) {
  Mat m = Mat::Identity(2, 2);
  if (v) {
    m = sigma(3) * m;
  }
  if (w) {
    m = m * sigma(1);
  }
  return m;
}

// qubit 0 is the least-significant state-index bit, so it sits rightmost
// in the Kronecker chain
inline Mat dense(const PauliElement& p) {
  const std::size_t n = p.num_qubits();
  Mat acc = Mat::Identity(1, 1);
  for (std::size_t q = n; q-- > 0;) {
    acc = kron(acc, tau(p.z_bits().get(q), p.x_bits().get(q)));
  }
  std::complex<double> phase = p.epsilon() ? -1.0 : 1.0;
  if (p.delta()) {
    phase *= std::complex<double>(0, 1);
  }
  return phase * acc;
}

// full 2^n x 2^n gate unitary assembled column-by-column from its action
// on basis states
inline Mat gate_matrix(std::size_t n, GateKind kind, std::size_t q0, std::size_t q1 = 0) {
  const Eigen::Index dim = Eigen::Index(1) << n;
  Mat m = Mat::Zero(dim, dim);
  const std::complex<double> i(0, 1);
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index z = 0; z < dim; ++z) {
    const bool b0 = (z >> q0) & 1;
    const bool b1 = (z >> q1) & 1;
    switch (kind) {
      case GateKind::H:
        m(z & ~(Eigen::Index(1) << q0), z) = s;
        m(z | (Eigen::Index(1) << q0), z) = b0 ? -s : s;
        break;
      case GateKind::S:
        m(z, z) = b0 ? i : 1.0;
        break;
      case GateKind::X:
        m(z ^ (Eigen::Index(1) << q0), z) = 1.0;
        break;
      case GateKind::Y:
        m(z ^ (Eigen::Index(1) << q0), z) = b0 ? -i : i;
        break;
      case GateKind::Z:
        m(z, z) = b0 ? -1.0 : 1.0;
        break;
      case GateKind::Cnot:
        m(b0 ? z ^ (Eigen::Index(1) << q1) : z, z) = 1.0;
        break;
      case GateKind::Cz:
        m(z, z) = (b0 && b1) ? -1.0 : 1.0;
        break;
      case GateKind::Swap: {
        Eigen::Index t = z;
        if (b0 != b1) {
          t = z ^ (Eigen::Index(1) << q0) ^ (Eigen::Index(1) << q1);
        }
        m(t, z) = 1.0;
        break;
      }
    }
  }
  return m;
}

inline Mat rotation_matrix(const PauliElement& generator, double theta) {
  const Eigen::Index dim = Eigen::Index(1) << generator.num_qubits();
  const std::complex<double> i(0, 1);
  return std::cos(theta / 2.0) * Mat::Identity(dim, dim) -
         i * std::sin(theta / 2.0) * dense(generator);
}

inline Mat layer_matrix(std::size_t n, const qntk::CliffordLayerSpec& layer,
                        const InputPoint& x) {
  const Eigen::Index dim = Eigen::Index(1) << n;
  Mat acc = Mat::Identity(dim, dim);
  for (const auto& g : layer.gates) {
    if (g.if_bit && !x.bit(*g.if_bit)) {
      continue;
    }
    acc = gate_matrix(n, g.kind, g.q0, g.q1) * acc;
  }
  return acc;
}

inline Mat circuit_matrix(const CircuitTemplate& tmpl, const InputPoint& x,
                          const std::vector<double>& theta) {
  const Eigen::Index dim = Eigen::Index(1) << tmpl.n;
  Mat acc = Mat::Identity(dim, dim);
  for (std::size_t l = 0; l < tmpl.layers.size(); ++l) {
    acc = layer_matrix(tmpl.n, tmpl.layers[l], x) * acc;
    if (l < tmpl.num_parameters()) {
      acc = rotation_matrix(tmpl.generators[l], theta[l]) * acc;
    }
  }
  return acc;
}

inline double model_value(const CircuitTemplate& tmpl, const InputPoint& x,
                          const std::vector<double>& theta) {
  const Mat u = circuit_matrix(tmpl, x, theta);
  const Eigen::Index dim = u.rows();
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi[0] = 1.0;
  psi = u * psi;
  std::complex<double> acc = 0.0;
  for (const auto& term : tmpl.observable->terms()) {
    acc += term.coeff * (psi.adjoint() * dense(term.pauli) * psi)(0);
  }
  return acc.real();
}

}  // namespace dense_ref
