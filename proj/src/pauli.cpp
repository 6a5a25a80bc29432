#include "qntk/pauli.hpp"

#include <stdexcept>

namespace qntk {

namespace {

void require_same_size(const PauliElement& p, const PauliElement& q) {
  if (p.num_qubits() != q.num_qubits()) {
    throw std::invalid_argument("pauli operands act on different qubit counts: " +
                                std::to_string(p.num_qubits()) + " vs " +
                                std::to_string(q.num_qubits()));
  }
}

}  // namespace

PauliElement::PauliElement(std::size_t n, bool delta, bool epsilon, BitVec z, BitVec x)
    : n_(n), delta_(delta), epsilon_(epsilon), z_(std::move(z)), x_(std::move(x)) {
  if (z_.size() != n_ || x_.size() != n_) {
    throw std::invalid_argument("pauli bit vectors must have length n");
  }
}

bool PauliElement::is_hermitian() const {
  return delta_ == dot_parity(z_, x_);
}

void PauliElement::times_i() {
  // i * i^delta = i^(delta+1) with an i^2 = -1 carry when delta was set
  if (delta_) {
    epsilon_ = !epsilon_;
  }
  delta_ = !delta_;
}

PauliElement pauli_mul(const PauliElement& p, const PauliElement& q) {
  require_same_size(p, q);
  PauliElement r(p.num_qubits());
  r.delta_ = p.delta_ ^ q.delta_;
  // a_q^T U a_p = z(q) . x(p): the sign from commuting X factors of p past
  // Z factors of q when merging tau_{a_p} tau_{a_q}
  r.epsilon_ = p.epsilon_ ^ q.epsilon_ ^ (p.delta_ && q.delta_) ^
               dot_parity(q.z_, p.x_);
  r.z_ = p.z_;
  r.z_ ^= q.z_;
  r.x_ = p.x_;
  r.x_ ^= q.x_;
  return r;
}

void mul_left_in_place(const PauliElement& left, PauliElement& q) {
  require_same_size(left, q);
  q.epsilon_ = left.epsilon_ ^ q.epsilon_ ^ (left.delta_ && q.delta_) ^
               dot_parity(q.z_, left.x_);
  q.delta_ = left.delta_ ^ q.delta_;
  q.z_ ^= left.z_;
  q.x_ ^= left.x_;
}

bool commutes(const PauliElement& p, const PauliElement& q) {
  require_same_size(p, q);
  return !(dot_parity(p.z_bits(), q.x_bits()) ^ dot_parity(p.x_bits(), q.z_bits()));
}

int expectation_zero_state(const PauliElement& p) {
  if (!p.is_hermitian()) {
    throw std::invalid_argument(
        "expectation_zero_state called on a non-hermitian Pauli element "
        "(phase tracking bug upstream)");
  }
  if (p.x_bits().any()) {
    return 0;
  }
  return p.epsilon() ? -1 : 1;
}

PauliElement from_pauli_string(std::string_view s) {
  if (s.empty()) {
    throw std::invalid_argument("empty Pauli string");
  }
  int sign = +1;
  bool imaginary = false;
  std::size_t pos = 0;
  if (s[pos] == '+' || s[pos] == '-') {
    sign = (s[pos] == '-') ? -1 : +1;
    ++pos;
  }
  if (pos < s.size() && s[pos] == 'i') {
    imaginary = true;
    ++pos;
  }
  return from_pauli_string(s.substr(pos), sign, imaginary);
}

PauliElement from_pauli_string(std::string_view letters, int sign, bool imaginary) {
  if (letters.empty()) {
    throw std::invalid_argument("empty Pauli string");
  }
  if (sign != 1 && sign != -1) {
    throw std::invalid_argument("Pauli sign must be +1 or -1");
  }
  const std::size_t n = letters.size();
  BitVec z(n);
  BitVec x(n);
  std::size_t y_count = 0;
  for (std::size_t q = 0; q < n; ++q) {
    switch (letters[q]) {
      case 'I':
        break;
      case 'X':
        x.set(q, true);
        break;
      case 'Z':
        z.set(q, true);
        break;
      case 'Y':
        z.set(q, true);
        x.set(q, true);
        ++y_count;
        break;
      default:
        throw std::invalid_argument(std::string("illegal Pauli letter '") +
                                    letters[q] + "' (expected I, X, Y, or Z)");
    }
  }
  // The letters denote the hermitian operator, i.e. (-i)^{#Y} tau_a.
  bool delta = y_count & 1u;
  bool epsilon = ((y_count + 1) >> 1) & 1u;
  PauliElement p(n, delta, epsilon, std::move(z), std::move(x));
  if (imaginary) {
    p.times_i();
  }
  if (sign < 0) {
    p.negate();
  }
  return p;
}

std::string to_string(const PauliElement& p) {
  const std::size_t n = p.num_qubits();
  // scalar relative to the hermitian representative of the same bit pattern
  std::size_t y_count = 0;
  std::string letters(n, 'I');
  for (std::size_t q = 0; q < n; ++q) {
    const bool zq = p.z_bits().get(q);
    const bool xq = p.x_bits().get(q);
    if (zq && xq) {
      letters[q] = 'Y';
      ++y_count;
    } else if (zq) {
      letters[q] = 'Z';
    } else if (xq) {
      letters[q] = 'X';
    }
  }
  const bool herm_delta = y_count & 1u;
  const bool herm_epsilon = ((y_count + 1) >> 1) & 1u;
  // p = lambda * hermitian, lambda = i^(delta - herm_delta) * (-1)^(epsilon - herm_epsilon)
  bool minus = p.epsilon() ^ herm_epsilon;
  bool imag = p.delta() ^ herm_delta;
  if (imag && !p.delta()) {
    // i^{-1} = -i
    minus = !minus;
  }
  std::string out;
  out.reserve(n + 2);
  out.push_back(minus ? '-' : '+');
  if (imag) {
    out.push_back('i');
  }
  out += letters;
  return out;
}

}  // namespace qntk
