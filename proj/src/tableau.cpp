#include "qntk/tableau.hpp"

#include <numbers>
#include <stdexcept>

namespace qntk {

double DiscreteAngle::radians() const {
  return double(q_) * std::numbers::pi / 2.0;
}

namespace {

void require_qubit(std::size_t n, std::size_t q) {
  if (q >= n) {
    throw std::invalid_argument("qubit index " + std::to_string(q) +
                                " out of range for n=" + std::to_string(n));
  }
}

PauliElement single_z(std::size_t n, std::size_t q) {
  BitVec z(n), x(n);
  z.set(q, true);
  return PauliElement(n, false, false, std::move(z), std::move(x));
}

PauliElement single_x(std::size_t n, std::size_t q) {
  BitVec z(n), x(n);
  x.set(q, true);
  return PauliElement(n, false, false, std::move(z), std::move(x));
}

PauliElement single_y(std::size_t n, std::size_t q) {
  // hermitian Y = i^1 (-1)^1 tau_11
  BitVec z(n), x(n);
  z.set(q, true);
  x.set(q, true);
  return PauliElement(n, true, true, std::move(z), std::move(x));
}

PauliElement pauli_from_bits(std::size_t n, bool delta, bool epsilon, const BitVec& z,
                             const BitVec& x) {
  return PauliElement(n, delta, epsilon, z, x);
}

}  // namespace

void CliffordTableau::build_caches() {
  const std::size_t n = n_;
  d_lo_ = BitVec(n);
  d_hi_ = BitVec(n);
  h_lo_ = BitVec(n);
  h_hi_ = BitVec(n);
  for (std::size_t k = 0; k < n; ++k) {
    d_lo_.set(k, images_[k].delta());
    h_lo_.set(k, images_[k].epsilon());
    d_hi_.set(k, images_[n + k].delta());
    h_hi_.set(k, images_[n + k].epsilon());
  }
  // quad_rows_[j] bit k (k < j): v(c_j).w(c_k) + d_j d_k
  quad_rows_.assign(2 * n, Row{BitVec(n), BitVec(n)});
  for (std::size_t j = 0; j < 2 * n; ++j) {
    const PauliElement& cj = images_[j];
    const bool dj = cj.delta();
    Row& row = quad_rows_[j];
    for (std::size_t k = 0; k < j; ++k) {
      const PauliElement& ck = images_[k];
      bool bit = dot_parity(cj.z_bits(), ck.x_bits()) ^ (dj && ck.delta());
      if (bit) {
        if (k < n) {
          row.lo.set(k, true);
        } else {
          row.hi.set(k - n, true);
        }
      }
    }
  }
}

bool CliffordTableau::quad_form(const BitVec& z, const BitVec& x) const {
  bool acc = false;
  z.for_each_set_bit([&](std::size_t j) {
    const Row& row = quad_rows_[j];
    acc ^= dot_parity(row.lo, z) ^ dot_parity(row.hi, x);
  });
  x.for_each_set_bit([&](std::size_t j) {
    const Row& row = quad_rows_[n_ + j];
    acc ^= dot_parity(row.lo, z) ^ dot_parity(row.hi, x);
  });
  return acc;
}

CliffordTableau CliffordTableau::identity(std::size_t n) {
  CliffordTableau t;
  t.n_ = n;
  t.images_.reserve(2 * n);
  for (std::size_t q = 0; q < n; ++q) {
    t.images_.push_back(single_z(n, q));
  }
  for (std::size_t q = 0; q < n; ++q) {
    t.images_.push_back(single_x(n, q));
  }
  t.build_caches();
  return t;
}

CliffordTableau CliffordTableau::hadamard(std::size_t n, std::size_t q) {
  require_qubit(n, q);
  CliffordTableau t = identity(n);
  t.images_[q] = single_x(n, q);      // Z -> X
  t.images_[n + q] = single_z(n, q);  // X -> Z
  t.build_caches();
  return t;
}

CliffordTableau CliffordTableau::phase_s(std::size_t n, std::size_t q) {
  require_qubit(n, q);
  CliffordTableau t = identity(n);
  t.images_[n + q] = single_y(n, q);  // X -> Y, Z fixed
  t.build_caches();
  return t;
}

CliffordTableau CliffordTableau::cnot(std::size_t n, std::size_t control,
                                      std::size_t target) {
  require_qubit(n, control);
  require_qubit(n, target);
  if (control == target) {
    throw std::invalid_argument("cnot control and target must differ");
  }
  CliffordTableau t = identity(n);
  {
    // Z_t -> Z_c Z_t
    BitVec z(n), x(n);
    z.set(control, true);
    z.set(target, true);
    t.images_[target] = pauli_from_bits(n, false, false, z, x);
  }
  {
    // X_c -> X_c X_t
    BitVec z(n), x(n);
    x.set(control, true);
    x.set(target, true);
    t.images_[n + control] = pauli_from_bits(n, false, false, z, x);
  }
  t.build_caches();
  return t;
}

CliffordTableau CliffordTableau::cz(std::size_t n, std::size_t a, std::size_t b) {
  require_qubit(n, a);
  require_qubit(n, b);
  if (a == b) {
    throw std::invalid_argument("cz qubits must differ");
  }
  CliffordTableau t = identity(n);
  {
    // X_a -> X_a Z_b
    BitVec z(n), x(n);
    z.set(b, true);
    x.set(a, true);
    t.images_[n + a] = pauli_from_bits(n, false, false, z, x);
  }
  {
    // X_b -> X_b Z_a
    BitVec z(n), x(n);
    z.set(a, true);
    x.set(b, true);
    t.images_[n + b] = pauli_from_bits(n, false, false, z, x);
  }
  t.build_caches();
  return t;
}

CliffordTableau CliffordTableau::swap_gate(std::size_t n, std::size_t a, std::size_t b) {
  require_qubit(n, a);
  require_qubit(n, b);
  CliffordTableau t = identity(n);
  t.images_[a] = single_z(n, b);
  t.images_[b] = single_z(n, a);
  t.images_[n + a] = single_x(n, b);
  t.images_[n + b] = single_x(n, a);
  t.build_caches();
  return t;
}

CliffordTableau CliffordTableau::pauli_gate(const PauliElement& p) {
  const std::size_t n = p.num_qubits();
  CliffordTableau t = identity(n);
  for (std::size_t q = 0; q < n; ++q) {
    // P G P^dag = -G exactly when P and G anticommute
    if (p.x_bits().get(q)) {
      t.images_[q].negate();  // Z_q picks up a sign
    }
    if (p.z_bits().get(q)) {
      t.images_[n + q].negate();  // X_q picks up a sign
    }
  }
  t.build_caches();
  return t;
}

CliffordTableau CliffordTableau::from_generator_images(std::size_t n,
                                                       std::vector<PauliElement> images) {
  if (images.size() != 2 * n) {
    throw std::invalid_argument("expected 2n generator images");
  }
  for (const auto& img : images) {
    if (img.num_qubits() != n) {
      throw std::invalid_argument("generator image qubit count mismatch");
    }
    if (!img.is_hermitian()) {
      throw std::invalid_argument("generator images must be hermitian");
    }
  }
  CliffordTableau t;
  t.n_ = n;
  t.images_ = std::move(images);
  if (!t.is_symplectic()) {
    throw std::invalid_argument("generator images violate the symplectic condition");
  }
  t.build_caches();
  return t;
}

bool CliffordTableau::is_symplectic() const {
  const std::size_t n = n_;
  for (std::size_t j = 0; j < 2 * n; ++j) {
    for (std::size_t k = j + 1; k < 2 * n; ++k) {
      const bool want_anticommute = (k == j + n);
      if (commutes(images_[j], images_[k]) == want_anticommute) {
        return false;
      }
    }
  }
  return true;
}

PauliElement CliffordTableau::conjugate(const PauliElement& p) const {
  PauliElement out(n_);
  conjugate_into(p, out);
  return out;
}

void CliffordTableau::conjugate_into(const PauliElement& p, PauliElement& out) const {
  if (p.num_qubits() != n_) {
    throw std::invalid_argument("pauli/tableau qubit count mismatch");
  }
  if (&out == &p) {
    throw std::invalid_argument("conjugate_into output must not alias the input");
  }
  if (out.num_qubits() != n_) {
    out = PauliElement(n_);
  } else {
    out.z_.clear();
    out.x_.clear();
  }
  const BitVec& bz = p.z_bits();
  const BitVec& bx = p.x_bits();
  // b2 = C b1: XOR the images over the set bits of b1
  bz.for_each_set_bit([&](std::size_t k) {
    out.z_ ^= images_[k].z_bits();
    out.x_ ^= images_[k].x_bits();
  });
  bx.for_each_set_bit([&](std::size_t k) {
    out.z_ ^= images_[n_ + k].z_bits();
    out.x_ ^= images_[n_ + k].x_bits();
  });
  const bool db = dot_parity(d_lo_, bz) ^ dot_parity(d_hi_, bx);
  const bool hb = dot_parity(h_lo_, bz) ^ dot_parity(h_hi_, bx);
  const bool quad = quad_form(bz, bx);
  out.delta_ = p.delta() ^ db;
  out.epsilon_ = p.epsilon() ^ hb ^ quad ^ (p.delta() && db);
}

CliffordTableau compose(const CliffordTableau& outer, const CliffordTableau& inner) {
  if (outer.n_ != inner.n_) {
    throw std::invalid_argument("tableau qubit count mismatch in compose");
  }
  CliffordTableau t;
  t.n_ = outer.n_;
  t.images_.reserve(2 * t.n_);
  for (const auto& img : inner.images_) {
    t.images_.push_back(outer.conjugate(img));
  }
  t.build_caches();
  return t;
}

CliffordTableau inverse(const CliffordTableau& t) {
  const std::size_t n = t.n_;
  const auto swap_half = [n](std::size_t i) { return i < n ? i + n : i - n; };
  const auto c_bit = [&](std::size_t row, std::size_t col) {
    const PauliElement& img = t.images_[col];
    return row < n ? img.z_bits().get(row) : img.x_bits().get(row - n);
  };
  CliffordTableau r;
  r.n_ = n;
  r.images_.reserve(2 * n);
  for (std::size_t k = 0; k < 2 * n; ++k) {
    // symplectic inverse: C' = J C^T J, i.e. bit j of c'_k is C[J(k)][J(j)]
    BitVec z(n), x(n);
    for (std::size_t j = 0; j < 2 * n; ++j) {
      if (c_bit(swap_half(k), swap_half(j))) {
        if (j < n) {
          z.set(j, true);
        } else {
          x.set(j - n, true);
        }
      }
    }
    // phases chosen so that conjugating the image through t recovers the
    // generator with no residual sign
    const bool dk = dot_parity(t.d_lo_, z) ^ dot_parity(t.d_hi_, x);
    const bool hk =
        dot_parity(t.h_lo_, z) ^ dot_parity(t.h_hi_, x) ^ t.quad_form(z, x) ^ dk;
    r.images_.push_back(PauliElement(n, dk, hk, std::move(z), std::move(x)));
  }
  r.build_caches();
  return r;
}

PauliElement rotation_conjugate(const PauliElement& generator, DiscreteAngle theta,
                                const PauliElement& q) {
  PauliElement out = q;
  rotation_conjugate_in_place(generator, theta, out);
  return out;
}

void rotation_conjugate_in_place(const PauliElement& generator, DiscreteAngle theta,
                                 PauliElement& q) {
  if (!generator.is_hermitian()) {
    throw std::invalid_argument("rotation generator must be hermitian");
  }
  if (theta.quarter_turns() == 0 || commutes(generator, q)) {
    return;
  }
  switch (theta.quarter_turns()) {
    case 1:  // i P q
      mul_left_in_place(generator, q);
      q.times_i();
      break;
    case 2:  // -q
      q.negate();
      break;
    case 3:  // -i P q
      mul_left_in_place(generator, q);
      q.times_i();
      q.negate();
      break;
    default:
      break;
  }
}

}  // namespace qntk
