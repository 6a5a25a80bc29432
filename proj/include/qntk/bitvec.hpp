#pragma once

#include <bit>
#include <cstdint>
#include <cstddef>
#include <vector>

namespace qntk {

// Fixed-length vector over F2, packed into 64-bit words.
// Addition is XOR, inner product is popcount-of-AND parity.
class BitVec {
public:
  BitVec() = default;
  explicit BitVec(std::size_t nbits)
      : nbits_(nbits), words_((nbits + 63) / 64, 0) {}

  std::size_t size() const { return nbits_; }

  bool get(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i, bool v) {
    const std::uint64_t mask = std::uint64_t(1) << (i & 63);
    if (v) {
      words_[i >> 6] |= mask;
    } else {
      words_[i >> 6] &= ~mask;
    }
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t(1) << (i & 63); }

  BitVec& operator^=(const BitVec& o) {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      words_[k] ^= o.words_[k];
    }
    return *this;
  }

  void clear() {
    for (auto& w : words_) {
      w = 0;
    }
  }

  bool any() const {
    for (auto w : words_) {
      if (w) {
        return true;
      }
    }
    return false;
  }

  std::size_t popcount() const {
    std::size_t c = 0;
    for (auto w : words_) {
      c += std::size_t(std::popcount(w));
    }
    return c;
  }

  // visits indices of set bits in increasing order
  template <class F>
  void for_each_set_bit(F&& f) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w) {
        f(k * 64 + std::size_t(std::countr_zero(w)));
        w &= w - 1;
      }
    }
  }

  // parity of <a, b> over F2; both operands must have equal length
  friend bool dot_parity(const BitVec& a, const BitVec& b) {
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < a.words_.size(); ++k) {
      acc ^= a.words_[k] & b.words_[k];
    }
    return std::popcount(acc) & 1u;
  }

  friend bool operator==(const BitVec& a, const BitVec& b) {
    return a.nbits_ == b.nbits_ && a.words_ == b.words_;
  }

private:
  std::size_t nbits_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace qntk
