#ifndef SPINQUANT_MONO_HPP
#define SPINQUANT_MONO_HPP

#include "spinquant/scalar.hpp"

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace spinq {

inline constexpr int kMaxDim = 8;

/// Flat metric eta = diag(+1 x p, -1 x q).
struct Signature {
  int p = 0, q = 0;

  Signature() = default;
  Signature(int plus, int minus) : p(plus), q(minus) {
    if (p < 0 || q < 0 || p + q < 1 || p + q > kMaxDim)
      throw std::invalid_argument("signature (" + std::to_string(p) + "," + std::to_string(q) +
                                  ") outside supported dimensions 1.." + std::to_string(kMaxDim));
  }
  static Signature euclidean(int n) { return {n, 0}; }
  static Signature lorentzian(int n) { return {n - 1, 1}; }

  int n() const { return p + q; }
  /// eta_ii (equal to eta^ii); indices are 0-based.
  int eta(int i) const { return i < p ? 1 : -1; }
  std::string str() const { return "(" + std::to_string(p) + "," + std::to_string(q) + ")"; }
  friend bool operator==(const Signature &, const Signature &) = default;
};

/// Exponent data of one term: x^a p^b xi^I hbar^e. Operators reuse the layout with
/// p standing for d/dx and xi for the Clifford basis element gamma^I.
struct Mono {
  std::array<std::uint8_t, kMaxDim> x{};
  std::array<std::uint8_t, kMaxDim> p{};
  std::uint16_t xi = 0; // bit i set <=> index i in I
  std::int8_t hbar = 0;

  auto operator<=>(const Mono &) const = default;

  int xdeg() const {
    int d = 0;
    for (auto e : x)
      d += e;
    return d;
  }
  int pdeg() const {
    int d = 0;
    for (auto e : p)
      d += e;
    return d;
  }
  int xideg() const { return std::popcount(xi); }
  bool x_free() const { return xdeg() == 0; }
};

/// Number of set bits of `mask` strictly above / below bit i.
inline int bits_above(std::uint16_t mask, int i) { return std::popcount(static_cast<std::uint16_t>(mask >> (i + 1))); }
inline int bits_below(std::uint16_t mask, int i) {
  return std::popcount(static_cast<std::uint16_t>(mask & ((1u << i) - 1u)));
}

/// Sign of reordering xi^I xi^J (I, J disjoint) into increasing order.
inline int merge_sign(std::uint16_t a, std::uint16_t b) {
  int swaps = 0;
  while (b) {
    int j = std::countr_zero(b);
    swaps += bits_above(a, j);
    b &= static_cast<std::uint16_t>(b - 1);
  }
  return (swaps & 1) ? -1 : 1;
}

/// Sparse linear combination of monomials with canonical (sorted, zero-free) storage.
template <class C> class Terms {
public:
  using Map = std::map<Mono, C>;

  const Map &map() const { return m_; }
  bool is_zero() const { return m_.empty(); }
  std::size_t size() const { return m_.size(); }
  auto begin() const { return m_.begin(); }
  auto end() const { return m_.end(); }

  C coeff(const Mono &k) const {
    auto it = m_.find(k);
    return it == m_.end() ? C(0) : it->second;
  }

  void add(const Mono &k, const C &c) {
    if (c.is_zero())
      return;
    auto [it, inserted] = m_.try_emplace(k, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero())
        m_.erase(it);
    }
  }
  void add(const Terms &o, const C &scale) {
    for (const auto &[k, c] : o.m_)
      add(k, c * scale);
  }
  Terms &operator+=(const Terms &o) {
    for (const auto &[k, c] : o.m_)
      add(k, c);
    return *this;
  }
  Terms &operator-=(const Terms &o) {
    for (const auto &[k, c] : o.m_)
      add(k, -c);
    return *this;
  }
  Terms scaled(const C &s) const {
    Terms out;
    if (s.is_zero())
      return out;
    for (const auto &[k, c] : m_)
      out.m_.emplace(k, c * s);
    return out;
  }
  friend bool operator==(const Terms &a, const Terms &b) { return a.m_ == b.m_; }

private:
  Map m_;
};

} // namespace spinq

#endif
