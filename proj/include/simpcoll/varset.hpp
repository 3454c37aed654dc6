#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace simpcoll {

/// A subset of variable indices {0, ..., n-1}, stored as a bitmask.
///
/// Subsets of a table's variables index interaction terms, margins and
/// conditioning sets. Iteration order over members is always ascending, which
/// fixes the row-major layout of every array indexed by i_A.
class VarSet {
 public:
  static constexpr int kMaxVariables = 20;

  constexpr VarSet() = default;
  constexpr explicit VarSet(std::uint32_t mask) : mask_(mask) {}
  VarSet(std::initializer_list<int> members) {
    for (int j : members) mask_ |= (1u << j);
  }

  static constexpr VarSet full(int n) { return VarSet(n >= 32 ? ~0u : ((1u << n) - 1u)); }
  static constexpr VarSet single(int j) { return VarSet(1u << j); }

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr int size() const { return std::popcount(mask_); }
  constexpr bool contains(int j) const { return (mask_ >> j) & 1u; }
  constexpr bool subset_of(VarSet other) const { return (mask_ & ~other.mask_) == 0; }
  constexpr bool proper_subset_of(VarSet other) const { return subset_of(other) && mask_ != other.mask_; }
  constexpr bool intersects(VarSet other) const { return (mask_ & other.mask_) != 0; }

  constexpr VarSet operator|(VarSet o) const { return VarSet(mask_ | o.mask_); }
  constexpr VarSet operator&(VarSet o) const { return VarSet(mask_ & o.mask_); }
  constexpr VarSet operator-(VarSet o) const { return VarSet(mask_ & ~o.mask_); }
  constexpr bool operator==(const VarSet&) const = default;
  constexpr auto operator<=>(const VarSet&) const = default;

  std::vector<int> members() const {
    std::vector<int> out;
    for (std::uint32_t m = mask_; m != 0; m &= m - 1) out.push_back(std::countr_zero(m));
    return out;
  }

  /// Every Z ⊆ *this, in increasing popcount order (ties by mask value).
  std::vector<VarSet> subsets() const {
    std::vector<VarSet> out;
    std::uint32_t z = 0;
    do {
      out.emplace_back(z);
      z = (z - mask_) & mask_;
    } while (z != 0);
    std::stable_sort(out.begin(), out.end(), [](VarSet a, VarSet b) { return a.size() < b.size(); });
    return out;
  }

  /// Re-express this subset relative to the members of `within` (bit k = k-th member).
  VarSet relative_to(VarSet within) const {
    std::uint32_t out = 0;
    int k = 0;
    for (int j : within.members()) {
      if (contains(j)) out |= (1u << k);
      ++k;
    }
    return VarSet(out);
  }

 private:
  std::uint32_t mask_ = 0;
};

/// (-1)^{|A - Z|} for Z ⊆ A.
inline int mobius_sign(VarSet a, VarSet z) { return ((a - z).size() % 2 == 0) ? 1 : -1; }

}  // namespace simpcoll
