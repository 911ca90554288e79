#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

namespace gdnn {

/// Exponent vector of a monomial in n variables.
using MultiIndex = std::vector<std::uint8_t>;

int multi_index_degree(const MultiIndex& a);
MultiIndex multi_index_sum(const MultiIndex& a, const MultiIndex& b);

/// All monomials of degree m in n variables, graded-lexicographic
/// (x1^m first), with inverse lookup.
class MonomialBasis {
 public:
  MonomialBasis(int n, int m);

  int n() const { return n_; }
  int degree() const { return m_; }
  int size() const { return static_cast<int>(list_.size()); }
  const MultiIndex& operator[](int i) const { return list_[i]; }
  const std::vector<MultiIndex>& list() const { return list_; }

  /// Index of a multi-index; throws if absent.
  int index_of(const MultiIndex& a) const;

  static std::int64_t count(int n, int m);

 private:
  int n_, m_;
  std::vector<MultiIndex> list_;
  std::map<MultiIndex, int> lookup_;
};

/// Shared, cached basis (bases are reused heavily across calls).
std::shared_ptr<const MonomialBasis> monomial_basis(int n, int m);

/// Size guard for hierarchy levels; throws when |I(n,m)| exceeds the cap.
void check_basis_cap(int n, int m, std::int64_t cap = 1000000);

}  // namespace gdnn
