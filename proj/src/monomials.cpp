#include "gdnn/monomials.hpp"

#include <mutex>
#include <stdexcept>

namespace gdnn {

int multi_index_degree(const MultiIndex& a) {
  int d = 0;
  for (auto v : a) d += v;
  return d;
}

MultiIndex multi_index_sum(const MultiIndex& a, const MultiIndex& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("multi-index size mismatch");
  MultiIndex out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i] = static_cast<std::uint8_t>(a[i] + b[i]);
  return out;
}

namespace {

void enumerate_rec(int pos, int remaining, MultiIndex& cur,
                   std::vector<MultiIndex>& out) {
  const int n = static_cast<int>(cur.size());
  if (pos == n - 1) {
    cur[pos] = static_cast<std::uint8_t>(remaining);
    out.push_back(cur);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    cur[pos] = static_cast<std::uint8_t>(k);
    enumerate_rec(pos + 1, remaining - k, cur, out);
  }
}

}  // namespace

MonomialBasis::MonomialBasis(int n, int m) : n_(n), m_(m) {
  if (n < 1 || m < 0) throw std::invalid_argument("MonomialBasis: bad (n,m)");
  check_basis_cap(n, m);
  MultiIndex cur(n, 0);
  if (n == 1) {
    cur[0] = static_cast<std::uint8_t>(m);
    list_.push_back(cur);
  } else {
    enumerate_rec(0, m, cur, list_);
  }
  for (int i = 0; i < size(); ++i) lookup_[list_[i]] = i;
}

int MonomialBasis::index_of(const MultiIndex& a) const {
  auto it = lookup_.find(a);
  if (it == lookup_.end())
    throw std::invalid_argument("multi-index not in basis");
  return it->second;
}

std::int64_t MonomialBasis::count(int n, int m) {
  // C(n+m-1, m), with saturation at a generous bound
  std::int64_t r = 1;
  for (int i = 1; i <= m; ++i) {
    r = r * (n - 1 + i) / i;
    if (r > (std::int64_t{1} << 50)) return std::int64_t{1} << 50;
  }
  return r;
}

std::shared_ptr<const MonomialBasis> monomial_basis(int n, int m) {
  static std::mutex mtx;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialBasis>>
      cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(n, m);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto basis = std::make_shared<const MonomialBasis>(n, m);
  cache[key] = basis;
  return basis;
}

void check_basis_cap(int n, int m, std::int64_t cap) {
  if (MonomialBasis::count(n, m) > cap)
    throw std::length_error("monomial basis size exceeds cap");
}

}  // namespace gdnn
