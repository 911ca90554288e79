#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gdnn {

enum class BlockKind { Nonneg, SecondOrder, PsdVec };

/// One factor of a direct product of symmetric cones. For PsdVec blocks
/// `order` is the matrix order m and `dim` the svec length m(m+1)/2.
struct Block {
  BlockKind kind;
  int dim;
  int order = 0;
};

/// Direct product of nonnegative-orthant, second-order and vectorized-PSD
/// blocks with a global coordinate indexing scheme. Coordinates of block h
/// start at offset(h); within a PsdVec block the svec position of matrix
/// entry (i,j), i <= j (0-based), is j(j+1)/2 + i.
class ConeSpec {
 public:
  ConeSpec() = default;
  explicit ConeSpec(std::vector<Block> blocks);

  static ConeSpec nonneg(int n);
  static ConeSpec second_order(int n);
  static ConeSpec psd(int order);

  const std::vector<Block>& blocks() const { return blocks_; }
  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int ambient_dim() const { return ambient_dim_; }
  int rank() const { return rank_; }
  int block_offset(int h) const { return offsets_[h]; }
  const Block& block(int h) const { return blocks_[h]; }

  /// Global coordinates of block h.
  std::vector<int> block_indices(int h) const;
  /// Second-order block coordinates minus the leading one.
  std::vector<int> soc_tail_indices(int h) const;
  /// Nonneg coordinates, second-order leading coordinates and PsdVec
  /// diagonal coordinates.
  const std::vector<int>& nonneg_like_indices() const { return nonneg_like_; }

  bool has_psd_block() const;
  bool pure_nonneg() const;

  /// svec coordinate of PsdVec entry (i,j) within block h, 0-based.
  int psd_entry_index(int h, int i, int j) const;

 private:
  std::vector<Block> blocks_;
  std::vector<int> offsets_;
  std::vector<int> nonneg_like_;
  int ambient_dim_ = 0;
  int rank_ = 0;
};

}  // namespace gdnn
