#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace gdnn {

enum class VarKind { Psd, Soc, Nonneg, Free };

/// One variable block. size is the matrix order for Psd blocks and the
/// vector dimension otherwise.
struct VarBlock {
  VarKind kind;
  int size;
};

struct MatEntry {
  int row, col;  // row <= col; value applies symmetrically
  double value;
};

struct VecEntry {
  int index;
  double value;
};

/// Sparse linear functional on the block structure. For Psd blocks the
/// induced symmetric matrix A has A(row,col) = A(col,row) = value, so
/// off-diagonal entries contribute twice to <A, X>.
struct BlockLinear {
  std::vector<std::vector<MatEntry>> mat;  // per block (Psd only)
  std::vector<std::vector<VecEntry>> vec;  // per block (vector kinds)

  explicit BlockLinear(int num_blocks = 0) : mat(num_blocks), vec(num_blocks) {}
};

/// min sum_b <C_b, X_b>  s.t.  sum_b <A_{i,b}, X_b> = rhs_i,  X_b in K_b.
/// Free blocks carry no cone constraint.
class BlockConicProgram {
 public:
  int add_psd_block(int order) { return add_block(VarKind::Psd, order); }
  int add_soc_block(int dim) { return add_block(VarKind::Soc, dim); }
  int add_nonneg_block(int dim) { return add_block(VarKind::Nonneg, dim); }
  int add_free_block(int dim) { return add_block(VarKind::Free, dim); }
  int add_block(VarKind kind, int size);

  int add_constraint(double rhs);

  void obj_mat(int block, int r, int c, double v);
  void obj_vec(int block, int i, double v);
  void con_mat(int con, int block, int r, int c, double v);
  void con_vec(int con, int block, int i, double v);

  int num_blocks() const { return static_cast<int>(blocks_.size()); }
  int num_constraints() const { return static_cast<int>(rhs_.size()); }
  const VarBlock& block(int b) const { return blocks_[b]; }
  const std::vector<VarBlock>& blocks() const { return blocks_; }
  const Eigen::VectorXd rhs() const {
    return Eigen::Map<const Eigen::VectorXd>(rhs_.data(),
                                             static_cast<long>(rhs_.size()));
  }
  const BlockLinear& objective() const { return objective_; }
  const BlockLinear& constraint(int i) const { return rows_[i]; }

  void validate() const;

 private:
  std::vector<VarBlock> blocks_;
  std::vector<double> rhs_;
  BlockLinear objective_;
  std::vector<BlockLinear> rows_;
};

/// Value of one variable block: mat for Psd blocks, vec otherwise.
struct BlockValue {
  Eigen::MatrixXd mat;
  Eigen::VectorXd vec;
};

enum class SolveStatus { Optimal, PrimalInfeasible, DualInfeasible, MaxIter, Numerical };

std::string to_string(SolveStatus s);

struct Solution {
  SolveStatus status = SolveStatus::Numerical;
  std::vector<BlockValue> primal;
  std::vector<BlockValue> dual_slack;
  Eigen::VectorXd dual;  // equality multipliers
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double gap = 0.0;         // relative duality gap
  double primal_res = 0.0;  // relative feasibility residuals
  double dual_res = 0.0;
  int iterations = 0;

  bool usable(double tol = 1e-6) const {
    return status == SolveStatus::Optimal ||
           (gap <= tol && primal_res <= tol && dual_res <= tol);
  }
};

double block_inner(const BlockLinear& f, const std::vector<BlockValue>& x,
                   const std::vector<VarBlock>& blocks);

}  // namespace gdnn
