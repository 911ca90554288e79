#include "gdnn/conic_program.hpp"

#include <cmath>
#include <stdexcept>

namespace gdnn {

int BlockConicProgram::add_block(VarKind kind, int size) {
  if (size < 1) throw std::invalid_argument("block size must be positive");
  blocks_.push_back({kind, size});
  objective_.mat.emplace_back();
  objective_.vec.emplace_back();
  for (auto& r : rows_) {
    r.mat.emplace_back();
    r.vec.emplace_back();
  }
  return num_blocks() - 1;
}

int BlockConicProgram::add_constraint(double rhs) {
  if (!std::isfinite(rhs)) throw std::invalid_argument("rhs not finite");
  rhs_.push_back(rhs);
  rows_.emplace_back(num_blocks());
  return num_constraints() - 1;
}

namespace {

void add_mat_entry(BlockLinear& f, const VarBlock& blk, int block, int r,
                   int c, double v) {
  if (blk.kind != VarKind::Psd)
    throw std::invalid_argument("matrix entry on non-psd block");
  if (r < 0 || c < 0 || r >= blk.size || c >= blk.size)
    throw std::out_of_range("matrix entry out of range");
  if (r > c) std::swap(r, c);
  f.mat[block].push_back({r, c, v});
}

void add_vec_entry(BlockLinear& f, const VarBlock& blk, int block, int i,
                   double v) {
  if (blk.kind == VarKind::Psd)
    throw std::invalid_argument("vector entry on psd block");
  if (i < 0 || i >= blk.size) throw std::out_of_range("vector entry out of range");
  f.vec[block].push_back({i, v});
}

}  // namespace

void BlockConicProgram::obj_mat(int block, int r, int c, double v) {
  add_mat_entry(objective_, blocks_.at(block), block, r, c, v);
}

void BlockConicProgram::obj_vec(int block, int i, double v) {
  add_vec_entry(objective_, blocks_.at(block), block, i, v);
}

void BlockConicProgram::con_mat(int con, int block, int r, int c, double v) {
  add_mat_entry(rows_.at(con), blocks_.at(block), block, r, c, v);
}

void BlockConicProgram::con_vec(int con, int block, int i, double v) {
  add_vec_entry(rows_.at(con), blocks_.at(block), block, i, v);
}

void BlockConicProgram::validate() const {
  if (blocks_.empty()) throw std::invalid_argument("program has no blocks");
  for (const auto& row : rows_) {
    if (static_cast<int>(row.mat.size()) != num_blocks() ||
        static_cast<int>(row.vec.size()) != num_blocks())
      throw std::logic_error("constraint block structure inconsistent");
  }
}

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal_infeasible";
    case SolveStatus::DualInfeasible: return "dual_infeasible";
    case SolveStatus::MaxIter: return "max_iter";
    case SolveStatus::Numerical: return "numerical";
  }
  return "unknown";
}

double block_inner(const BlockLinear& f, const std::vector<BlockValue>& x,
                   const std::vector<VarBlock>& blocks) {
  double v = 0.0;
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (blocks[b].kind == VarKind::Psd) {
      for (const auto& e : f.mat[b]) {
        double w = (e.row == e.col) ? 1.0 : 2.0;
        v += w * e.value * x[b].mat(e.row, e.col);
      }
    } else {
      for (const auto& e : f.vec[b]) v += e.value * x[b].vec[e.index];
    }
  }
  return v;
}

}  // namespace gdnn
