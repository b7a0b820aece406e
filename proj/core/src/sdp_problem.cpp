#include <iomanip>

#include "steerfid/errors.hpp"
#include "steerfid/sdp.hpp"

namespace steerfid {

std::size_t SdpProblem::add_block(std::string name, std::size_t dim) {
  if (dim == 0) throw ShapeError("SDP block " + name + " has dimension 0");
  block_names.push_back(std::move(name));
  block_dims.push_back(dim);
  return block_dims.size() - 1;
}

std::size_t SdpProblem::total_dim() const {
  std::size_t n = 0;
  for (auto d : block_dims) n += d;
  return n;
}

void SdpProblem::validate() const {
  if (block_names.size() != block_dims.size()) throw ShapeError("SDP: block name/dimension count mismatch");
  if (constraints.size() != rhs.size()) throw ShapeError("SDP: constraint/rhs count mismatch");
  const auto check = [&](const SparseSym& m, const std::string& what) {
    for (const auto& e : m) {
      if (e.block >= block_dims.size()) throw ShapeError("SDP: " + what + " addresses a missing block");
      if (e.row > e.col || e.col >= block_dims[e.block]) throw ShapeError("SDP: " + what + " entry out of range");
    }
  };
  check(objective, "objective");
  for (std::size_t i = 0; i < constraints.size(); ++i) check(constraints[i], "constraint " + std::to_string(i));
}

const char* to_string(SdpStatus status) {
  switch (status) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::max_iter: return "max_iter";
    case SdpStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

void write_sdpa(const SdpProblem& problem, std::ostream& out) {
  problem.validate();
  out << std::setprecision(17);
  out << "\"steerfid SDP: (D) min b'y s.t. sum y_i A_i - C >= 0\"\n";
  out << problem.constraints.size() << " = mDIM\n";
  out << problem.block_dims.size() << " = nBLOCK\n";
  for (std::size_t b = 0; b < problem.block_dims.size(); ++b) out << (b ? " " : "") << problem.block_dims[b];
  out << " = bLOCKsTRUCT\n";
  for (std::size_t i = 0; i < problem.rhs.size(); ++i) out << (i ? " " : "") << problem.rhs[i];
  out << "\n";
  const auto emit = [&](std::size_t mat, const SparseSym& m) {
    for (const auto& e : m) {
      out << mat << ' ' << e.block + 1 << ' ' << e.row + 1 << ' ' << e.col + 1 << ' ' << e.value << '\n';
    }
  };
  emit(0, problem.objective);
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) emit(i + 1, problem.constraints[i]);
}

}  // namespace steerfid
