#pragma once

// Block-diagonal real semidefinite programs and a dense primal-dual
// interior-point solver.
//
//   (P)  maximize <C, X>  s.t.  <A_i, X> = b_i,  X >= 0
//   (D)  minimize b'y     s.t.  Z = sum_i y_i A_i - C >= 0
//
// (D) is the SDPA primal, so write_sdpa() emits the problem in that layout.
// Complex Hermitian LMIs are built with LmiBuilder, which realifies them.

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "steerfid/qcore.hpp"

namespace steerfid {

// One entry of a symmetric block matrix; only row <= col is stored and an
// off-diagonal entry stands for both (row, col) and (col, row).
struct SymEntry {
  std::uint32_t block = 0;
  std::uint32_t row = 0;
  std::uint32_t col = 0;
  double value = 0.0;
};

using SparseSym = std::vector<SymEntry>;

struct SdpProblem {
  std::vector<std::string> block_names;
  std::vector<std::size_t> block_dims;
  SparseSym objective;                 // C
  std::vector<SparseSym> constraints;  // A_i
  std::vector<double> rhs;             // b

  std::size_t add_block(std::string name, std::size_t dim);
  [[nodiscard]] std::size_t total_dim() const;
  // Throws ShapeError when an entry addresses a missing block or position.
  void validate() const;
};

enum class SdpStatus { optimal, max_iter, numerical_failure };

[[nodiscard]] const char* to_string(SdpStatus status);

struct SdpResiduals {
  double primal = 0.0;  // ||b - A(X)|| / (1 + ||b||)
  double dual = 0.0;    // ||C + Z - sum y A|| / (1 + ||C||)
  double gap = 0.0;     // |<C,X> - b'y| / (1 + |<C,X>| + |b'y|)
};

struct SdpSolution {
  double primal_value = 0.0;  // <C, X>
  double dual_value = 0.0;    // b'y
  std::vector<Eigen::MatrixXd> x;
  std::vector<Eigen::MatrixXd> z;
  std::vector<double> y;
  SdpResiduals residuals;
  SdpStatus status = SdpStatus::numerical_failure;
  std::size_t iterations = 0;
};

struct SdpOptions {
  double gap_tol = 1e-8;
  double feas_tol = 1e-8;
  std::size_t max_iter = 200;
  // Largest accepted sum of block dimensions (real).
  std::size_t max_total_dim = 1024;
};

SdpSolution solve(const SdpProblem& problem, const SdpOptions& options = {});

// Plain-text SDPA sparse format (1-based; matrix 0 is C).
void write_sdpa(const SdpProblem& problem, std::ostream& out);

// Builder for complex Hermitian LMIs over real parameters p:
//
//   maximize  c'p + c0   s.t.  F_b(p) = F_b0 + sum_j p_j F_bj >= 0  for every block b,
//                               E p = f.
//
// Equalities are eliminated before solving; blocks are realified as
// [[Re, -Im], [Im, Re]].
class LmiBuilder {
 public:
  // Parameter index -1 addresses the constant term.
  static constexpr int kConstant = -1;

  std::size_t add_block(std::string name, std::size_t complex_dim);
  int add_param();
  int add_params(std::size_t count);
  [[nodiscard]] std::size_t num_params() const { return num_params_; }
  [[nodiscard]] std::size_t num_blocks() const { return blocks_.size(); }
  [[nodiscard]] std::size_t complex_dim_sum() const;

  // Adds value at (row, col) of block; callers add the Hermitian mirror
  // themselves (add_hermitian does both).
  void add_entry(int param, std::size_t block, std::size_t row, std::size_t col, cplx value);
  void add_hermitian(int param, std::size_t block, std::size_t row, std::size_t col, cplx value);
  void add_objective(int param, double coefficient);
  void add_equality(const std::vector<std::pair<int, double>>& terms, double rhs);

  struct Result {
    double value = 0.0;  // optimum of c'p + c0
    std::vector<double> params;
    SdpSolution solution;
  };

  [[nodiscard]] Result solve(const SdpOptions& options = {}) const;
  // The realified problem after equality elimination (free parameters only).
  [[nodiscard]] SdpProblem realified() const;

 private:
  using Key = std::tuple<std::size_t, std::size_t, std::size_t>;  // block, row, col
  using Operator = std::map<Key, cplx>;

  struct Reduced {
    std::vector<Operator> ops;      // per free parameter
    Operator constant;
    std::vector<double> objective;  // per free parameter
    double objective_constant = 0.0;
    std::vector<int> free_params;   // original index of each free parameter
    // Original parameter p = offset + sum_k coeffs[k] * free_k for pivots.
    std::map<int, std::pair<double, std::map<int, double>>> pivots;
  };

  [[nodiscard]] Reduced reduce() const;
  [[nodiscard]] SdpProblem to_problem(const Reduced& r) const;

  std::vector<std::pair<std::string, std::size_t>> blocks_;
  std::size_t num_params_ = 0;
  std::vector<Operator> ops_;
  Operator constant_;
  std::map<int, double> objective_;
  std::vector<std::pair<std::map<int, double>, double>> equalities_;
};

}  // namespace steerfid
