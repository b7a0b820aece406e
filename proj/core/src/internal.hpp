#pragma once

// Helpers shared by the steering and oracle sources.

#include <set>
#include <string>
#include <vector>

#include "steerfid/errors.hpp"
#include "steerfid/qcore.hpp"

namespace steerfid::detail {

inline std::string free_label(const Layout& layout, const std::string& base) {
  if (!layout.contains(base)) return base;
  for (int i = 0;; ++i) {
    const std::string candidate = base + "_" + std::to_string(i);
    if (!layout.contains(candidate)) return candidate;
  }
}

inline Labels flatten(const std::vector<Labels>& partitions) {
  Labels out;
  for (const auto& p : partitions) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// rho with subsystems reordered to follow the partitions; checks coverage.
inline DensityMatrix ordered_state(const DensityMatrix& rho, const std::vector<Labels>& partitions) {
  if (partitions.size() < 2) throw ConfigError("at least two partitions are required");
  const Labels order = flatten(partitions);
  std::set<std::string> seen;
  for (const auto& p : partitions) {
    if (p.empty()) throw ConfigError("empty partition");
    for (const auto& l : p) {
      if (!rho.layout().contains(l)) throw AddressingError("partition label " + l + " is not in " + rho.layout().to_string());
      if (!seen.insert(l).second) throw ConfigError("label " + l + " appears in two partitions");
    }
  }
  if (seen.size() != rho.layout().size()) throw ConfigError("partitions must cover every subsystem of the state");
  return {permute_subsystems(rho.matrix(), rho.layout(), order), rho.layout().reordered(order)};
}

// Amplitudes of a purification on [R, rest] as a dim_r x dim_rest matrix.
inline Matrix as_matrix(const PureState& psi, std::size_t dim_r) {
  const auto dr = static_cast<Eigen::Index>(dim_r);
  const auto rest = static_cast<Eigen::Index>(psi.dim() / dim_r);
  Matrix m(dr, rest);
  for (Eigen::Index r = 0; r < dr; ++r) m.row(r) = psi.amplitudes().segment(r * rest, rest).transpose();
  return m;
}

}  // namespace steerfid::detail
