#pragma once

#include <cstddef>

#include "steerfid/qcore.hpp"
#include "steerfid/rng.hpp"

namespace steerfid {

// Complex Ginibre matrix with i.i.d. standard complex normal entries.
Matrix ginibre(std::size_t rows, std::size_t cols, CounterRng& rng);
// Haar-random isometry (rows >= cols) via QR of a Ginibre matrix with phase fix.
Matrix random_isometry(std::size_t rows, std::size_t cols, CounterRng& rng);
Matrix random_unitary(std::size_t d, CounterRng& rng);
PureState random_pure_state(const Layout& layout, CounterRng& rng);
// Induced-measure random state of the given rank (0 = full rank).
DensityMatrix random_density_matrix(const Layout& layout, CounterRng& rng, std::size_t rank = 0);

}  // namespace steerfid
