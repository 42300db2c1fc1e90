#pragma once

// Long double versions of the dipole solve, the energy pairing and the
// pointwise Laplacian. Used where conductances span many binades and the
// double results cancel.

#include <Eigen/Dense>

#include <vector>

#include "netlap/network.hpp"

namespace netlap::detail {

using RealX = long double;
using MatrixX = Eigen::Matrix<RealX, Eigen::Dynamic, Eigen::Dynamic>;
using VectorX = Eigen::Matrix<RealX, Eigen::Dynamic, 1>;

/// Columns are v_x for x in `index_set`, zero at the origin. F is assumed valid.
MatrixX extended_dipoles(const ResistanceNetwork& net, Index origin, const std::vector<Index>& index_set);

/// [E(a_i, b_j)] summed over edges.
MatrixX extended_pairing(const ResistanceNetwork& net, const MatrixX& a, const MatrixX& b);

/// Δ applied column by column.
MatrixX extended_laplacian(const ResistanceNetwork& net, const MatrixX& a);

}  // namespace netlap::detail
