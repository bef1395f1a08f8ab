/**
 * Vertex enumeration for polytopes in standard form {x >= 0 : A x = b}.
 *
 * The affine solution set is parametrized as x = x0 + N t (N a null-space
 * basis of A), which turns nonnegativity into the inequality system
 * x0 + N t >= 0 in t-space. Its vertices are the extreme rays with positive
 * homogenizing coordinate of the cone {(s, t) : s x0 + N t >= 0, s >= 0},
 * computed with the double description method (incremental constraint
 * insertion, combinatorial adjacency test).
 */
#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "occlab/matrix.hpp"

namespace occlab {

template <Scalar T>
struct VertexEnumerationOptions {
    std::size_t cap = 100'000;  // max intermediate rays / vertices
    T zero_tol{};               // sign threshold (0 in exact mode)
    double rank_cutoff = 1e-8;
};

/**
 * Vertices of {x >= 0 : a x = b}, deduplicated and sorted lexicographically.
 * Empty when the polytope is empty. Throws CapExceededError above the cap and
 * NumericError when the set is unbounded.
 */
template <Scalar T>
std::vector<std::vector<T>> enumerate_vertices(const Matrix<T>& a, std::span<const T> b,
                                               const VertexEnumerationOptions<T>& options);

/// Affine dimension of a finite point set (-1 for the empty set).
template <Scalar T>
long affine_dimension(const std::vector<std::vector<T>>& points, double rank_cutoff);

}  // namespace occlab
