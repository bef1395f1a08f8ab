/**
 * Faces of the occupancy polytope and their parallel subspaces.
 *
 * For finitely many pairs, "nu <= c mu for some c" holds exactly when
 * supp(nu) is contained in supp(mu) (take c = max nu/mu over the support),
 * and the two-sided bound (1/c) mu <= nu <= c mu holds exactly when the
 * supports coincide. Hence:
 *
 *   face F(mu)     = { nu in C : nu >= 0, supp nu within supp mu }
 *   rai F(mu)      = { nu in C : nu >= 0, supp nu == supp mu }
 *   V(mu)          = { nu : nu^X = nu Q 1_{transient}, supp nu within supp mu }
 *   aff F(mu)      = mu + V(mu)
 *   V_alpha(mu)    = { nu in V(mu) : nu(r) = 0 }
 *
 * Supports are decided with tol.support.
 */
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "occlab/model.hpp"
#include "occlab/numeric.hpp"
#include "occlab/vertex_enumeration.hpp"

namespace occlab {

template <Scalar T>
struct ConstrainedFace {
    std::vector<T> alpha;                    // mu(r)
    std::size_t kernel_dim = 0;              // dim V_alpha(mu) = dim ker R_mu
    std::size_t image_dim = 0;               // dim im R_mu
    std::vector<std::vector<T>> kernel_basis;  // basis of V_alpha(mu), over transient pairs
};

template <Scalar T>
struct FaceDescriptor {
    std::vector<std::size_t> support;          // transient pair positions
    std::size_t dimension = 0;                 // dim V(mu) = dim F(mu)
    std::vector<std::vector<T>> basis;         // signed invariant vectors over transient pairs
    std::optional<ConstrainedFace<T>> constrained;
    std::optional<std::vector<std::vector<T>>> vertices;
    Tolerances<T> numerics;
};

template <Scalar T>
bool face_membership(const Mdp<T>& model, std::span<const T> mu, std::span<const T> nu,
                     const Tolerances<T>& tol = Tolerances<T>::defaults());

template <Scalar T>
bool rai_membership(const Mdp<T>& model, std::span<const T> mu, std::span<const T> nu,
                    const Tolerances<T>& tol = Tolerances<T>::defaults());

/// True iff gamma - mu is invariant and supported within supp(mu).
template <Scalar T>
bool affine_hull_membership(const Mdp<T>& model, std::span<const T> mu, std::span<const T> gamma,
                            const Tolerances<T>& tol = Tolerances<T>::defaults());

/**
 * Basis of V(mu): null space of nu -> nu^X - nu Q 1_{transient} on the
 * coordinates supp(mu). Rejects mu outside the characteristic set.
 */
template <Scalar T>
FaceDescriptor<T> parallel_subspace_basis(const Mdp<T>& model, std::span<const T> mu,
                                          const Tolerances<T>& tol = Tolerances<T>::defaults());

struct FaceDims {
    std::size_t subspace = 0;     // dim V(mu)
    std::size_t constrained = 0;  // dim V_alpha(mu)
    std::size_t image = 0;        // dim im R_mu

    bool operator==(const FaceDims&) const = default;
};

/// Adds the evaluation map nu -> nu(r) on V(mu) to a descriptor.
template <Scalar T>
void attach_constrained_face(const Mdp<T>& model, std::span<const T> mu, FaceDescriptor<T>& face);

template <Scalar T>
FaceDims constrained_face_dims(const Mdp<T>& model, std::span<const T> mu,
                               const Tolerances<T>& tol = Tolerances<T>::defaults());

/// Rows: characteristic equations over transient pairs (restricted to `columns`).
template <Scalar T>
Matrix<T> characteristic_matrix(const Mdp<T>& model, std::span<const std::size_t> columns);

struct PolytopeOptions {
    std::size_t cap = 100'000;
};

/**
 * Vertices of { nu >= 0 : nu in C, supp nu within `support`, nu(r) = alpha },
 * as full-length vectors over transient pairs. `support` empty-optional
 * means all transient pairs; `alpha` empty-optional drops the reward rows.
 */
template <Scalar T>
std::vector<std::vector<T>> occupancy_polytope_vertices(const Mdp<T>& model,
                                                        const std::optional<std::vector<std::size_t>>& support,
                                                        const std::optional<std::vector<T>>& alpha,
                                                        const PolytopeOptions& options = {},
                                                        const Tolerances<T>& tol = Tolerances<T>::defaults());

/// Vertices of F(mu).
template <Scalar T>
std::vector<std::vector<T>> face_vertices(const Mdp<T>& model, std::span<const T> mu,
                                          const PolytopeOptions& options = {},
                                          const Tolerances<T>& tol = Tolerances<T>::defaults());

}  // namespace occlab
