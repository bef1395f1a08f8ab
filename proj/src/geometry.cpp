#include "occlab/geometry.hpp"

#include <algorithm>

#include "occlab/errors.hpp"
#include "occlab/occupancy.hpp"

namespace occlab {

namespace {

template <Scalar T>
bool in_characteristic_set(const Mdp<T>& model, std::span<const T> nu, const Tolerances<T>& tol)
{
    for (const auto& v : nu)
        if (v < T(0) && !near_zero(v, tol.support))
            return false;
    return near_zero(characteristic_residual(model, nu), tol.character);
}

template <Scalar T>
void require_measure(const Mdp<T>& model, std::span<const T> mu, const Tolerances<T>& tol)
{
    require_occupancy(model, mu, tol);
}

/// supp(nu) within supp(mu), comparing magnitudes against the support threshold.
template <Scalar T>
bool support_within(std::span<const T> nu, std::span<const T> mu, const T& threshold)
{
    for (std::size_t i = 0; i < nu.size(); ++i)
        if (abs_value(nu[i]) > threshold && !positive(mu[i], threshold))
            return false;
    return true;
}

}  // namespace

template <Scalar T>
bool face_membership(const Mdp<T>& model, std::span<const T> mu, std::span<const T> nu, const Tolerances<T>& tol)
{
    require_measure(model, mu, tol);
    if (nu.size() != mu.size())
        throw StructuralError("measure has wrong length");
    return in_characteristic_set(model, nu, tol) && support_within(nu, mu, tol.support);
}

template <Scalar T>
bool rai_membership(const Mdp<T>& model, std::span<const T> mu, std::span<const T> nu, const Tolerances<T>& tol)
{
    require_measure(model, mu, tol);
    if (nu.size() != mu.size())
        throw StructuralError("measure has wrong length");
    return in_characteristic_set(model, nu, tol) && support_within(nu, mu, tol.support) &&
           support_within(mu, nu, tol.support);
}

template <Scalar T>
bool affine_hull_membership(const Mdp<T>& model, std::span<const T> mu, std::span<const T> gamma,
                            const Tolerances<T>& tol)
{
    require_measure(model, mu, tol);
    if (gamma.size() != mu.size())
        throw StructuralError("measure has wrong length");
    std::vector<T> diff(mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        diff[i] = gamma[i] - mu[i];
    return near_zero(invariance_residual<T>(model, diff), tol.character) &&
           support_within<T>(diff, mu, tol.support);
}

template <Scalar T>
Matrix<T> characteristic_matrix(const Mdp<T>& model, std::span<const std::size_t> columns)
{
    const auto& pairs = model.pairs();
    auto ts = pairs.transient_states();
    auto tp = pairs.transient_pairs();
    Matrix<T> m(ts.size(), columns.size());
    for (std::size_t c = 0; c < columns.size(); ++c) {
        std::size_t pair = tp[columns[c]];
        const auto& row = model.transition_row(pair);
        for (std::size_t j = 0; j < ts.size(); ++j) {
            T entry = -row[ts[j]];
            if (pairs.state_of(pair) == ts[j])
                entry += T(1);
            m(j, c) = entry;
        }
    }
    return m;
}

template <Scalar T>
FaceDescriptor<T> parallel_subspace_basis(const Mdp<T>& model, std::span<const T> mu, const Tolerances<T>& tol)
{
    require_measure(model, mu, tol);
    FaceDescriptor<T> face;
    face.numerics = tol;
    face.support = support_of(mu, tol.support);
    if (face.support.empty())
        return face;  // mu = 0: the face is {0}
    auto local = null_space(characteristic_matrix(model, std::span<const std::size_t>(face.support)),
                            tol.rank_cutoff);
    for (const auto& v : local) {
        std::vector<T> full(mu.size(), T(0));
        for (std::size_t c = 0; c < face.support.size(); ++c)
            full[face.support[c]] = v[c];
        face.basis.push_back(std::move(full));
    }
    face.dimension = face.basis.size();
    return face;
}

template <Scalar T>
void attach_constrained_face(const Mdp<T>& model, std::span<const T> mu, FaceDescriptor<T>& face)
{
    ConstrainedFace<T> cf;
    cf.alpha = performance(model, mu);
    const std::size_t d = model.reward_dim();
    const std::size_t p = face.basis.size();
    if (p > 0) {
        Matrix<T> eval(d, p);
        T entry_floor(0);
        if constexpr (!is_exact_v<T>) {
            double scale = 1.0;
            for (auto pair : model.pairs().transient_pairs())
                scale = std::max(scale, max_abs<double>(model.reward(pair)));
            entry_floor = face.numerics.character * scale;
        }
        for (std::size_t j = 0; j < p; ++j) {
            auto r = performance<T>(model, face.basis[j]);
            for (std::size_t i = 0; i < d; ++i)
                eval(i, j) = near_zero(r[i], entry_floor) ? T(0) : r[i];
        }
        cf.image_dim = rank(eval, face.numerics.rank_cutoff);
        for (const auto& c : null_space(eval, face.numerics.rank_cutoff)) {
            std::vector<T> v(mu.size(), T(0));
            for (std::size_t j = 0; j < p; ++j)
                if (c[j] != T(0))
                    for (std::size_t i = 0; i < v.size(); ++i)
                        v[i] += c[j] * face.basis[j][i];
            cf.kernel_basis.push_back(std::move(v));
        }
        cf.kernel_dim = cf.kernel_basis.size();
    }
    face.constrained = std::move(cf);
}

template <Scalar T>
FaceDims constrained_face_dims(const Mdp<T>& model, std::span<const T> mu, const Tolerances<T>& tol)
{
    auto face = parallel_subspace_basis(model, mu, tol);
    attach_constrained_face(model, mu, face);
    return FaceDims{face.dimension, face.constrained->kernel_dim, face.constrained->image_dim};
}

template <Scalar T>
std::vector<std::vector<T>> occupancy_polytope_vertices(const Mdp<T>& model,
                                                        const std::optional<std::vector<std::size_t>>& support,
                                                        const std::optional<std::vector<T>>& alpha,
                                                        const PolytopeOptions& options, const Tolerances<T>& tol)
{
    const auto& pairs = model.pairs();
    auto ts = pairs.transient_states();
    auto tp = pairs.transient_pairs();
    std::vector<std::size_t> columns;
    if (support) {
        columns = *support;
    } else {
        columns.resize(tp.size());
        for (std::size_t i = 0; i < tp.size(); ++i)
            columns[i] = i;
    }
    if (alpha && alpha->size() != model.reward_dim())
        throw InvalidArgument("alpha has dimension " + std::to_string(alpha->size()) + ", expected " +
                              std::to_string(model.reward_dim()));

    Matrix<T> chars = characteristic_matrix(model, std::span<const std::size_t>(columns));
    const std::size_t extra = alpha ? model.reward_dim() : 0;
    Matrix<T> a(ts.size() + extra, columns.size());
    std::vector<T> b(ts.size() + extra, T(0));
    for (std::size_t j = 0; j < ts.size(); ++j) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            a(j, c) = chars(j, c);
        b[j] = model.initial()[ts[j]];
    }
    for (std::size_t i = 0; i < extra; ++i) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            a(ts.size() + i, c) = model.reward(tp[columns[c]])[i];
        b[ts.size() + i] = (*alpha)[i];
    }

    VertexEnumerationOptions<T> vopt;
    vopt.cap = options.cap;
    vopt.zero_tol = tol.character;
    vopt.rank_cutoff = tol.rank_cutoff;
    std::vector<std::vector<T>> out;
    if (columns.empty()) {
        // Only the zero measure is possible.
        for (const auto& v : b)
            if (!near_zero(v, tol.character))
                return out;
        out.emplace_back(tp.size(), T(0));
        return out;
    }
    for (auto& local : enumerate_vertices<T>(a, b, vopt)) {
        std::vector<T> full(tp.size(), T(0));
        for (std::size_t c = 0; c < columns.size(); ++c)
            full[columns[c]] = local[c];
        out.push_back(std::move(full));
    }
    return out;
}

template <Scalar T>
std::vector<std::vector<T>> face_vertices(const Mdp<T>& model, std::span<const T> mu, const PolytopeOptions& options,
                                          const Tolerances<T>& tol)
{
    require_measure(model, mu, tol);
    return occupancy_polytope_vertices<T>(model, support_of(mu, tol.support), std::nullopt, options, tol);
}

#define OCCLAB_INSTANTIATE(T)                                                                                   \
    template bool face_membership(const Mdp<T>&, std::span<const T>, std::span<const T>, const Tolerances<T>&); \
    template bool rai_membership(const Mdp<T>&, std::span<const T>, std::span<const T>, const Tolerances<T>&);  \
    template bool affine_hull_membership(const Mdp<T>&, std::span<const T>, std::span<const T>,                 \
                                         const Tolerances<T>&);                                                 \
    template Matrix<T> characteristic_matrix(const Mdp<T>&, std::span<const std::size_t>);                      \
    template FaceDescriptor<T> parallel_subspace_basis(const Mdp<T>&, std::span<const T>, const Tolerances<T>&);\
    template void attach_constrained_face(const Mdp<T>&, std::span<const T>, FaceDescriptor<T>&);               \
    template FaceDims constrained_face_dims(const Mdp<T>&, std::span<const T>, const Tolerances<T>&);           \
    template std::vector<std::vector<T>> occupancy_polytope_vertices(                                           \
        const Mdp<T>&, const std::optional<std::vector<std::size_t>>&, const std::optional<std::vector<T>>&,    \
        const PolytopeOptions&, const Tolerances<T>&);                                                          \
    template std::vector<std::vector<T>> face_vertices(const Mdp<T>&, std::span<const T>,                       \
                                                       const PolytopeOptions&, const Tolerances<T>&);

OCCLAB_INSTANTIATE(Rational)
OCCLAB_INSTANTIATE(double)

#undef OCCLAB_INSTANTIATE

}  // namespace occlab
