#include "occlab/vertex_enumeration.hpp"

#include <algorithm>

#include <boost/dynamic_bitset.hpp>

#include "occlab/errors.hpp"

namespace occlab {

namespace {

template <Scalar T>
struct Ray {
    std::vector<T> coords;
    boost::dynamic_bitset<> zeros;  // processed constraint rows active at this ray
};

template <Scalar T>
void normalize(std::vector<T>& v)
{
    T scale = max_abs<T>(v);
    if (scale == T(0))
        return;
    for (auto& c : v)
        c /= scale;
}

template <Scalar T>
bool lex_less(const std::vector<T>& a, const std::vector<T>& b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

template <Scalar T>
std::vector<std::vector<T>> enumerate_vertices(const Matrix<T>& a, std::span<const T> b,
                                               const VertexEnumerationOptions<T>& options)
{
    const std::size_t n = a.cols();
    const T& tol = options.zero_tol;
    std::vector<std::vector<T>> vertices;

    T solve_tol = tol;
    if constexpr (!is_exact_v<T>)
        solve_tol = std::max(tol, 1e-9);
    auto x0 = particular_solution<T>(a, b, solve_tol);
    if (!x0)
        return vertices;
    auto basis = null_space<T>(a, options.rank_cutoff);
    const std::size_t k = basis.size();

    if (k == 0) {
        for (const auto& v : *x0)
            if (v < T(0) && !near_zero(v, tol))
                return vertices;
        std::vector<T> x = *x0;
        for (auto& v : x)
            if (v < T(0))
                v = T(0);
        vertices.push_back(std::move(x));
        return vertices;
    }

    // Constraint rows g_i . (s, t) >= 0: one per variable, plus s >= 0 last.
    const std::size_t m = n + 1;
    const std::size_t dim = k + 1;
    Matrix<T> g(m, dim);
    for (std::size_t i = 0; i < n; ++i) {
        g(i, 0) = (*x0)[i];
        for (std::size_t j = 0; j < k; ++j)
            g(i, j + 1) = basis[j][i];
    }
    g(n, 0) = T(1);

    std::vector<T> row_scale(m, T(1));
    if constexpr (!is_exact_v<T>)
        for (std::size_t i = 0; i < m; ++i)
            row_scale[i] = std::max(1.0, max_abs<double>(g.row(i)));
    auto evaluate = [&](std::size_t i, const std::vector<T>& y) { return dot<T>(g.row(i), y); };
    auto sign_of = [&](std::size_t i, const T& value) -> int {
        if (near_zero(value, T(tol * row_scale[i])))
            return 0;
        return value > T(0) ? 1 : -1;
    };

    // Initial simplicial cone from dim linearly independent rows, homogenizing row first.
    std::vector<std::size_t> chosen;
    std::vector<bool> used(m, false);
    std::vector<std::size_t> order;
    order.push_back(n);
    for (std::size_t i = 0; i < n; ++i)
        order.push_back(i);
    for (auto i : order) {
        if (chosen.size() == dim)
            break;
        chosen.push_back(i);
        Matrix<T> sub(chosen.size(), dim);
        for (std::size_t r = 0; r < chosen.size(); ++r)
            for (std::size_t c = 0; c < dim; ++c)
                sub(r, c) = g(chosen[r], c);
        if (rank(sub, options.rank_cutoff) < chosen.size())
            chosen.pop_back();
    }
    if (chosen.size() != dim)
        throw NumericError("vertex enumeration: constraint system is not full rank");
    Matrix<T> gb(dim, dim);
    for (std::size_t r = 0; r < dim; ++r) {
        used[chosen[r]] = true;
        for (std::size_t c = 0; c < dim; ++c)
            gb(r, c) = g(chosen[r], c);
    }
    std::vector<Ray<T>> rays;
    for (std::size_t j = 0; j < dim; ++j) {
        std::vector<T> unit(dim, T(0));
        unit[j] = T(1);
        auto col = solve_square<T>(gb, unit);
        if (!col)
            throw NumericError("vertex enumeration: singular initial basis");
        Ray<T> ray{std::move(*col), boost::dynamic_bitset<>(m)};
        normalize(ray.coords);
        for (std::size_t r = 0; r < dim; ++r)
            if (r != j)
                ray.zeros.set(chosen[r]);
        rays.push_back(std::move(ray));
    }

    for (std::size_t i = 0; i < m; ++i) {
        if (used[i])
            continue;
        std::vector<T> values(rays.size());
        std::vector<int> signs(rays.size());
        for (std::size_t r = 0; r < rays.size(); ++r) {
            values[r] = evaluate(i, rays[r].coords);
            signs[r] = sign_of(i, values[r]);
        }
        std::vector<Ray<T>> next;
        for (std::size_t p = 0; p < rays.size(); ++p) {
            if (signs[p] <= 0)
                continue;
            for (std::size_t q = 0; q < rays.size(); ++q) {
                if (signs[q] >= 0)
                    continue;
                auto common = rays[p].zeros & rays[q].zeros;
                if (common.count() + 2 < dim)
                    continue;
                bool adjacent = true;
                for (std::size_t r = 0; r < rays.size() && adjacent; ++r)
                    if (r != p && r != q && common.is_subset_of(rays[r].zeros))
                        adjacent = false;
                if (!adjacent)
                    continue;
                Ray<T> fresh{std::vector<T>(dim), common};
                T wp = values[p];
                T wq = T(-values[q]);
                for (std::size_t c = 0; c < dim; ++c)
                    fresh.coords[c] = wp * rays[q].coords[c] + wq * rays[p].coords[c];
                normalize(fresh.coords);
                fresh.zeros.set(i);
                next.push_back(std::move(fresh));
                if (next.size() > options.cap)
                    throw CapExceededError("vertex enumeration exceeded the cap of " +
                                           std::to_string(options.cap) + " rays");
            }
        }
        for (std::size_t r = 0; r < rays.size(); ++r) {
            if (signs[r] < 0)
                continue;
            if (signs[r] == 0)
                rays[r].zeros.set(i);
            next.push_back(std::move(rays[r]));
        }
        if (next.size() > options.cap)
            throw CapExceededError("vertex enumeration exceeded the cap of " + std::to_string(options.cap) +
                                   " rays");
        rays = std::move(next);
        used[i] = true;
    }

    bool recession = false;
    for (const auto& ray : rays) {
        if (sign_of(n, ray.coords[0]) <= 0) {
            recession = true;
            continue;
        }
        std::vector<T> x = *x0;
        for (std::size_t j = 0; j < k; ++j) {
            T t = ray.coords[j + 1] / ray.coords[0];
            if (t == T(0))
                continue;
            for (std::size_t v = 0; v < n; ++v)
                x[v] += t * basis[j][v];
        }
        for (auto& v : x)
            if (v < T(0) || near_zero(v, tol))
                v = T(0);
        vertices.push_back(std::move(x));
    }
    if (recession && !vertices.empty())
        throw NumericError("vertex enumeration: polytope is unbounded");

    T dedup_tol = tol;
    if constexpr (!is_exact_v<T>)
        dedup_tol = std::max(tol, 1e-9);
    std::vector<std::vector<T>> unique;
    for (auto& v : vertices) {
        bool seen = std::any_of(unique.begin(), unique.end(), [&](const std::vector<T>& u) {
            for (std::size_t c = 0; c < n; ++c)
                if (!near_zero(T(v[c] - u[c]), dedup_tol))
                    return false;
            return true;
        });
        if (!seen)
            unique.push_back(std::move(v));
    }
    std::sort(unique.begin(), unique.end(), lex_less<T>);
    if (unique.size() > options.cap)
        throw CapExceededError("vertex count exceeds the cap of " + std::to_string(options.cap));
    return unique;
}

template <Scalar T>
long affine_dimension(const std::vector<std::vector<T>>& points, double rank_cutoff)
{
    if (points.empty())
        return -1;
    if (points.size() == 1)
        return 0;
    const std::size_t dim = points.front().size();
    Matrix<T> diffs(points.size() - 1, dim);
    for (std::size_t i = 1; i < points.size(); ++i)
        for (std::size_t c = 0; c < dim; ++c)
            diffs(i - 1, c) = points[i][c] - points[0][c];
    return static_cast<long>(rank(diffs, rank_cutoff));
}

#define OCCLAB_INSTANTIATE(T)                                                                              \
    template std::vector<std::vector<T>> enumerate_vertices(const Matrix<T>&, std::span<const T>,         \
                                                            const VertexEnumerationOptions<T>&);          \
    template long affine_dimension(const std::vector<std::vector<T>>&, double);

OCCLAB_INSTANTIATE(Rational)
OCCLAB_INSTANTIATE(double)

#undef OCCLAB_INSTANTIATE

}  // namespace occlab
