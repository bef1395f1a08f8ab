#include "occlab/matrix.hpp"

#include <algorithm>
#include <utility>

#include <Eigen/Dense>

namespace occlab {

template <Scalar T>
void Matrix<T>::swap_rows(std::size_t a, std::size_t b)
{
    if (a == b)
        return;
    for (std::size_t j = 0; j < cols_; ++j)
        std::swap((*this)(a, j), (*this)(b, j));
}

template <Scalar T>
Matrix<T> Matrix<T>::select_columns(std::span<const std::size_t> columns) const
{
    Matrix out(rows_, columns.size());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < columns.size(); ++j)
            out(i, j) = (*this)(i, columns[j]);
    return out;
}

template <Scalar T>
Echelon<T> row_reduce(Matrix<T> m, const T& pivot_tol)
{
    Echelon<T> out;
    std::size_t lead_row = 0;
    for (std::size_t col = 0; col < m.cols() && lead_row < m.rows(); ++col) {
        std::size_t best = m.rows();
        T best_mag(0);
        for (std::size_t i = lead_row; i < m.rows(); ++i) {
            T mag = abs_value(m(i, col));
            if (mag <= pivot_tol)
                continue;
            if (best == m.rows() || mag > best_mag) {
                best = i;
                best_mag = mag;
                if constexpr (is_exact_v<T>)
                    break;
            }
        }
        if (best == m.rows()) {
            for (std::size_t i = lead_row; i < m.rows(); ++i)
                m(i, col) = T(0);
            continue;
        }
        m.swap_rows(lead_row, best);
        T inv = T(1) / m(lead_row, col);
        for (std::size_t j = col; j < m.cols(); ++j)
            m(lead_row, j) *= inv;
        m(lead_row, col) = T(1);
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == lead_row)
                continue;
            T factor = m(i, col);
            if (factor == T(0))
                continue;
            for (std::size_t j = col; j < m.cols(); ++j)
                m(i, j) -= factor * m(lead_row, j);
            m(i, col) = T(0);
        }
        out.pivots.push_back(col);
        ++lead_row;
    }
    out.reduced = std::move(m);
    return out;
}

namespace {

Eigen::MatrixXd to_eigen(const Matrix<double>& m)
{
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(i, j) = m(i, j);
    return out;
}

struct SvdRank {
    std::size_t rank = 0;
    Eigen::MatrixXd v;
};

SvdRank svd_rank(const Matrix<double>& m, double cutoff)
{
    SvdRank out;
    if (m.cols() == 0)
        return out;
    if (m.rows() == 0) {
        out.v = Eigen::MatrixXd::Identity(m.cols(), m.cols());
        return out;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(m), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double largest = sv.size() > 0 ? sv(0) : 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (largest > 0 && sv(i) > cutoff * largest)
            ++out.rank;
    out.v = svd.matrixV();
    return out;
}

}  // namespace

template <Scalar T>
std::size_t rank(const Matrix<T>& m, double rank_cutoff)
{
    if constexpr (is_exact_v<T>) {
        return row_reduce(m, T(0)).pivots.size();
    } else {
        return svd_rank(m, rank_cutoff).rank;
    }
}

template <Scalar T>
std::vector<std::vector<T>> null_space(const Matrix<T>& m, double rank_cutoff)
{
    std::vector<std::vector<T>> basis;
    if constexpr (is_exact_v<T>) {
        auto ech = row_reduce(m, T(0));
        std::vector<bool> is_pivot(m.cols(), false);
        for (auto p : ech.pivots)
            is_pivot[p] = true;
        for (std::size_t free = 0; free < m.cols(); ++free) {
            if (is_pivot[free])
                continue;
            std::vector<T> v(m.cols(), T(0));
            v[free] = T(1);
            for (std::size_t r = 0; r < ech.pivots.size(); ++r)
                v[ech.pivots[r]] = -ech.reduced(r, free);
            basis.push_back(std::move(v));
        }
    } else {
        auto svd = svd_rank(m, rank_cutoff);
        for (Eigen::Index j = static_cast<Eigen::Index>(svd.rank); j < svd.v.cols(); ++j) {
            std::vector<double> v(m.cols());
            for (std::size_t i = 0; i < m.cols(); ++i)
                v[i] = svd.v(static_cast<Eigen::Index>(i), j);
            basis.push_back(std::move(v));
        }
    }
    return basis;
}

template <Scalar T>
std::optional<std::vector<T>> solve_square(const Matrix<T>& a, std::span<const T> b)
{
    const std::size_t n = a.rows();
    if constexpr (is_exact_v<T>) {
        Matrix<T> aug(n, n + 1);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j)
                aug(i, j) = a(i, j);
            aug(i, n) = b[i];
        }
        auto ech = row_reduce(std::move(aug), T(0));
        if (ech.pivots.size() != n || (n > 0 && ech.pivots.back() != n - 1))
            return std::nullopt;
        std::vector<T> x(n);
        for (std::size_t i = 0; i < n; ++i)
            x[i] = ech.reduced(i, n);
        return x;
    } else {
        Eigen::MatrixXd ea = to_eigen(a);
        Eigen::VectorXd eb(n);
        for (std::size_t i = 0; i < n; ++i)
            eb(i) = b[i];
        Eigen::FullPivLU<Eigen::MatrixXd> lu(ea);
        if (!lu.isInvertible())
            return std::nullopt;
        Eigen::VectorXd ex = lu.solve(eb);
        return std::vector<double>(ex.data(), ex.data() + n);
    }
}

template <Scalar T>
std::optional<std::vector<T>> particular_solution(const Matrix<T>& a, std::span<const T> b,
                                                  const T& tol)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    Matrix<T> aug(m, n + 1);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j)
            aug(i, j) = a(i, j);
        aug(i, n) = b[i];
    }
    T pivot_tol(0);
    if constexpr (!is_exact_v<T>) {
        double scale = 0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j)
                scale = std::max(scale, std::fabs(a(i, j)));
        pivot_tol = 1e-12 * std::max(scale, 1.0);
    }
    auto ech = row_reduce(std::move(aug), pivot_tol);
    std::vector<T> x(n, T(0));
    for (std::size_t r = 0; r < ech.pivots.size(); ++r) {
        if (ech.pivots[r] == n)
            return std::nullopt;
        x[ech.pivots[r]] = ech.reduced(r, n);
    }
    // Inconsistency that slipped under the pivot tolerance.
    for (std::size_t i = 0; i < m; ++i) {
        T lhs(0);
        for (std::size_t j = 0; j < n; ++j)
            lhs += a(i, j) * x[j];
        if (!near_zero(T(lhs - b[i]), tol))
            return std::nullopt;
    }
    return x;
}

template <Scalar T>
T dot(std::span<const T> a, std::span<const T> b)
{
    T sum(0);
    for (std::size_t i = 0; i < a.size(); ++i)
        sum += a[i] * b[i];
    return sum;
}

template <Scalar T>
T max_abs(std::span<const T> values)
{
    T best(0);
    for (const auto& v : values)
        best = std::max(best, T(abs_value(v)));
    return best;
}

#define OCCLAB_INSTANTIATE(T)                                                                       \
    template class Matrix<T>;                                                                       \
    template Echelon<T> row_reduce(Matrix<T>, const T&);                                            \
    template std::size_t rank(const Matrix<T>&, double);                                            \
    template std::vector<std::vector<T>> null_space(const Matrix<T>&, double);                      \
    template std::optional<std::vector<T>> solve_square(const Matrix<T>&, std::span<const T>);      \
    template std::optional<std::vector<T>> particular_solution(const Matrix<T>&, std::span<const T>, \
                                                               const T&);                           \
    template T dot(std::span<const T>, std::span<const T>);                                         \
    template T max_abs(std::span<const T>);

OCCLAB_INSTANTIATE(Rational)
OCCLAB_INSTANTIATE(double)

#undef OCCLAB_INSTANTIATE

}  // namespace occlab
