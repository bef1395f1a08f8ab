#include <doctest.h>

#include "occlab/errors.hpp"
#include "occlab/matrix.hpp"
#include "occlab/numeric.hpp"
#include "support/support.hpp"

using namespace occlab;
using occlab::testing::q;

TEST_SUITE("numeric") {

TEST_CASE("parse_rational handles fractions, decimals and exponents")
{
    CHECK(parse_rational("3") == q(3));
    CHECK(parse_rational("-1/2") == q(-1, 2));
    CHECK(parse_rational("0.125") == q(1, 8));
    CHECK(parse_rational("2.5e-3") == q(1, 400));
    CHECK(parse_rational("1E2") == q(100));
    CHECK(parse_rational(" 0.5 ") == q(1, 2));
    CHECK(parse_rational(".5") == q(1, 2));
    CHECK(parse_rational("0.5/0.25") == q(2));
}

TEST_CASE("leading zeros are decimal, not octal")
{
    CHECK(parse_rational("0.6666666667") == Rational(6666666667LL) / Rational(10000000000LL));
    CHECK(parse_rational("010") == q(10));
    CHECK(parse_rational("0.08") == q(2, 25));
    CHECK(parse_rational("0") == q(0));
    CHECK(parse_rational("0.000") == q(0));
}

TEST_CASE("malformed numbers are rejected")
{
    CHECK_THROWS_AS(parse_rational(""), InvalidArgument);
    CHECK_THROWS_AS(parse_rational("abc"), InvalidArgument);
    CHECK_THROWS_AS(parse_rational("1/0"), InvalidArgument);
    CHECK_THROWS_AS(parse_rational("1.2.3"), InvalidArgument);
    CHECK_THROWS_AS(parse_rational("."), InvalidArgument);
}

TEST_CASE("format round-trips")
{
    for (auto v : {q(0), q(-7, 3), q(5), q(123456789, 1000)})
        CHECK(parse_rational(format_rational(v)) == v);
    CHECK(format_rational(q(2, 4)) == "1/2");
}

TEST_CASE("rational_from_double is exact")
{
    CHECK(rational_from_double(0.5) == q(1, 2));
    CHECK(rational_from_double(-3.0) == q(-3));
    CHECK(rational_from_double(0.0) == q(0));
    double x = 0.1;
    CHECK(to_double(rational_from_double(x)) == x);
    CHECK(rational_from_double(x) != q(1, 10));
    CHECK_THROWS_AS(rational_from_double(std::numeric_limits<double>::infinity()), InvalidArgument);
}

TEST_CASE("mode names")
{
    CHECK(parse_mode("exact") == Mode::exact);
    CHECK(parse_mode("float") == Mode::floating);
    CHECK(to_string(Mode::floating) == "float");
    CHECK_THROWS_AS(parse_mode("double"), InvalidArgument);
}

TEST_CASE("default tolerances")
{
    auto f = Tolerances<double>::defaults();
    CHECK(f.stochastic == 1e-9);
    CHECK(f.character == 1e-9);
    CHECK(f.support == 1e-11);
    CHECK(f.fixpoint == 1e-12);
    CHECK(f.rank_cutoff == 1e-8);
    auto e = Tolerances<Rational>::defaults();
    CHECK(e.stochastic == 0);
    CHECK(e.character == 0);
    CHECK(e.support == 0);
}

TEST_CASE("exact rank and null space agree with an independent elimination")
{
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> entry(-2, 2);
    for (int trial = 0; trial < 40; ++trial) {
        std::size_t rows = 1 + trial % 4, cols = 1 + (trial / 4) % 5;
        Matrix<Rational> m(rows, cols);
        testing::RMat o(rows, testing::RVec(cols));
        for (std::size_t i = 0; i < rows; ++i)
            for (std::size_t j = 0; j < cols; ++j)
                m(i, j) = o[i][j] = entry(rng);
        std::size_t r = rank(m, 0.0);
        CHECK(r == testing::oracle_rank(o));
        auto ns = null_space(m, 0.0);
        CHECK(ns.size() + r == cols);
        for (const auto& v : ns)
            for (std::size_t i = 0; i < rows; ++i) {
                Rational s = 0;
                for (std::size_t j = 0; j < cols; ++j)
                    s += o[i][j] * v[j];
                CHECK(s == 0);
            }
    }
}

TEST_CASE("float rank uses a relative cutoff")
{
    Matrix<double> m(2, 2);
    m(0, 0) = 1;
    m(1, 1) = 1e-10;
    CHECK(rank(m, 1e-8) == 1);
    CHECK(rank(m, 1e-12) == 2);
    CHECK(null_space(m, 1e-8).size() == 1);
}

}
