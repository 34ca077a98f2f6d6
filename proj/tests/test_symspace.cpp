#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include <geomdl/symspace.hpp>

#include "support.hpp"

using geomdl::Matrix;
using geomdl::SymMatrix;
using geomdl::Vector;

namespace {

// deterministic random symmetric matrix with eigenvalues well inside (lo, hi)
Matrix random_spd_entries(int m, unsigned seed, double lo = 0.5, double hi = 3.0) {
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Matrix b(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) b(i, j) = unif(gen);
    Matrix q = b * b.transpose();             // PSD
    const double bump = lo + 0.5 * (hi - lo);
    q += bump * Matrix::Identity(m, m);       // strictly PD
    q *= hi / (q.norm() + hi);                // keep the scale tame
    q += lo * Matrix::Identity(m, m);
    return q;
}

}  // namespace

TEST_CASE("SymMatrix mirrors the upper triangle and rejects non-square input",
          "[symspace]") {
    Matrix a(2, 2);
    a << 1.0, 5.0,
         -3.0, 2.0;  // lower entry disagrees on purpose
    const SymMatrix s(a);
    REQUIRE(s(1, 0) == s(0, 1));
    REQUIRE(s(0, 1) == 5.0);
    REQUIRE(s.dim() == 2);

    REQUIRE_THROWS_AS(SymMatrix(Matrix::Zero(2, 3)), geomdl::invalid_input);
}

TEST_CASE("eigh returns a descending spectral decomposition", "[symspace]") {
    const SymMatrix a{random_spd_entries(4, 11)};
    const auto [lam, vec] = geomdl::eigh(a);

    for (int i = 0; i + 1 < 4; ++i) REQUIRE(lam(i) >= lam(i + 1));

    // A v_i = lam_i v_i and V orthogonal
    const Matrix resid = a.entries * vec - vec * lam.asDiagonal();
    REQUIRE(resid.cwiseAbs().maxCoeff() < 1e-12);
    const Matrix ortho = vec.transpose() * vec - Matrix::Identity(4, 4);
    REQUIRE(ortho.cwiseAbs().maxCoeff() < 1e-12);

    Matrix bad(2, 2);
    bad << 1.0, std::numeric_limits<double>::quiet_NaN(), 0.0, 1.0;
    REQUIRE_THROWS_AS(geomdl::eigh(SymMatrix(bad)), geomdl::invalid_input);
}

TEST_CASE("spd_from_sym accepts PD input and rejects indefinite input", "[symspace]") {
    const SymMatrix good{random_spd_entries(3, 7)};
    const geomdl::SpdMatrix q = geomdl::spd_from_sym(good);
    REQUIRE(q.eigenvalues.minCoeff() > 0.0);

    // inverse and solve agree with Eigen's direct inverse
    const Matrix direct = good.entries.inverse();
    REQUIRE((q.inverse() - direct).cwiseAbs().maxCoeff() < 1e-10);
    const Matrix rhs = random_spd_entries(3, 8);
    REQUIRE((q.solve(rhs) - direct * rhs).cwiseAbs().maxCoeff() < 1e-10);

    // logdet against the LU route
    REQUIRE(std::abs(geomdl::logdet(q) - std::log(good.entries.determinant())) < 1e-12);

    Matrix indef = Matrix::Identity(2, 2);
    indef(1, 1) = -0.5;
    REQUIRE_THROWS_AS(geomdl::spd_from_sym(SymMatrix(indef)), geomdl::not_positive_definite);

    // exactly singular is also rejected
    Matrix sing = Matrix::Ones(2, 2);
    REQUIRE_THROWS_AS(geomdl::spd_from_sym(SymMatrix(sing)), geomdl::not_positive_definite);
}

TEST_CASE("spd_from_eigen re-sorts the spectrum descending", "[symspace]") {
    Vector lam(3);
    lam << 0.7, 2.5, 1.1;  // deliberately unsorted
    const Matrix vec = Matrix::Identity(3, 3);
    const geomdl::SpdMatrix q = geomdl::spd_from_eigen(lam, vec);
    REQUIRE(q.eigenvalues(0) == 2.5);
    REQUIRE(q.eigenvalues(1) == 1.1);
    REQUIRE(q.eigenvalues(2) == 0.7);
    REQUIRE(q.mat()(0, 0) == Catch::Approx(0.7));

    Vector bad(2);
    bad << 1.0, -1.0;
    REQUIRE_THROWS_AS(geomdl::spd_from_eigen(bad, Matrix::Identity(2, 2)),
                      geomdl::not_positive_definite);
}

TEST_CASE("spd_diag and spd_identity build the expected matrices", "[symspace]") {
    Vector d(2);
    d << 4.0, 9.0;
    const geomdl::SpdMatrix q = geomdl::spd_diag(d);
    REQUIRE(q.mat()(0, 0) == 4.0);
    REQUIRE(q.mat()(1, 1) == 9.0);
    REQUIRE(q.mat()(0, 1) == 0.0);
    REQUIRE(geomdl::logdet(q) == Catch::Approx(std::log(36.0)));

    REQUIRE(geomdl::logdet(geomdl::spd_identity(5)) == 0.0);
}

TEST_CASE("sym_basis spans symmetric matrices with the documented ordering",
          "[symspace]") {
    const int m = 3;
    const auto basis = geomdl::sym_basis(m);
    REQUIRE(basis.size() == static_cast<size_t>(m * (m + 1) / 2));

    // row-major over i <= j: E_0 = e11, E_1 = e12 + e21, E_2 = e13 + e31, ...
    REQUIRE(basis[0](0, 0) == 1.0);
    REQUIRE(basis[1](0, 1) == 1.0);
    REQUIRE(basis[1](1, 0) == 1.0);
    REQUIRE(basis[1](1, 1) == 0.0);
    REQUIRE(basis[3](1, 1) == 1.0);
    REQUIRE(basis[5](2, 2) == 1.0);

    for (const SymMatrix& e : basis)
        REQUIRE((e.entries - e.entries.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coordinate round trip through the sym basis is exact", "[symspace]") {
    const int m = 4;
    std::mt19937 gen(21);
    std::uniform_real_distribution<double> unif(-2.0, 2.0);
    Vector c(m * (m + 1) / 2);
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = unif(gen);

    const SymMatrix q = geomdl::coords_to_sym(m, c);
    const Vector back = geomdl::sym_to_coords(q);
    REQUIRE((back - c).cwiseAbs().maxCoeff() == 0.0);

    // the coordinates reproduce the matrix through the basis expansion
    const auto basis = geomdl::sym_basis(m);
    Matrix rebuilt = Matrix::Zero(m, m);
    for (size_t a = 0; a < basis.size(); ++a)
        rebuilt += c(static_cast<Eigen::Index>(a)) * basis[a].entries;
    REQUIRE((rebuilt - q.entries).cwiseAbs().maxCoeff() == 0.0);

    REQUIRE_THROWS_AS(geomdl::coords_to_sym(3, c), geomdl::invalid_input);
}
