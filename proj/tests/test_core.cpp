#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gselab/core.hpp"
#include "gselab/rng.hpp"

using namespace gselab;

namespace {

FractionalPartition random_partition(int k, int q, std::uint64_t seed) {
    rng::Stream s(seed, "test-partition");
    std::vector<double> w(static_cast<std::size_t>(k) * q);
    for (int n = 0; n < k; ++n) {
        double sum = 0;
        for (int m = 0; m < q; ++m) {
            w[static_cast<std::size_t>(n) * q + m] = -std::log(s.next_unit() + 1e-12);
            sum += w[static_cast<std::size_t>(n) * q + m];
        }
        for (int m = 0; m < q; ++m) w[static_cast<std::size_t>(n) * q + m] /= sum;
    }
    return FractionalPartition::normalized(k, q, std::move(w));
}

RArray random_array(int r, int k, std::uint64_t seed, double lo = -1, double hi = 1) {
    rng::Stream s(seed, "test-array");
    std::size_t n = 1;
    for (int i = 0; i < r; ++i) n *= k;
    std::vector<double> v(n);
    for (double& x : v) x = lo + (hi - lo) * s.next_unit();
    return RArray(r, k, std::move(v));
}

InteractionArray random_interaction(int q, int r, std::uint64_t seed) {
    rng::Stream s(seed, "test-interaction");
    std::size_t n = 1;
    for (int i = 0; i < r; ++i) n *= q;
    std::vector<double> v(n);
    for (double& x : v) x = 2 * s.next_unit() - 1;
    return InteractionArray::real(q, r, std::move(v));
}

} // namespace

TEST_CASE("energy vanishes for zero interaction") {
    RArray G = random_array(2, 3, 7);
    InteractionArray J = InteractionArray::real(2, 2, {0, 0, 0, 0});
    FractionalPartition x = random_partition(3, 2, 5);
    CHECK(energy(G, J, x) == 0.0);
}

TEST_CASE("all-ones instance collapses to 1 for any stochastic x") {
    RArray G = RArray::constant(2, 2, 1.0);
    InteractionArray J = InteractionArray::real(2, 2, {1, 1, 1, 1});
    for (std::uint64_t s = 0; s < 5; ++s) {
        FractionalPartition x = random_partition(2, 2, s);
        CHECK(energy(G, J, x) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("hand-enumerated alternating instance") {
    RArray G(2, 2, {0, 1, 1, 0});
    InteractionArray J = InteractionArray::real(2, 2, {0, 1, 1, 0});
    IntegerPartition x(2, 2, {0, 1});
    CHECK(energy(G, J, x) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(energy(G, J, x.to_fractional()) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("energy shape mismatches raise dimension errors") {
    RArray G = random_array(2, 3, 1);
    InteractionArray J = random_interaction(2, 2, 2);
    CHECK_THROWS_AS(energy(G, J, random_partition(4, 2, 3)), DimensionError);
    CHECK_THROWS_AS(energy(G, J, random_partition(3, 3, 3)), DimensionError);
    CHECK_THROWS_AS(energy(G, random_interaction(2, 3, 4), random_partition(3, 2, 3)),
                    DimensionError);
}

TEST_CASE("energy is affine in a single row on zero-diagonal arrays") {
    RArray G = zero_diagonal(random_array(2, 4, 11));
    InteractionArray J = random_interaction(3, 2, 12);
    FractionalPartition x0 = random_partition(4, 3, 13);
    FractionalPartition x1 = x0.with_row(2, {0.2, 0.3, 0.5});
    FractionalPartition xm = x0.with_row(2, {(x0.at(2, 0) + 0.2) / 2, (x0.at(2, 1) + 0.3) / 2,
                                             (x0.at(2, 2) + 0.5) / 2});
    const double e0 = energy(G, J, x0);
    const double e1 = energy(G, J, x1);
    const double em = energy(G, J, xm);
    CHECK(em == doctest::Approx((e0 + e1) / 2).epsilon(1e-12));
}

TEST_CASE("energy bound q^r inf norms") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        RArray G = random_array(2, 4, 100 + s);
        InteractionArray J = random_interaction(2, 2, 200 + s);
        FractionalPartition x = random_partition(4, 2, 300 + s);
        const double bound = 4 * G.inf_norm() * J.inf_norm();
        CHECK(std::fabs(energy(G, J, x)) <= bound + 1e-12);
    }
}

TEST_CASE("energy invariant under simultaneous state relabeling") {
    RArray G = random_array(2, 4, 21);
    InteractionArray J = random_interaction(2, 2, 22);
    FractionalPartition x = random_partition(4, 2, 23);
    // swap the two states in both J and x
    InteractionArray J2 = InteractionArray::real(
        2, 2, {J.coeff(3), J.coeff(2), J.coeff(1), J.coeff(0)});
    std::vector<double> w;
    for (int n = 0; n < 4; ++n) {
        w.push_back(x.at(n, 1));
        w.push_back(x.at(n, 0));
    }
    FractionalPartition x2 = FractionalPartition::checked(4, 2, std::move(w));
    CHECK(energy(G, J, x) == doctest::Approx(energy(G, J2, x2)).epsilon(1e-12));
}

TEST_CASE("layered energy basics") {
    RArray G = random_array(2, 3, 31);
    InteractionArray J = random_interaction(2, 2, 32);
    FractionalPartition x = random_partition(3, 2, 33);
    const double single = energy(G, J, x);

    SUBCASE("one layer equals the plain energy") {
        CHECK(layered_energy(LayeredRArray::single(G), {J}, x) ==
              doctest::Approx(single).epsilon(1e-12));
    }
    SUBCASE("two identical layers double the energy") {
        LayeredRArray W({G, G});
        CHECK(layered_energy(W, {J, J}, x) == doctest::Approx(2 * single).epsilon(1e-12));
    }
    SUBCASE("negated interaction on a copied layer cancels") {
        std::vector<double> neg;
        for (std::size_t c = 0; c < 4; ++c) neg.push_back(-J.coeff(c));
        LayeredRArray W({G, G});
        CHECK(layered_energy(W, {J, InteractionArray::real(2, 2, neg)}, x) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("layer count mismatch is an error") {
        LayeredRArray W({G, G});
        CHECK_THROWS_AS(layered_energy(W, {J}, x), DimensionError);
    }
}

TEST_CASE("canonical form with identity tables copies the layer") {
    // colors {0,1,2}; J_z(c) = c for every z
    RArray W(2, 3, {0, 1, 2, 1, 0, 2, 2, 1, 0});
    std::vector<std::vector<double>> tables(4, std::vector<double>{0, 1, 2});
    InteractionArray J = InteractionArray::color_table(2, 2, 3, tables);
    LayeredRArray out = canonical_form(LayeredRArray::single(W), {J});
    CHECK(out.layer_count() == 4);
    for (std::size_t e = 0; e < 4; ++e)
        for (std::size_t i = 0; i < 9; ++i) CHECK(out.layer(e).at(i) == W.at(i));
}

TEST_CASE("canonical form of the zero table is zero") {
    RArray W(2, 2, {0, 1, 1, 0});
    std::vector<std::vector<double>> tables(4, std::vector<double>{0, 0});
    InteractionArray J = InteractionArray::color_table(2, 2, 2, tables);
    LayeredRArray out = canonical_form(LayeredRArray::single(W), {J});
    for (std::size_t e = 0; e < 4; ++e)
        for (std::size_t i = 0; i < 4; ++i) CHECK(out.layer(e).at(i) == 0.0);
}

TEST_CASE("canonical form preserves energies") {
    // |E| = 2 layers over colors {0,1}, q = 2, r = 2, k = 3
    rng::Stream s(99, "canonical");
    auto color_array = [&] {
        std::vector<double> v(9);
        for (double& x : v) x = s.next_unit() < 0.5 ? 0.0 : 1.0;
        return RArray(2, 3, std::move(v));
    };
    LayeredRArray W({color_array(), color_array()}, {"a", "b"});
    LayeredInteraction J;
    for (int e = 0; e < 2; ++e) {
        std::vector<std::vector<double>> tables;
        for (int cell = 0; cell < 4; ++cell)
            tables.push_back({2 * s.next_unit() - 1, 2 * s.next_unit() - 1});
        J.push_back(InteractionArray::color_table(2, 2, 2, tables));
    }
    LayeredRArray canon = canonical_form(W, J);
    LayeredInteraction Jc = canonical_interaction(2, 2);
    for (std::uint64_t t = 0; t < 50; ++t) {
        FractionalPartition x = random_partition(3, 2, 1000 + t);
        CHECK(layered_energy(W, J, x) ==
              doctest::Approx(layered_energy(canon, Jc, x)).epsilon(1e-12));
    }
}

TEST_CASE("canonical form rejects colors without table entries") {
    RArray W(2, 2, {0, 1, 2, 0}); // color 2 outside a 2-color table
    std::vector<std::vector<double>> tables(4, std::vector<double>{0.5, -0.5});
    InteractionArray J = InteractionArray::color_table(2, 2, 2, tables);
    CHECK_THROWS_AS(canonical_form(LayeredRArray::single(W), {J}), DomainError);
}

TEST_CASE("zero_diagonal zeroes repeated-coordinate entries") {
    SUBCASE("r = 2 diagonal") {
        RArray G(2, 2, {5, 1, 2, 7});
        RArray Z = zero_diagonal(G);
        CHECK(Z.at(std::size_t(0)) == 0.0);
        CHECK(Z.at(std::size_t(1)) == 1.0);
        CHECK(Z.at(std::size_t(2)) == 2.0);
        CHECK(Z.at(std::size_t(3)) == 0.0);
    }
    SUBCASE("already zero-diagonal arrays are fixed points") {
        RArray G(2, 2, {0, 3, -4, 0});
        RArray Z = zero_diagonal(G);
        for (std::size_t i = 0; i < 4; ++i) CHECK(Z.at(i) == G.at(i));
    }
    SUBCASE("zeroed cells = tuples with a repeated coordinate") {
        // k=2, r=3: every tuple repeats a coordinate (pigeonhole), so all 8
        RArray G2 = RArray::constant(3, 2, 1.0);
        RArray Z2 = zero_diagonal(G2);
        int zeroed = 0;
        for (std::size_t i = 0; i < 8; ++i) zeroed += Z2.at(i) == 0.0;
        CHECK(zeroed == 8);
        // k=3, r=3: 27 - 3! = 21
        RArray G3 = RArray::constant(3, 3, 1.0);
        RArray Z3 = zero_diagonal(G3);
        zeroed = 0;
        for (std::size_t i = 0; i < 27; ++i) zeroed += Z3.at(i) == 0.0;
        CHECK(zeroed == 21);
    }
}

TEST_CASE("partition validation") {
    CHECK_THROWS_AS(FractionalPartition::checked(1, 2, {0.5, 0.6}), DomainError);
    FractionalPartition x = FractionalPartition::normalized(1, 2, {1.0, 3.0});
    CHECK(x.at(0, 0) == doctest::Approx(0.25));
    CHECK_THROWS_AS(StateDistribution(2, {0.5, 0.6}), DomainError);
    CHECK_THROWS_AS(StateDistribution(2, {-0.1, 1.1}), DomainError);
    StateDistribution a(2, {0.25, 0.75});
    StateDistribution b(2, {0.75, 0.25});
    CHECK(a.l1_distance(b) == doctest::Approx(1.0));
}

TEST_CASE("interaction inf norm covers table entries") {
    InteractionArray J =
        InteractionArray::color_table(1, 1, 2, {std::vector<double>{0.25, -3.5}});
    CHECK(J.inf_norm() == doctest::Approx(3.5));
    InteractionArray R = InteractionArray::real(2, 1, {0.5, -0.25});
    CHECK(R.inf_norm() == doctest::Approx(0.5));
}

TEST_CASE("row gradient matches one-sided row substitutions") {
    RArray G = random_array(2, 4, 41); // includes diagonal entries
    InteractionArray J = random_interaction(2, 2, 42);
    FractionalPartition x = random_partition(4, 2, 43);
    LayeredRArray W = LayeredRArray::single(G);
    std::vector<double> g = energy_row_gradient(W, {J}, x, 1);
    const double h = 1e-6;
    for (int m = 0; m < 2; ++m) {
        std::vector<double> up{x.at(1, 0), x.at(1, 1)};
        std::vector<double> dn = up;
        up[m] += h;
        dn[m] -= h;
        const double eu = energy_row_terms(W, {J}, x, 1, up);
        const double ed = energy_row_terms(W, {J}, x, 1, dn);
        CHECK(g[m] == doctest::Approx((eu - ed) / (2 * h)).epsilon(1e-4));
    }
}
