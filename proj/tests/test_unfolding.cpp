#include <catch2/catch_amalgamated.hpp>

#include <catkit/unfolding.hpp>

#include "test_util.hpp"

using namespace catkit;
using namespace catkit::test;

namespace {
Jet<Rational> Jxu(const std::string& expr, std::vector<std::string> vars, int order) {
    return J(expr, std::move(vars), order);
}
}  // namespace

TEST_CASE("alphas_of extracts base and initial speeds") {
    auto flip = SignAction::full(1);

    auto F1 = Jxu("x^4 + u*x^2", {"x", "u"}, 6);
    auto u1 = alphas_of(F1, 1, flip);
    CHECK(u1.base == J1("x^4", 6));
    REQUIRE(u1.params() == 1);
    CHECK(u1.alphas[0] == J1("x^2", 6));

    auto F2 = Jxu("x^6 + u*x^2 + v*x^4", {"x", "u", "v"}, 8);
    auto u2 = alphas_of(F2, 1, flip);
    REQUIRE(u2.params() == 2);
    CHECK(u2.alphas[0] == J1("x^2", 8));
    CHECK(u2.alphas[1] == J1("x^4", 8));

    // no u-dependence: all alphas vanish
    auto F3 = Jxu("x^4", {"x", "u"}, 6);
    auto u3 = alphas_of(F3, 1, flip);
    CHECK(u3.alphas[0].is_zero());
}

TEST_CASE("alphas_of rejects non-invariant slices") {
    auto flip = SignAction::full(1);
    auto F = Jxu("x^4 + u*x^3", {"x", "u"}, 6);
    CHECK_THROWS_AS(alphas_of(F, 1, flip), std::invalid_argument);
}

TEST_CASE("transversality: cusp-even unfolding") {
    auto flip = SignAction::full(1);
    auto F = Jxu("x^4 + u*x^2", {"x", "u"}, 6);
    auto rep = is_transversal(alphas_of(F, 1, flip), flip);
    CHECK(rep.transversal);
    CHECK(rep.minimal);
    CHECK(rep.missing.empty());
}

TEST_CASE("transversality: redundant direction misses x^2") {
    // oracle: alpha = x^4 already lies in T_ext, so the rank cannot grow
    auto flip = SignAction::full(1);
    auto F = Jxu("x^4 + u*x^4", {"x", "u"}, 6);
    auto rep = is_transversal(alphas_of(F, 1, flip), flip);
    CHECK_FALSE(rep.transversal);
    REQUIRE(rep.missing.size() == 1);
    CHECK(rep.missing[0] == MultiIndex({2}));
    CHECK_FALSE(rep.minimal);
}

TEST_CASE("transversality: butterfly-even with both parameters") {
    auto flip = SignAction::full(1);
    auto F = Jxu("x^6 + u*x^2 + v*x^4", {"x", "u", "v"}, 8);
    auto rep = is_transversal(alphas_of(F, 1, flip), flip);
    CHECK(rep.transversal);
    CHECK(rep.minimal);
    CHECK(rep.codim == 2);
}

TEST_CASE("transversality is undecidable at the beta=2 wall") {
    auto full2 = SignAction::full(2);
    auto F = Jxu("x^4 + 2*x^2*y^2 + y^4 + u*x^2", {"x", "y", "u"}, 12);
    CHECK_THROWS_AS(is_transversal(alphas_of(F, 2, full2), full2), std::runtime_error);
}

TEST_CASE("universal unfoldings match the table rows") {
    auto flip = SignAction::full(1);
    auto u6 = universal_unfolding(J1("x^6", 8), flip);
    REQUIRE(u6.params() == 2);
    CHECK(u6.alphas[0] == J1("x^2", 8));
    CHECK(u6.alphas[1] == J1("x^4", 8));
    REQUIRE(u6.full.has_value());
    CHECK(*u6.full == Jxu("x^6 + u*x^2 + v*x^4", {"x", "u", "v"}, 8));

    auto full2 = SignAction::full(2);
    auto ux = universal_unfolding(J2("x^4 - y^4", 8), full2);
    REQUIRE(ux.params() == 3);
    CHECK(ux.alphas[0] == J2("x^2", 8));
    CHECK(ux.alphas[1] == J2("y^2", 8));
    CHECK(ux.alphas[2] == J2("x^2*y^2", 8));

    // Morse: trivial unfolding
    auto um = universal_unfolding(J1("x^2", 6), flip);
    CHECK(um.params() == 0);
    CHECK(*um.full == J1("x^2", 6));
}

TEST_CASE("universal unfolding round-trip is transversal and minimal") {
    auto full2 = SignAction::full(2);
    std::uniform_int_distribution<int> beta_num(-9, 9);
    int tested = 0;
    while (tested < 10) {
        int b = beta_num(rng());
        if (b == 2 || b == -2) continue;  // excluded wall
        ++tested;
        auto f = jet_add_scale(J2("x^4 + y^4", 8), J2("x^2*y^2", 8), Rational(b));
        auto uu = universal_unfolding(f, full2);
        auto rep = is_transversal(uu, full2);
        CHECK(rep.transversal);
        CHECK(rep.minimal);

        // dropping any single direction breaks transversality
        for (int drop = 0; drop < uu.params(); ++drop) {
            Unfolding<Rational> cut;
            cut.base = uu.base;
            for (int j = 0; j < uu.params(); ++j)
                if (j != drop) {
                    cut.alphas.push_back(uu.alphas[j]);
                    cut.param_names.push_back(uu.param_names[j]);
                }
            CHECK_FALSE(is_transversal(cut, full2).transversal);
        }
    }
}

TEST_CASE("padding with redundant parameters keeps transversality, clears minimal") {
    auto flip = SignAction::full(1);
    auto uu = universal_unfolding(J1("x^6", 8), flip);
    uu.alphas.push_back(J1("x^2 + 5*x^4", 8));
    uu.param_names.push_back("u3");
    auto rep = is_transversal(uu, flip);
    CHECK(rep.transversal);
    CHECK_FALSE(rep.minimal);
}

TEST_CASE("transversality invariant under equivariant base change") {
    auto full2 = SignAction::full(2);
    for (int t = 0; t < 6; ++t) {
        auto f = J2("x^4 + 3*x^2*y^2 + y^4", 8);
        auto uu = universal_unfolding(f, full2);
        auto phi = random_equivariant_map(full2, 8);
        Unfolding<Rational> moved;
        moved.base = jet_compose(f, phi);
        for (const auto& a : uu.alphas) moved.alphas.push_back(jet_compose(a, phi));
        moved.param_names = uu.param_names;
        CHECK(is_transversal(moved, full2).transversal == is_transversal(uu, full2).transversal);
    }
}
