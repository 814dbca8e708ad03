#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "cleankit/kernel.hpp"

using namespace cleankit;

namespace {
std::shared_ptr<const SiteSpace> space2() {
    return std::make_shared<SiteSpace>(numbered_space(2));
}
}  // namespace

TEST_CASE("site space basics") {
    SiteSpace s({"a", "b", "c"});
    CHECK(s.size() == 3);
    CHECK(s.index("b") == 1);
    CHECK_THROWS_AS(s.index("z"), contract_error);
    CHECK_THROWS_AS(SiteSpace({"a", "a"}), contract_error);
    CHECK_THROWS_AS(SiteSpace(std::vector<std::string>{}), contract_error);
}

TEST_CASE("site sets") {
    SiteSet s = SiteSet::of(4, {0, 2});
    CHECK(s.count() == 2);
    CHECK(s.contains(2));
    CHECK_FALSE(s.contains(1));
    CHECK(s.complement().count() == 2);
    CHECK(SiteSet::all(3).is_all());
}

TEST_CASE("weighted vector norm") {
    auto sp = space2();
    WeightVector w(sp, 1.0);

    SignedVector zero(sp, 0.0);
    CHECK(weighted_vector_norm(zero, w) == 0.0);

    SignedVector delta(sp, 0.0);
    delta[0] = 1.0;
    CHECK(weighted_vector_norm(delta, w) == 1.0);

    SignedVector c(sp, 0.0);
    c[0] = 1.0;
    c[1] = 2.0;
    WeightVector w2(sp, 1.0);
    w2.set(0, 3.0);
    w2.set(1, 4.0);
    CHECK(weighted_vector_norm(c, w2) == doctest::Approx(11.0));

    auto sp3 = std::make_shared<SiteSpace>(numbered_space(3));
    WeightVector w3(sp3, 1.0);
    CHECK_THROWS_AS(weighted_vector_norm(c, w3), dimension_error);
}

TEST_CASE("weighted operator norm") {
    auto sp = space2();
    WeightVector w(sp, 1.0);

    Kernel id(sp);
    id.set(0, 0, 1.0);
    id.set(1, 1, 1.0);
    CHECK(weighted_operator_norm(id, w) == doctest::Approx(1.0));

    // ||I_f|| = max |f|
    Kernel diag(sp);
    diag.set(0, 0, 0.3);
    diag.set(1, 1, 0.8);
    CHECK(weighted_operator_norm(diag, w) == doctest::Approx(0.8));

    Kernel a(sp);
    a.set(0, 1, 2.0);
    CHECK(weighted_operator_norm(a, w) == doctest::Approx(2.0));
}

TEST_CASE("subinvariance") {
    auto sp = space2();
    WeightVector w(sp, 1.0);

    Kernel zero(sp);
    CHECK(is_subinvariant(zero, w, 0.0));

    // [[1,a],[0,b]] with a > 0 is never subinvariant for w = (u, v):
    // row 0 needs u + a v <= u
    Kernel bad(sp);
    bad.set(0, 0, 1.0);
    bad.set(0, 1, 0.5);
    bad.set(1, 1, 0.7);
    CHECK_FALSE(is_subinvariant(bad, w, 1e-12));

    Kernel nil(sp);
    nil.set(0, 1, 1.0);
    CHECK(is_subinvariant(nil, w, 0.0));
}

TEST_CASE("norm/subinvariance consistency for nonnegative kernels") {
    // ||A||_{w->w} <= 1 iff A w <= w
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto sp = std::make_shared<SiteSpace>(numbered_space(5));
    for (int t = 0; t < 200; ++t) {
        Kernel a(sp);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j)
                if (u(rng) < 0.5) a.set(i, j, u(rng));
        WeightVector w(sp, 1.0);
        for (int i = 0; i < 5; ++i) w.set(i, 0.25 + u(rng));
        bool by_norm = weighted_operator_norm(a, w) <= 1.0;
        bool by_sub = is_subinvariant(a, w, 0.0);
        CHECK(by_norm == by_sub);
    }
}

TEST_CASE("profile bounds enforced") {
    auto sp = space2();
    Profile p(sp);
    CHECK_THROWS_AS(p.set(0, 1.5), contract_error);
    CHECK_THROWS_AS(p.set(0, -0.1), contract_error);
    p.set(0, 1.0);
    CHECK(p.at(0) == 1.0);
    CHECK(p.at(1) == 0.0);
}

TEST_CASE("sparse product and restriction") {
    auto sp = std::make_shared<SiteSpace>(numbered_space(3));
    Kernel a(sp), b(sp);
    a.set(0, 1, 2.0);
    a.set(1, 2, 3.0);
    b.set(1, 0, 1.0);
    b.set(2, 2, 4.0);
    Kernel ab = kernel_multiply(a, b);
    CHECK(ab.at(0, 0) == doctest::Approx(2.0));
    CHECK(ab.at(1, 2) == doctest::Approx(12.0));
    CHECK(ab.nnz() == 2);

    SiteSet s = SiteSet::of(3, {0, 1});
    Kernel r = kernel_restrict(a, s);
    CHECK(r.at(0, 1) == doctest::Approx(2.0));
    CHECK(r.at(1, 2) == 0.0);
}

TEST_CASE("operator norm is submultiplicative on random nonnegative pairs") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto sp5 = std::make_shared<SiteSpace>(numbered_space(5));
    for (int t = 0; t < 200; ++t) {
        Kernel a(sp5), b(sp5);
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                if (u(rng) < 0.5) a.set(i, j, u(rng));
                if (u(rng) < 0.5) b.set(i, j, u(rng));
            }
        WeightVector w(sp5, 1.0);
        for (int i = 0; i < 5; ++i) w.set(i, 0.25 + u(rng));
        double nab = weighted_operator_norm(kernel_multiply(a, b), w);
        CHECK(nab <= weighted_operator_norm(a, w) * weighted_operator_norm(b, w) + 1e-12);
    }
}
