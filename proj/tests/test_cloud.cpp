#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "cleankit/cloud_verify.hpp"
#include "cleankit/gallery.hpp"

using namespace cleankit;

namespace {

std::shared_ptr<const SiteSpace> sp(std::size_t n) {
    return std::make_shared<SiteSpace>(numbered_space(n));
}

Cloud random_cloud(std::mt19937_64& rng, std::shared_ptr<const SiteSpace> space, int max_level,
                   int entries) {
    std::uniform_int_distribution<int> ulev(0, max_level);
    std::uniform_int_distribution<int> usite(0, static_cast<int>(space->size()) - 1);
    std::uniform_int_distribution<int> uw(1, 32);
    Cloud c(space);
    for (int e = 0; e < entries; ++e) {
        Marker m;
        int lvl = ulev(rng);
        for (int i = 0; i <= lvl; ++i) m.push_back(usite(rng));
        c.add(m, uw(rng) / 32.0);
    }
    return c;
}

}  // namespace

TEST_CASE("marker store interning") {
    MarkerStore store;
    auto a = store.intern({0, 1, 2});
    auto b = store.intern({0, 1});
    auto c = store.intern({0, 1, 2});
    CHECK(a == c);
    CHECK(store.parent(a) == b);
    CHECK(store.level(a) == 2);
    CHECK(store.first(a) == 0);
    CHECK(store.site(a) == 2);
    CHECK(store.path(a) == Marker{0, 1, 2});
    CHECK(store.find({9}) == MarkerStore::npos);
}

TEST_CASE("rho^k convolution laws") {
    auto s = sp(2);
    Cloud r1 = Cloud::rho(s, 1);
    Cloud r2 = Cloud::rho(s, 2);
    Cloud r3 = convolve(r1, r2);
    Cloud expect = Cloud::rho(s, 3);
    bool equal = true;
    for_each_marker(*s, 4, [&](const Marker& m) {
        equal = equal && r3.value(m) == expect.value(m);
        return true;
    });
    CHECK(equal);

    std::mt19937_64 rng(3);
    Cloud nu = random_cloud(rng, s, 2, 6);
    Cloud left = convolve(Cloud::rho(s, 0), nu);
    Cloud right = convolve(nu, Cloud::rho(s, 0));
    for_each_marker(*s, 3, [&](const Marker& m) {
        CHECK(left.value(m) == nu.value(m));
        CHECK(right.value(m) == nu.value(m));
        return true;
    });
}

TEST_CASE("convolution matches brute-force splitting") {
    std::mt19937_64 rng(4);
    auto s = sp(2);
    for (int t = 0; t < 40; ++t) {
        Cloud a = random_cloud(rng, s, 2, 5);
        Cloud b = random_cloud(rng, s, 2, 5);
        Cloud c = convolve(a, b);
        for_each_marker(*s, 4, [&](const Marker& m) {
            double brute = 0.0;
            for (std::size_t j = 0; j < m.size(); ++j) {
                Marker m1(m.begin(), m.begin() + static_cast<long>(j) + 1);
                Marker m2(m.begin() + static_cast<long>(j), m.end());
                brute += a.value(m1) * b.value(m2);
            }
            CHECK(c.value(m) == doctest::Approx(brute).epsilon(1e-14));
            return true;
        });
    }
}

TEST_CASE("norm is submultiplicative") {
    std::mt19937_64 rng(5);
    auto s = sp(3);
    for (int t = 0; t < 500; ++t) {
        Cloud a = random_cloud(rng, s, 2, 6);
        Cloud b = random_cloud(rng, s, 2, 6);
        CHECK(convolve(a, b).norm() <= a.norm() * b.norm() + 1e-10);
    }
}

TEST_CASE("cumulative of beta_h and order on beta clouds") {
    auto s = sp(2);
    Profile h(s);
    h.set(0, 0.25);
    h.set(1, 0.75);
    Cloud bh = Cloud::beta(h);
    CHECK(bh.cumulative({0}) == doctest::Approx(0.75));
    CHECK(bh.cumulative({1}) == doctest::Approx(0.25));
    CHECK(bh.cumulative({0, 1}) == 1.0);
    CHECK(bh.cumulative({1, 0, 1}) == 1.0);

    // beta_g <= beta_h in the cleaning order iff g >= h
    Profile g(s);
    g.set(0, 0.5);
    g.set(1, 0.75);
    CHECK(order_leq(Cloud::beta(g), bh, 3).holds);
    CHECK_FALSE(order_leq(bh, Cloud::beta(g), 3).holds);
    CHECK_THROWS_AS(order_leq(bh, bh, 1), contract_error);  // cap below stabilization
}

TEST_CASE("pi_lambda sits below every lambda-regular cloud") {
    auto s = sp(2);
    SiteSet lambda = SiteSet::of(2, {0});
    Profile h(s);
    h.set(0, 0.5);
    Cloud mu = convolve(Cloud::beta(h), Cloud::beta(h));  // lambda-regular
    SpecialCloud pi = make_pi_lambda(lambda);
    Cloud rho0 = Cloud::rho(s, 0);
    for_each_marker(*s, 4, [&](const Marker& m) {
        CHECK(special_cumulative(pi, m) <= mu.cumulative(m) + 1e-12);
        CHECK(mu.cumulative(m) <= rho0.cumulative(m) + 1e-12);
        return true;
    });
}

TEST_CASE("figure clouds classify as captioned") {
    SUBCASE("P but (recorded) not B") {
        GalleryInstance g = build_gallery("cloud_P_not_B");
        CloudClassReport r = classify(*g.cloud);
        CHECK(r.nonnegative);
        CHECK(r.norm_value == doctest::Approx(1.0));
        CHECK(r.in_P);
        CHECK(r.in_R);
        CHECK(r.in_S);
        CHECK(r.s_value == doctest::Approx(1.0));
    }
    SUBCASE("R but not P, witness pair (xyx, xx)") {
        GalleryInstance g = build_gallery("cloud_R_not_P");
        CloudClassReport r = classify(*g.cloud);
        CHECK(r.in_R);
        CHECK_FALSE(r.in_P);
        REQUIRE(r.p_witness.size() == 2);
        const SiteSpace& space = g.cloud->space();
        CHECK(marker_to_string(space, r.p_witness[0]) == "x.y.x");
        CHECK(marker_to_string(space, r.p_witness[1]) == "x.x");
    }
    SUBCASE("S_1 but not R, witness at xy") {
        GalleryInstance g = build_gallery("cloud_S1_not_R");
        CloudClassReport r = classify(*g.cloud);
        CHECK(r.in_S);
        CHECK(r.s_value == doctest::Approx(1.0));
        CHECK_FALSE(r.in_R);
        REQUIRE(r.r_witness.size() == 2);
        const SiteSpace& space = g.cloud->space();
        CHECK(marker_to_string(space, r.r_witness[0]) == "x.y");
        // and the direct witness: rho^1 * mu not<= mu at xy
        Cloud shifted = convolve(Cloud::rho(g.space, 1), *g.cloud);
        OrderResult ord = order_leq(shifted, *g.cloud, 6);
        CHECK_FALSE(ord.holds);
        REQUIRE(ord.witness.has_value());
        CHECK(marker_to_string(space, *ord.witness) == "x.y");
    }
}

TEST_CASE("class cones are closed under sum and convolution") {
    std::mt19937_64 rng(6);
    auto s = sp(3);
    SiteSet lambda = SiteSet::of(3, {0, 1});
    auto random_beta_product = [&](int n) {
        Cloud c = Cloud::rho(s, 0);
        std::uniform_int_distribution<int> uw(0, 32);
        for (int i = 0; i < n; ++i) {
            Profile f(s);
            for (site_index x : lambda.members()) f.set(x, uw(rng) / 32.0);
            c = convolve(c, Cloud::beta(f));
        }
        return c;
    };
    for (int t = 0; t < 20; ++t) {
        Cloud a = random_beta_product(2);
        Cloud b = random_beta_product(2);
        CloudClassReport ra = classify(a), rb = classify(b);
        CHECK(ra.in_P);  // beta products are in B, hence P
        CHECK(rb.in_P);
        CloudClassReport rsum = classify(a.scaled(0.5) + b.scaled(0.5));
        CHECK(rsum.in_P);
        CloudClassReport rconv = classify(convolve(a, b));
        CHECK(rconv.in_P);
        CHECK(rconv.in_R);
        // S_a * S_b lands in S_{ab}
        CloudClassReport r2 = classify(convolve(a.scaled(0.5), b.scaled(0.75)));
        CHECK(r2.in_S);
        CHECK(r2.s_value == doctest::Approx(ra.s_value * 0.5 * rb.s_value * 0.75));
    }
}

TEST_CASE("lambda-regularity: constructors and closure") {
    auto s = sp(3);
    SiteSet lambda = SiteSet::of(3, {0, 1});

    Profile inside(s);
    inside.set(0, 0.5);
    inside.set(1, 0.25);
    Profile outside(s);
    outside.set(2, 0.5);

    CloudClassReport r1 = classify(Cloud::beta(inside), lambda);
    REQUIRE(r1.lambda_regular.has_value());
    CHECK(*r1.lambda_regular);
    CHECK(*r1.carried);

    CloudClassReport r2 = classify(Cloud::beta(outside), lambda);
    CHECK_FALSE(*r2.lambda_regular);
    CHECK_FALSE(*r2.carried);

    CloudClassReport r3 = classify(convolve(Cloud::beta(inside), Cloud::beta(inside)), lambda);
    CHECK(*r3.lambda_regular);

    CHECK(classify(Cloud::rho(s, 0), lambda).lambda_regular.value());
}

TEST_CASE("operator realization") {
    std::mt19937_64 rng(7);
    auto s = sp(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    SUBCASE("T_{rho^k} = alpha^k and T_{I_f} = I_f") {
        Kernel a(s);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (u(rng) < 0.7) a.set(i, j, u(rng));
        Kernel a2 = kernel_multiply(a, a);
        Kernel t = realize(Cloud::rho(s, 2), a);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) CHECK(t.at(i, j) == doctest::Approx(a2.at(i, j)));

        Profile f(s);
        f.set(1, 0.5);
        Kernel tf = realize(Cloud::diag(f), a);
        CHECK(tf.at(1, 1) == doctest::Approx(0.5));
        CHECK(tf.nnz() == 1);
    }

    SUBCASE("homomorphism and norm bound") {
        for (int t = 0; t < 100; ++t) {
            Kernel a(s);
            WeightVector w(s, 1.0);
            for (int i = 0; i < 3; ++i) w.set(i, 0.5 + u(rng));
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    if (u(rng) < 0.6) a.set(i, j, u(rng));
            for (int i = 0; i < 3; ++i) {
                double rs = 0.0;
                for (const auto& e : a.row(i)) rs += e.value * w[e.col];
                if (rs > 0.0) a.scale_row(i, u(rng) * w[i] / rs);
            }
            Cloud n1 = random_cloud(rng, s, 2, 5);
            Cloud n2 = random_cloud(rng, s, 2, 5);
            Kernel lhs = realize(convolve(n1, n2), a);
            Kernel rhs = kernel_multiply(realize(n1, a), realize(n2, a));
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    CHECK(lhs.at(i, j) == doctest::Approx(rhs.at(i, j)).epsilon(1e-10));
            CHECK(weighted_operator_norm(realize(n1, a), w) <= n1.norm() + 1e-10);
        }
    }

    SUBCASE("pi realization delegates to balayage") {
        Kernel a(s);
        a.set(0, 1, 0.5);
        a.set(1, 2, 0.5);
        WeightVector w(s, 1.0);
        BalayageResult r = realize_pi(SiteSet::of(3, {0, 1}), a, w);
        CHECK(r.converged);
        CHECK(r.matrix.at(0, 2) == doctest::Approx(0.25));
    }
}

TEST_CASE("fundamental comparison: order implies weighted domination") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto s = sp(3);
    for (int t = 0; t < 60; ++t) {
        Kernel a(s);
        WeightVector w(s, 1.0);
        for (int i = 0; i < 3; ++i) w.set(i, 0.5 + u(rng));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (u(rng) < 0.6) a.set(i, j, u(rng));
        for (int i = 0; i < 3; ++i) {
            double rs = 0.0;
            for (const auto& e : a.row(i)) rs += e.value * w[e.col];
            if (rs > 0.0) a.scale_row(i, u(rng) * w[i] / rs);
        }
        // mass raising: nu = mu plus nonnegative bumps on ancestors
        Cloud mu = random_cloud(rng, s, 2, 5);
        Cloud nu = mu;
        mu.for_each([&](const Marker& m, double) {
            if (m.size() > 1) {
                Marker anc(m.begin(), m.end() - 1);
                nu.add(anc, 0.25);
            } else {
                nu.add(m, 0.25);
            }
        });
        REQUIRE(order_leq(mu, nu, 4).holds);
        SignedVector tw_mu = kernel_times(realize(mu, a), w);
        SignedVector tw_nu = kernel_times(realize(nu, a), w);
        for (int i = 0; i < 3; ++i) CHECK(tw_mu[i] <= tw_nu[i] + 1e-12);

        DirtVector c(s, 0.0);
        for (int i = 0; i < 3; ++i) c.set(i, u(rng));
        SignedVector ca = apply_kernel(c, realize(mu, a));
        SignedVector cb = apply_kernel(c, realize(nu, a));
        CHECK(weighted_vector_norm(ca, w) <= weighted_vector_norm(cb, w) + 1e-12);
    }
}

TEST_CASE("binomial law for half-sweeps") {
    auto s = sp(3);
    Profile h(s);
    h.set(0, 0.5);
    h.set(1, 0.5);

    // chain y_0 y_1 y_0 y_1 ... inside the two-site support of h
    for (int len = 1; len <= 6; ++len) {
        Marker chain;
        for (int i = 0; i < len; ++i) chain.push_back(static_cast<site_index>(i % 2));
        for (int N : {1, 5, 12, 20}) {
            std::vector<double> vals = beta_power_on_chain(h, chain, N);
            for (int j = 0; j < len; ++j) {
                double expected = 0.0;
                if (j <= N) {
                    double binom = 1.0;
                    for (int i = 0; i < j; ++i) binom = binom * (N - i) / (i + 1);
                    expected = binom * std::exp2(-N);
                }
                CHECK(vals[static_cast<std::size_t>(j)] == expected);  // exact dyadic
            }
        }
    }
}

TEST_CASE("cloud product trace converges pointwise iff coverage diverges") {
    auto s = sp(2);
    SiteSet lambda = SiteSet::of(2, {0});

    SUBCASE("full sweeps: distance at fixed markers hits zero past their level") {
        std::vector<Profile> h = {Profile::indicator(s, lambda)};
        CloudTrace tr = cloud_product_trace(h, lambda, 3, 6);
        CHECK(tr.rows.back().pointwise_dist == 0.0);
    }

    SUBCASE("summable coverage at one site keeps a positive floor") {
        // h_n = 2^{-n} at site 0: sum < 1, so mu_n((0)) stays above prod(1-h_n) > 0
        std::vector<Profile> h;
        for (int n = 1; n <= 24; ++n) {
            Profile p(s);
            p.set(0, std::exp2(-n));
            h.push_back(p);
        }
        CloudTrace tr = cloud_product_trace(h, lambda, 2, 24);
        CHECK(tr.final_cloud.value({0}) > 0.25);
        CHECK(tr.rows.back().pointwise_dist > 0.25);
    }
}

TEST_CASE("cloud identity suite passes") {
    CloudInstanceOptions opts;
    auto reports = run_cloud_suite({}, 6, 2024, opts);
    for (const auto& r : reports) {
        CAPTURE(r.name);
        CAPTURE(r.instance_digest);
        CHECK(r.pass);
        CHECK(r.max_residual <= 1e-10);
    }
}

TEST_CASE("dual accessor") {
    auto s = sp(2);
    std::mt19937_64 rng(9);
    Cloud nu = random_cloud(rng, s, 2, 6);
    for_each_marker(*s, 3, [&](const Marker& m) {
        double expect = nu.cumulative(m);
        if (m.size() > 1) expect -= nu.cumulative(Marker(m.begin() + 1, m.end()));
        CHECK(nu.dual_value(m) == doctest::Approx(expect));
        return true;
    });
}

TEST_CASE("special convolution refuses unsupported pairs") {
    SiteSet lambda = SiteSet::of(2, {0});
    CHECK_NOTHROW(convolve(make_pi_lambda(lambda), make_pi_lambda(lambda)));
    CHECK_THROWS_AS(convolve(make_one(), make_pi_lambda(lambda)), not_implemented_error);
}

TEST_CASE("order preservation under convolution") {
    std::mt19937_64 rng(10);
    auto s = sp(2);

    // mu1 <= mu2 pairs by mass raising
    auto raised_pair = [&]() {
        Cloud mu1 = random_cloud(rng, s, 2, 5);
        Cloud mu2 = mu1;
        mu1.for_each([&](const Marker& m, double) { mu2.add({m.front()}, 0.125); });
        return std::pair<Cloud, Cloud>(std::move(mu1), std::move(mu2));
    };

    SUBCASE("from the left, for any nonnegative mu") {
        for (int t = 0; t < 40; ++t) {
            auto [m1, m2] = raised_pair();
            REQUIRE(order_leq(m1, m2, 4).holds);
            Cloud mu = random_cloud(rng, s, 2, 5);
            CHECK(order_leq(convolve(mu, m1), convolve(mu, m2), 6).holds);
        }
    }

    SUBCASE("from the right exactly on the classifier's R") {
        std::uniform_int_distribution<int> uw(0, 32);
        int r_seen = 0, non_r_seen = 0;
        for (int t = 0; t < 40; ++t) {
            // beta products land in R; raw random clouds essentially never do
            Cloud nu = [&]() {
                if (t % 2 == 0) {
                    Profile f(s), g(s);
                    for (int x = 0; x < 2; ++x) {
                        f.set(x, uw(rng) / 32.0);
                        g.set(x, uw(rng) / 32.0);
                    }
                    return convolve(Cloud::beta(f), Cloud::beta(g));
                }
                return random_cloud(rng, s, 2, 4);
            }();
            CloudClassReport rep = classify(nu);
            if (rep.in_R) {
                ++r_seen;
                auto [m1, m2] = raised_pair();
                REQUIRE(order_leq(m1, m2, 4).holds);
                CHECK(order_leq(convolve(m1, nu), convolve(m2, nu), 7).holds);
            } else {
                ++non_r_seen;
                // the converse direction: rho^1 <= rho^0, yet right-convolution
                // with a non-R cloud breaks the order
                Cloud shifted = convolve(Cloud::rho(s, 1), nu);
                CHECK_FALSE(order_leq(shifted, nu, 4).holds);
            }
        }
        CHECK(r_seen > 0);
        CHECK(non_r_seen > 0);
    }
}

TEST_CASE("classifier flags satisfy the cone chain P => R => S") {
    std::mt19937_64 rng(11);
    auto s = sp(2);
    for (int t = 0; t < 120; ++t) {
        Cloud nu = random_cloud(rng, s, 2, 4);
        CloudClassReport rep = classify(nu);
        if (rep.in_P) CHECK(rep.in_R);
        if (rep.in_R) CHECK(rep.in_S);
        if (!rep.in_R) REQUIRE(rep.r_witness.size() == 2);
        if (!rep.in_P) REQUIRE(rep.p_witness.size() == 2);
    }
}
