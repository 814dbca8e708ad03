#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "cleankit/dense.hpp"
#include "cleankit/gallery.hpp"
#include "cleankit/sweep.hpp"

using namespace cleankit;

namespace {

std::shared_ptr<const SiteSpace> sp(std::size_t n) {
    return std::make_shared<SiteSpace>(numbered_space(n));
}

struct FhInstance {
    std::shared_ptr<const SiteSpace> space;
    Kernel alpha;
    WeightVector w;
    DirtVector c;
    SiteSet lambda;

    FhInstance(std::shared_ptr<const SiteSpace> s)
        : space(s), alpha(s), w(s, 1.0), c(s, 0.0), lambda(s->size()) {}
};

FhInstance random_contraction(std::mt19937_64& rng, int n, double theta) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    FhInstance inst(sp(static_cast<std::size_t>(n)));
    for (int i = 0; i < n; ++i) inst.w.set(i, 0.5 + u(rng));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (u(rng) < 0.5) inst.alpha.set(i, j, u(rng));
    for (int i = 0; i < n; ++i) {
        double rs = 0.0;
        for (const auto& e : inst.alpha.row(i)) rs += e.value * inst.w[e.col];
        if (rs > 0.0) inst.alpha.scale_row(i, (0.3 + (theta - 0.3) * u(rng)) * inst.w[i] / rs);
    }
    for (int i = 0; i < n; ++i) inst.c.set(i, u(rng));
    for (int i = 0; i < n; ++i)
        if (u(rng) < 0.6) inst.lambda.insert(i);
    if (inst.lambda.empty()) inst.lambda.insert(0);
    if (inst.lambda.is_all()) inst.lambda.erase(static_cast<site_index>(n - 1));
    return inst;
}

}  // namespace

TEST_CASE("contraction profile closed forms") {
    auto s = sp(3);
    WeightVector w(s, 1.0);

    SUBCASE("rho(0) = 1 and nilpotent chains vanish at their length") {
        Kernel chain(s);
        chain.set(0, 1, 1.0);
        chain.set(1, 2, 1.0);
        SiteSet lambda = SiteSet::all(3);
        auto rho = contraction_profile(chain, lambda, w, nullptr, 4);
        CHECK(rho[0] == 1.0);
        CHECK(rho[1] == doctest::Approx(1.0));
        CHECK(rho[3] == 0.0);
        CHECK(rho[4] == 0.0);
    }

    SUBCASE("shift with w = 1/j^2: vector profile is a tail sum") {
        int M = 64;
        auto sm = sp(static_cast<std::size_t>(M));
        Kernel shift(sm);
        for (int i = 1; i < M; ++i) shift.set(i - 1, i, 1.0);
        WeightVector wm(sm, 1.0);
        for (int i = 1; i <= M; ++i) wm.set(i - 1, 1.0 / (double(i) * i));
        DirtVector c(sm, 1.0);
        auto rho = contraction_profile(shift, SiteSet::all(static_cast<std::size_t>(M)), wm, &c, 8);
        for (int l = 0; l <= 8; ++l) {
            double expect = 0.0;
            for (int i = 1; i + l <= M; ++i) expect += 1.0 / (double(i + l) * (i + l));
            CHECK(rho[static_cast<std::size_t>(l)] == doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("one full sweep annihilates dirt when alpha = 0") {
    auto s = sp(4);
    Kernel zero(s);
    WeightVector w(s, 1.0);
    DirtVector c(s, 1.0);
    SiteSet lambda = SiteSet::all(4);
    Schedule sched = Schedule::of_profiles(lambda, {Profile::indicator(s, lambda)});
    RunOptions opts;
    opts.n_steps = 1;
    ConvergenceTrace tr = run_schedule(c, sched, zero, w, opts);
    CHECK(tr.rows.back().dirt_in_lambda == 0.0);
}

TEST_CASE("round-robin sweeps converge to the balayage") {
    std::mt19937_64 rng(21);
    int failures = 0;
    for (int t = 0; t < 30; ++t) {
        FhInstance inst = random_contraction(rng, 5, 0.9);
        BalayageResult pi = balayage(inst.alpha, inst.lambda, inst.w, 1e-14);
        REQUIRE(pi.converged);
        Schedule sched = round_robin_schedule(inst.lambda);
        RunOptions opts;
        opts.n_steps = 200;
        opts.balayage = &pi;
        ConvergenceTrace tr = run_schedule(inst.c, sched, inst.alpha, inst.w, opts);
        if (!(tr.rows.back().deviation <= 1e-8)) ++failures;
        // dirt left inside lambda is likewise gone
        CHECK(tr.rows.back().dirt_in_lambda <= 1e-8);
    }
    CHECK(failures == 0);
}

TEST_CASE("monotone comparison under profile refinement") {
    std::mt19937_64 rng(22);
    for (int t = 0; t < 15; ++t) {
        FhInstance inst = random_contraction(rng, 5, 0.9);
        BalayageResult pi = balayage(inst.alpha, inst.lambda, inst.w, 1e-14);
        REQUIRE(pi.converged);
        RunOptions opts;
        opts.n_steps = 120;
        opts.balayage = &pi;
        Schedule strong = round_robin_schedule(inst.lambda, 1.0);
        Schedule weak = round_robin_schedule(inst.lambda, 0.5);  // g_i = h_i / 2
        ConvergenceTrace th = run_schedule(inst.c, strong, inst.alpha, inst.w, opts);
        ConvergenceTrace tg = run_schedule(inst.c, weak, inst.alpha, inst.w, opts);
        REQUIRE(th.rows.size() == tg.rows.size());
        for (std::size_t i = 0; i < th.rows.size(); ++i)
            CHECK(th.rows[i].deviation <= tg.rows[i].deviation + 1e-12);
    }
}

TEST_CASE("stochastic mass conservation") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto s = sp(5);
    Kernel a(s);
    for (int i = 0; i < 5; ++i) {
        std::vector<double> row(5);
        double tot = 0.0;
        for (auto& v : row) {
            v = u(rng);
            tot += v;
        }
        for (int j = 0; j < 5; ++j) a.set(i, j, row[static_cast<std::size_t>(j)] / tot);
    }
    WeightVector w(s, 1.0);
    DirtVector c(s, 0.0);
    for (int i = 0; i < 5; ++i) c.set(i, u(rng));
    double total0 = weighted_vector_norm(c, w);

    Schedule sched = round_robin_schedule(SiteSet::all(5));
    RunOptions opts;
    opts.n_steps = 100;
    ConvergenceTrace tr = run_schedule(c, sched, a, w, opts);
    CHECK(weighted_vector_norm(tr.final_dirt, w) == doctest::Approx(total0).epsilon(1e-12));
}

TEST_CASE("uniform blocks give roughly linear log-deviation decay") {
    std::mt19937_64 rng(24);
    FhInstance inst = random_contraction(rng, 5, 0.8);
    BalayageResult pi = balayage(inst.alpha, inst.lambda, inst.w, 1e-14);
    REQUIRE(pi.converged);
    // one block = one full round of lambda: coverage >= 1 per block
    Schedule sched = round_robin_schedule(inst.lambda);
    std::size_t block = inst.lambda.count();
    RunOptions opts;
    opts.n_steps = static_cast<long>(block) * 40;
    opts.trace_every = static_cast<long>(block);
    opts.balayage = &pi;
    ConvergenceTrace tr = run_schedule(inst.c, sched, inst.alpha, inst.w, opts);

    std::vector<double> logs;
    for (const auto& row : tr.rows)
        if (row.deviation > 1e-13) logs.push_back(std::log(row.deviation));
    REQUIRE(logs.size() >= 6);
    // slopes between consecutive blocks: all negative beyond the first couple,
    // and the mean slope dominates the variation (roughly linear)
    std::vector<double> slopes;
    for (std::size_t i = 3; i + 1 < logs.size(); ++i) slopes.push_back(logs[i + 1] - logs[i]);
    double mean = 0.0;
    for (double sl : slopes) mean += sl;
    mean /= static_cast<double>(slopes.size());
    CHECK(mean < 0.0);
    for (double sl : slopes) CHECK(sl < 0.05);
}

TEST_CASE("slow schedule dominates the target sequence") {
    SUBCASE("delta = 0 returns full sweeps") {
        auto s = sp(3);
        DirtVector c(s, 0.0);
        c.set(0, 0.5);
        c.set(1, 0.25);
        SlowSchedule slow = slow_schedule(c, [](long) { return 0.0; }, 100);
        CHECK(slow.rates.at(0) == 1.0);
        CHECK(slow.rates.at(1) == 1.0);
    }

    SUBCASE("c_i = 2^{-i}, delta_N = 1/N") {
        // settling indices are N_i = 2^{i+1}, so the horizon must clear 2^{K+1}
        int K = 12;
        auto s = sp(static_cast<std::size_t>(K));
        DirtVector c(s, 0.0);
        for (int i = 0; i < K; ++i) c.set(i, std::exp2(-(i + 1)));
        long horizon = 20000;
        SlowSchedule slow = slow_schedule(c, [](long n) { return 1.0 / static_cast<double>(n); }, horizon);

        // run the schedule: alpha = 0, eps_N = sum_i c_i (1-h_i)^N
        std::vector<double> rates(static_cast<std::size_t>(K), 0.0);
        for (int i = 0; i < K; ++i) rates[static_cast<std::size_t>(i)] = slow.rates.at(i);
        std::vector<double> dirt = c.values();
        long bad = 0;
        for (long n = 1; n <= 10000; ++n) {
            double eps = 0.0;
            for (int i = 0; i < K; ++i) {
                dirt[static_cast<std::size_t>(i)] *= 1.0 - rates[static_cast<std::size_t>(i)];
                eps += dirt[static_cast<std::size_t>(i)];
            }
            if (n >= slow.guarantee_from && eps < 1.0 / static_cast<double>(n)) ++bad;
        }
        CHECK(slow.guarantee_from >= 1);
        CHECK(slow.guarantee_until >= 10000);
        CHECK(bad == 0);
    }

    SUBCASE("non-converging delta is a contract error") {
        auto s = sp(2);
        DirtVector c(s, 0.5);
        CHECK_THROWS_AS(slow_schedule(c, [](long) { return 1.0; }, 1000), contract_error);
    }
}

TEST_CASE("imitation epsilon") {
    std::mt19937_64 rng(25);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto s = sp(4);

    SUBCASE("kappa = 0 is a no-op") {
        Kernel a(s);
        Cloud nu = Cloud::rho(s, 0);
        DirtVector c(s, 1.0);
        CHECK(imitation_epsilon(c, nu, {0}, 0.0, a) == 0.0);
    }

    SUBCASE("full sweep of a fresh site gives epsilon = 1") {
        Kernel a(s);
        a.set(0, 1, 0.5);
        Cloud nu = Cloud::rho(s, 0);
        DirtVector c(s, 0.0);
        c.set(0, 2.0);
        CHECK(imitation_epsilon(c, nu, {0}, 1.0, a) == doctest::Approx(1.0));
    }

    SUBCASE("kappa beyond nu(eta) violates the contract") {
        Kernel a(s);
        Cloud nu = Cloud::rho(s, 0);
        DirtVector c(s, 1.0);
        CHECK_THROWS_AS(imitation_epsilon(c, nu, {0}, 1.5, a), contract_error);
    }

    SUBCASE("update identity c T_nu' = c T_nu beta_{eps delta_y} entrywise") {
        for (int t = 0; t < 200; ++t) {
            Kernel a(s);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    if (u(rng) < 0.6) a.set(i, j, u(rng));
            DirtVector c(s, 0.0);
            for (int i = 0; i < 4; ++i) c.set(i, u(rng));

            // random 0/1-ish cloud and a charged marker
            Cloud nu(s);
            std::uniform_int_distribution<int> usite(0, 3);
            Marker eta;
            int lvl = static_cast<int>(rng() % 3);
            for (int i = 0; i <= lvl; ++i) eta.push_back(usite(rng));
            nu.set(eta, 0.5 + 0.5 * u(rng));
            for (int e = 0; e < 4; ++e) {
                Marker m;
                int l2 = static_cast<int>(rng() % 3);
                for (int i = 0; i <= l2; ++i) m.push_back(usite(rng));
                nu.add(m, u(rng));
            }
            double kappa = u(rng) * nu.value(eta);

            double eps = imitation_epsilon(c, nu, eta, kappa, a);
            REQUIRE(eps >= 0.0);
            REQUIRE(eps <= 1.0);

            // nu': move kappa from eta to all children
            Cloud nup = nu;
            nup.add(eta, -kappa);
            for (int y = 0; y < 4; ++y) {
                Marker child = eta;
                child.push_back(static_cast<site_index>(y));
                nup.add(child, kappa);
            }
            SignedVector lhs = apply_kernel(c, realize(nup, a));
            DirtVector mid(s, 0.0);
            SignedVector base = apply_kernel(c, realize(nu, a));
            for (int i = 0; i < 4; ++i) mid.set(i, std::max(0.0, base[i]));
            DirtVector rhs = apply_cleaning(
                mid, CleaningOperator(Profile::delta(s, marker_last(eta), eps), a));
            for (int i = 0; i < 4; ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
        }
    }
}

TEST_CASE("planner") {
    SUBCASE("alpha = 0: single full sweep of the support") {
        auto s = sp(3);
        Kernel zero(s);
        WeightVector w(s, 1.0);
        DirtVector c(s, 0.0);
        c.set(0, 1.0);
        c.set(2, 0.5);
        SiteSet lambda = SiteSet::all(3);
        ScaledSchedule plan = plan_cleaning(c, w, zero, lambda);
        REQUIRE(plan.sites.size() == 2);
        CHECK(plan.scales[0] == 1.0);
        CHECK(plan.scales[1] == 1.0);
    }

    SUBCASE("random contraction instances: dirt below 1e-6") {
        std::mt19937_64 rng(26);
        for (int t = 0; t < 20; ++t) {
            FhInstance inst = random_contraction(rng, 6, 0.9);
            PlanOptions popts;
            popts.dirt_target = 1e-8;
            ScaledSchedule plan = plan_cleaning(inst.c, inst.w, inst.alpha, inst.lambda, popts);
            Schedule sched = plan.to_schedule(inst.space);
            RunOptions opts;
            opts.n_steps = static_cast<long>(plan.sites.size());
            ConvergenceTrace tr = run_schedule(inst.c, sched, inst.alpha, inst.w, opts);
            CHECK(tr.rows.back().dirt_in_lambda <= 1e-6);
        }
    }

    SUBCASE("non-decaying instances are rejected") {
        auto s = sp(2);
        Kernel cyc(s);  // 2-cycle keeps mass forever
        cyc.set(0, 1, 1.0);
        cyc.set(1, 0, 1.0);
        WeightVector w(s, 1.0);
        DirtVector c(s, 1.0);
        CHECK_THROWS_AS(plan_cleaning(c, w, cyc, SiteSet::all(2)), nonconvergence_error);
    }
}

TEST_CASE("planner on the branch-capacity tree meets the stagewise bound") {
    // decaying rho_k so the decay probe admits the instance; with ratio 1/2
    // the per-branch first-level splits dominate the deeper ones termwise
    GalleryInstance g = build_gallery("good_sweep_tree", {{"L", 32.0}, {"rho_ratio", 0.5}});
    PlanOptions popts;
    popts.dirt_target = 1e-10;
    ScaledSchedule plan = plan_cleaning(g.c, g.w, g.alpha, g.lambda, popts);
    REQUIRE(plan.stage_ends.size() >= 8);

    Schedule sched = plan.to_schedule(g.space);
    RunOptions opts;
    opts.n_steps = static_cast<long>(plan.sites.size());
    opts.trace_every = opts.n_steps + 1;
    opts.record_at = plan.stage_ends;
    ConvergenceTrace tr = run_schedule(g.c, sched, g.alpha, g.w, opts);

    // planned dirt after stage s <= sigma_{s+1} + sum_{l' >= s+2} gamma_{1,l'}
    for (std::size_t s = 1; s + 1 < plan.stage_ends.size() && s < g.stage_bounds.size(); ++s) {
        CAPTURE(s);
        CHECK(tr.rows[s].dirt_in_lambda <= g.stage_bounds[s - 1] + 1e-12);
    }
    CHECK(tr.rows.back().dirt_in_lambda <= 1e-8);
}

TEST_CASE("slow schedule reproduces the selection chain") {
    // delta_N <= c_i/2 <= c_i (1-h_i)^{N_{i+1}} <= eps_N on [N_i, N_{i+1}]
    int K = 8;
    auto s = sp(static_cast<std::size_t>(K));
    DirtVector c(s, 0.0);
    for (int i = 0; i < K; ++i) c.set(i, std::exp2(-(i + 1)));
    auto delta = [](long n) { return 1.0 / static_cast<double>(n); };
    SlowSchedule slow = slow_schedule(c, delta, 4000);
    REQUIRE(slow.settle_indices.size() == static_cast<std::size_t>(K) + 1);
    for (int i = 0; i < K; ++i) {
        long ni = slow.settle_indices[static_cast<std::size_t>(i)];
        long nip1 = slow.settle_indices[static_cast<std::size_t>(i) + 1];
        double ci = c[static_cast<site_index>(i)];
        double hi = slow.rates.at(static_cast<site_index>(i));
        CHECK(ni < nip1);
        CHECK(delta(ni) <= ci / 2.0);
        CHECK(ci / 2.0 <= ci * std::pow(1.0 - hi, static_cast<double>(nip1)) + 1e-15);
    }
}

TEST_CASE("uniform coverage gives exponential operator-norm decay") {
    std::mt19937_64 rng(27);
    FhInstance inst = random_contraction(rng, 5, 0.8);
    BalayageResult pi = balayage(inst.alpha, inst.lambda, inst.w, 1e-14);
    REQUIRE(pi.converged);
    DMat pim = DMat::from_kernel(pi.matrix);

    // blocks: one full round of lambda at eps = 1, i.e. coverage delta = 1
    DMat block = DMat::identity(5);
    for (site_index x : inst.lambda.members())
        block = block * dense_cleaning(Profile::delta(inst.space, x), DMat::from_kernel(inst.alpha));

    DMat prod = DMat::identity(5);
    std::vector<double> lognorm;
    for (int b = 0; b < 24; ++b) {
        prod = prod * block;
        double n = dense_operator_norm(prod - pim, inst.w);
        if (n > 1e-13) lognorm.push_back(std::log(n));
    }
    REQUIRE(lognorm.size() >= 6);
    std::vector<double> slopes;
    for (std::size_t i = 2; i + 1 < lognorm.size(); ++i) slopes.push_back(lognorm[i + 1] - lognorm[i]);
    double mean = 0.0, lo = slopes.front(), hi = slopes.front();
    for (double sl : slopes) {
        mean += sl;
        lo = std::min(lo, sl);
        hi = std::max(hi, sl);
    }
    mean /= static_cast<double>(slopes.size());
    CHECK(mean < -0.1);              // strictly contracting per block
    CHECK(hi - lo < 0.5 * (-mean));  // and roughly linear in block count
}

TEST_CASE("csv layout") {
    auto s = sp(2);
    Kernel a(s);
    WeightVector w(s, 1.0);
    DirtVector c(s, 1.0);
    Schedule sched = round_robin_schedule(SiteSet::all(2));
    RunOptions opts;
    opts.n_steps = 3;
    opts.seed = 99;
    ConvergenceTrace tr = run_schedule(c, sched, a, w, opts);
    std::string csv = trace_to_csv(tr);
    CHECK(csv.find("# seed=99") == 0);
    CHECK(csv.find("n,dirt_in_lambda,deviation,coverage_min,coverage_max") != std::string::npos);
}
