#include "cleankit/cloud_verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cleankit {

namespace {

std::uint64_t fnv1a_mix(std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

double dyadic64(std::mt19937_64& rng, int lo = 0, int hi = 64) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng) / 64.0;
}

Marker drop_last(const Marker& m) { return Marker(m.begin(), m.end() - 1); }

Marker suffix_from(const Marker& m, std::size_t j) { return Marker(m.begin() + static_cast<long>(j), m.end()); }

// (a * b)(m) evaluated pointwise with b given as a value functional
double conv_value(const Cloud& a, const std::function<double(const Marker&)>& b, const Marker& m) {
    double s = 0.0;
    Marker prefix;
    prefix.reserve(m.size());
    for (std::size_t j = 0; j < m.size(); ++j) {
        prefix.push_back(m[j]);
        double av = a.value(prefix);
        if (av != 0.0) s += av * b(suffix_from(m, j));
    }
    return s;
}

struct Check {
    double max_residual = 0.0;
    void residual(double r) { max_residual = std::max(max_residual, std::abs(r)); }
    void violation(double lhs_minus_rhs) { max_residual = std::max(max_residual, std::max(0.0, lhs_minus_rhs)); }
};

CloudVerifyReport finish(const std::string& name, const CloudInstance& inst, const Check& c) {
    CloudVerifyReport rep;
    rep.name = name;
    rep.instance_digest = inst.digest();
    rep.max_residual = c.max_residual;
    rep.pass = c.max_residual <= 1e-10;
    return rep;
}

// nu with norm <= 1, carried by lambda, nu((x)) = 1 off lambda and
// <= 3/4 on lambda: the shape the carried-series lower bound needs.
Cloud carried_variant(const CloudInstance& inst) {
    Cloud out(inst.space);
    inst.nu.for_each([&](const Marker& m, double w) {
        for (std::size_t i = 0; i + 1 < m.size(); ++i)
            if (!inst.lambda.contains(m[i])) return;
        if (m.size() == 1 && !inst.lambda.contains(m[0])) return;
        out.add(m, w * 0.75);
    });
    for (std::size_t x = 0; x < inst.space->size(); ++x) {
        site_index xi = static_cast<site_index>(x);
        if (!inst.lambda.contains(xi)) out.set({xi}, 1.0);
    }
    return out;
}

// Lambda-regular beta-product with level-0 values < 1 on lambda.
Cloud regular_variant(const CloudInstance& inst) {
    Cloud out = Cloud::beta(inst.lambda_profiles.at(0));
    for (std::size_t i = 1; i < std::min<std::size_t>(2, inst.lambda_profiles.size()); ++i)
        out = convolve(out, Cloud::beta(inst.lambda_profiles[i]));
    return out;
}

// Runs the truncated power chain of nu from `start` (rho^0 when absent),
// feeding each power to `on_power`, until n_max or until the power's mass
// under the cap drops below `stop_below` (early exit for series limits).
template <typename F>
int power_chain(const CloudInstance& inst, const Cloud& nu, int n_max, double stop_below,
                const F& on_power, const Cloud* start = nullptr) {
    Cloud pw = start ? *start : Cloud::rho(inst.space, 0);
    int n = 0;
    on_power(n, pw);
    while (n < n_max) {
        pw = truncate(convolve(pw, nu), inst.level_cap);
        ++n;
        on_power(n, pw);
        if (stop_below > 0.0) {
            double big = 0.0;
            pw.for_each([&](const Marker& mm, double ww) {
                (void)mm;
                big = std::max(big, std::abs(ww));
            });
            if (big * (inst.level_cap + 1.0) < stop_below) break;
        }
    }
    return n;
}

}  // namespace

std::string CloudInstance::digest() const {
    std::uint64_t h = 1469598103934665603ull;
    mu.for_each([&](const Marker& m, double w) {
        for (site_index x : m) h = fnv1a_mix(h, static_cast<std::uint64_t>(x));
        h = fnv1a_mix(h, static_cast<std::uint64_t>(w * 64.0));
    });
    nu.for_each([&](const Marker& m, double w) {
        for (site_index x : m) h = fnv1a_mix(h, static_cast<std::uint64_t>(x) + 17);
        h = fnv1a_mix(h, static_cast<std::uint64_t>(w * 64.0));
    });
    for (site_index x : lambda.members()) h = fnv1a_mix(h, static_cast<std::uint64_t>(x) + 101);
    h = fnv1a_mix(h, seed);
    return hex64(h);
}

CloudInstance random_cloud_instance(std::mt19937_64& rng, const CloudInstanceOptions& opts) {
    if (opts.n_sites < 2) throw contract_error("random_cloud_instance: need at least 2 sites");
    auto space = std::make_shared<SiteSpace>(numbered_space(static_cast<std::size_t>(opts.n_sites)));

    CloudInstance inst{space, SiteSet(space->size()), {}, {}, Cloud(space), Cloud(space)};
    inst.level_cap = opts.level_cap;
    inst.seed = rng();

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < opts.n_sites; ++i)
        if (u01(rng) < 0.5) inst.lambda.insert(i);
    if (inst.lambda.empty()) inst.lambda.insert(static_cast<site_index>(rng() % opts.n_sites));
    if (inst.lambda.is_all()) inst.lambda.erase(static_cast<site_index>(rng() % opts.n_sites));

    // first lambda profile strictly positive on lambda (supp = lambda)
    {
        Profile p(space);
        for (site_index x : inst.lambda.members()) p.set(x, dyadic64(rng, 16, 48));
        inst.lambda_profiles.push_back(std::move(p));
    }
    for (int k = 0; k < 3; ++k) {
        Profile p(space);
        for (site_index x : inst.lambda.members())
            if (u01(rng) < 0.8) p.set(x, dyadic64(rng, 0, 64));
        inst.lambda_profiles.push_back(std::move(p));
    }
    for (int k = 0; k < 3; ++k) {
        Profile p(space);
        for (int x = 0; x < opts.n_sites; ++x)
            if (u01(rng) < 0.8) p.set(x, dyadic64(rng, 0, 64));
        inst.profiles.push_back(std::move(p));
    }

    auto random_cloud = [&](int max_level, int entries) {
        Cloud c(space);
        std::uniform_int_distribution<int> ulev(0, max_level);
        std::uniform_int_distribution<int> usite(0, opts.n_sites - 1);
        for (int e = 0; e < entries; ++e) {
            int lvl = ulev(rng);
            Marker m;
            for (int i = 0; i <= lvl; ++i) m.push_back(usite(rng));
            c.add(m, dyadic64(rng, 1, 32));
        }
        return c;
    };
    inst.mu = random_cloud(opts.cloud_levels, 8);
    inst.nu = random_cloud(opts.cloud_levels, 8);
    // scale nu to norm <= 1 by a power of two, keeping weights dyadic
    double n = inst.nu.norm();
    if (n > 1.0) inst.nu = inst.nu.scaled(std::exp2(-std::ceil(std::log2(n))));
    return inst;
}

std::vector<std::string> cloud_identity_names() {
    return {"cumulative_convolution", "cumulative_beta",   "collapse_clouds",
            "cumulative_bound",       "geometric_cloud",   "complement_series",
            "comparison_regular",     "pi_decomposition",  "pi_absorb",
            "lambda_regular_identities"};
}

CloudVerifyReport verify_cloud_identity(const std::string& name, const CloudInstance& inst) {
    const SiteSpace& space = *inst.space;
    const int cap = inst.level_cap;
    Check ck;

    if (name == "cumulative_convolution") {
        Cloud conv = convolve(inst.mu, inst.nu);
        for_each_marker(space, cap, [&](const Marker& m) {
            double rhs = conv_value(inst.mu, [&](const Marker& s) { return inst.nu.cumulative(s); }, m);
            ck.residual(conv.cumulative(m) - rhs);
            return true;
        });
        return finish(name, inst, ck);
    }
    if (name == "cumulative_beta") {
        const Profile& h = inst.profiles.at(0);
        Cloud bh = Cloud::beta(h);
        Cloud mb = convolve(inst.mu, bh);
        for_each_marker(space, cap, [&](const Marker& m) {
            double tilde = marker_level(m) == 0 ? 1.0 - h.at(m[0]) : 1.0;
            ck.residual(bh.cumulative(m) - tilde);
            double rhs = inst.mu.cumulative(m) - inst.mu.value(m) * h.at(marker_last(m));
            ck.residual(mb.cumulative(m) - rhs);
            return true;
        });
        return finish(name, inst, ck);
    }
    if (name == "collapse_clouds") {
        const Profile& g = inst.profiles.at(0);
        const Profile& h = inst.profiles.at(1);
        Cloud gh = convolve(Cloud::beta(g), Cloud::beta(h));
        for_each_marker(space, cap, [&](const Marker& m) {
            double comb0 = 1.0 - (1.0 - g.at(m[0])) * (1.0 - h.at(m[0]));
            double tilde_comb = marker_level(m) == 0 ? 1.0 - comb0 : 1.0;
            double cross = marker_level(m) == 1 ? g.at(m[0]) * h.at(m[1]) : 0.0;
            ck.residual(gh.cumulative(m) - (tilde_comb - cross));
            return true;
        });
        return finish(name, inst, ck);
    }
    if (name == "cumulative_bound") {
        Cloud conv = convolve(inst.mu, inst.nu);
        double norm_nu = inst.nu.norm();
        for_each_marker(space, cap, [&](const Marker& m) {
            double lhs = conv.cumulative(m);
            double anc = m.size() > 1 ? inst.mu.cumulative(drop_last(m)) : 0.0;
            double rhs = anc * norm_nu + inst.mu.value(m) * inst.nu.value({marker_last(m)});
            ck.violation(lhs - rhs);
            return true;
        });
        return finish(name, inst, ck);
    }
    if (name == "geometric_cloud") {
        // supp h = lambda: sum_{k<=N} beta_h^{*k} * I_h = 1 - cum(beta_h^{*(N+1)})
        // exactly at every N, and the series limit is 1_Lambda
        const Profile& h = inst.lambda_profiles.at(0);
        Cloud bh = Cloud::beta(h);
        std::vector<Marker> all;
        for_each_marker(space, cap, [&](const Marker& m) {
            all.push_back(m);
            return true;
        });
        std::vector<double> sums(all.size(), 0.0);
        const int exactN = 8;
        Cloud pw = Cloud::rho(inst.space, 0);
        for (int k = 0; k <= exactN; ++k) {
            for (std::size_t i = 0; i < all.size(); ++i)
                sums[i] += pw.value(all[i]) * h.at(marker_last(all[i]));
            pw = truncate(convolve(pw, bh), cap);
        }
        for (std::size_t i = 0; i < all.size(); ++i)
            ck.residual(sums[i] - (1.0 - pw.cumulative(all[i])));  // exact telescoping

        // limit: continue the power chain until its mass under the cap dies
        Cloud tail_power = pw;
        power_chain(inst, bh, 512, 1e-13, [&](int n, const Cloud& p) {
            (void)n;
            tail_power = p;
        }, &pw);
        SpecialCloud onel = make_one_lambda(inst.lambda);
        for (std::size_t i = 0; i < all.size(); ++i)
            ck.residual((1.0 - tail_power.cumulative(all[i])) - special_value(onel, all[i]));

        // part (b): partial sums of nu^{*k} * I_{h_nu} stay below 1
        Profile hnu(inst.space);
        for (std::size_t x = 0; x < space.size(); ++x) {
            double v = 1.0 - inst.nu.value({static_cast<site_index>(x)});
            hnu.set(static_cast<site_index>(x), std::min(1.0, std::max(0.0, v)));
        }
        std::vector<double> sums2(all.size(), 0.0);
        Cloud qw = Cloud::rho(inst.space, 0);
        for (int k = 0; k <= 24; ++k) {
            for (std::size_t i = 0; i < all.size(); ++i)
                sums2[i] += qw.value(all[i]) * hnu.at(marker_last(all[i]));
            qw = truncate(convolve(qw, inst.nu), cap);
        }
        for (std::size_t i = 0; i < all.size(); ++i) ck.violation(sums2[i] - 1.0);
        return finish(name, inst, ck);
    }
    if (name == "complement_series") {
        std::vector<Marker> all;
        for_each_marker(space, cap, [&](const Marker& m) {
            all.push_back(m);
            return true;
        });
        auto run_case = [&](const Cloud& nu, bool check_lower_lambda, bool check_mu_support) {
            auto mu_of = [&](const Marker& m) { return 1.0 - nu.cumulative(m); };
            // (a) I_h <= mu <= 1
            for (const Marker& m : all) {
                double mv = mu_of(m);
                ck.violation(mv - 1.0);
                ck.violation(-mv);
                if (m.size() == 1) ck.violation((1.0 - nu.value(m)) - mv);
            }
            // exact telescoping at small N:
            // sum_{n<N} nu^{*n} * mu = 1 - cum(nu^{*N})
            const int exactN = 8;
            std::vector<double> sums(all.size(), 0.0);
            Cloud pw = Cloud::rho(inst.space, 0);
            for (int n = 0; n < exactN; ++n) {
                for (std::size_t i = 0; i < all.size(); ++i)
                    sums[i] += conv_value(pw, mu_of, all[i]);
                pw = truncate(convolve(pw, nu), cap);
            }
            for (std::size_t i = 0; i < all.size(); ++i) {
                ck.residual(sums[i] - (1.0 - pw.cumulative(all[i])));
                ck.violation(sums[i] - 1.0);
            }
            if (check_lower_lambda) {
                // series limit >= 1_Lambda: run the chain to extinction and
                // use S_N = 1 - cum(nu^{*N})
                Cloud tail_power = pw;
                power_chain(inst, nu, 512, 1e-13, [&](int n, const Cloud& p) {
                    (void)n;
                    tail_power = p;
                }, &pw);
                SpecialCloud onel = make_one_lambda(inst.lambda);
                for (std::size_t i = 0; i < all.size(); ++i)
                    ck.violation(special_value(onel, all[i]) -
                                 (1.0 - tail_power.cumulative(all[i])));
            }
            if (check_mu_support) {
                for (const Marker& m : all) {
                    bool inside = true;
                    for (site_index x : m)
                        if (!inst.lambda.contains(x)) inside = false;
                    if (!inside) ck.residual(mu_of(m));
                }
            }
        };
        run_case(inst.nu, false, false);
        run_case(carried_variant(inst), true, false);

        Cloud reg = regular_variant(inst);
        run_case(reg, true, true);
        // (c) first equality: restricted powers agree after convolving with mu
        {
            auto mu_of = [&](const Marker& m) { return 1.0 - reg.cumulative(m); };
            Cloud ilam = Cloud::diag_set(inst.space, inst.lambda);
            Cloud restricted = convolve(convolve(ilam, reg), ilam);
            Cloud p1 = Cloud::rho(inst.space, 0), p2 = Cloud::rho(inst.space, 0);
            for (int n = 0; n <= 6; ++n) {
                for (const Marker& m : all)
                    ck.residual(conv_value(p1, mu_of, m) - conv_value(p2, mu_of, m));
                p1 = truncate(convolve(p1, reg), cap);
                p2 = truncate(convolve(p2, restricted), cap);
            }
        }
        // (d) beta-products lie in S_1; mu then lives strictly below their level
        {
            Cloud nd = convolve(Cloud::beta(inst.profiles.at(0)), Cloud::beta(inst.profiles.at(1)));
            for (const Marker& m : all)
                if (marker_level(m) >= 2) ck.residual(1.0 - nd.cumulative(m));
        }
        return finish(name, inst, ck);
    }
    if (name == "comparison_regular") {
        Cloud mu = regular_variant(inst);
        Cloud nu = convolve(Cloud::beta(inst.lambda_profiles.at(1)), Cloud::beta(inst.lambda_profiles.at(2)));
        Cloud d = (mu - nu).abs();
        Cloud dl = convolve(d, Cloud::diag_set(inst.space, inst.lambda));
        for_each_marker(space, cap, [&](const Marker& m) {
            ck.violation(d.cumulative(m) - 2.0 * dl.cumulative(m));
            return true;
        });
        return finish(name, inst, ck);
    }
    if (name == "pi_decomposition") {
        Cloud mu = regular_variant(inst);
        Cloud mul = convolve(mu, Cloud::diag_set(inst.space, inst.lambda));
        Cloud muc = convolve(mu, Cloud::diag_set(inst.space, inst.lambda.complement()));
        SpecialCloud pi = make_pi_lambda(inst.lambda);
        for_each_marker(space, cap, [&](const Marker& m) {
            double piv = special_value(pi, m);
            double lhs = mu.value(m) - piv;
            double rhs = mul.value(m) - convolve_pi_value(mul, inst.lambda, m);
            ck.residual(lhs - rhs);
            double rem = piv - muc.value(m);  // = (mu * I_L * pi)(m) >= 0
            ck.violation(-rem);
            ck.residual(rem - convolve_pi_value(mul, inst.lambda, m));
            // the remainder sits below mu * I_Lambda in the cumulative order
            ck.violation(convolve_pi_cumulative(mul, inst.lambda, m) - mul.cumulative(m));
            // support claims
            bool inside = true;
            for (site_index x : m)
                if (!inst.lambda.contains(x)) inside = false;
            if (!inside) ck.residual(mul.value(m));
            bool boundary = !inst.lambda.contains(m.back());
            for (std::size_t i = 0; i + 1 < m.size() && boundary; ++i)
                if (!inst.lambda.contains(m[i])) boundary = false;
            if (!boundary) ck.residual(rem);
            return true;
        });
        return finish(name, inst, ck);
    }
    if (name == "pi_absorb") {
        Cloud mu = regular_variant(inst);
        SpecialCloud pi = make_pi_lambda(inst.lambda);
        for_each_marker(space, cap, [&](const Marker& m) {
            double piv = special_value(pi, m);
            ck.residual(convolve_pi_value(mu, inst.lambda, m) - piv);
            // pi * mu = pi: split at boundary prefixes
            double s = 0.0;
            Marker prefix;
            for (std::size_t j = 0; j < m.size(); ++j) {
                prefix.push_back(m[j]);
                if (special_value(pi, prefix) != 0.0) s += mu.value(suffix_from(m, j));
            }
            ck.residual(s - piv);
            return true;
        });
        // pi * pi = pi through the special-pair rule
        SpecialCloud pp = convolve(pi, pi);
        (void)pp;
        return finish(name, inst, ck);
    }
    if (name == "lambda_regular_identities") {
        Cloud mu = regular_variant(inst);
        Cloud ilamc = Cloud::diag_set(inst.space, inst.lambda.complement());
        Cloud ilam = Cloud::diag_set(inst.space, inst.lambda);
        Cloud lhs1 = convolve(ilamc, mu);
        Cloud lhs2 = convolve(convolve(ilam, mu), ilam);
        Cloud rhs2 = convolve(mu, ilam);
        for_each_marker(space, cap, [&](const Marker& m) {
            ck.residual(lhs1.value(m) - ilamc.value(m));
            ck.residual(lhs2.value(m) - rhs2.value(m));
            return true;
        });
        return finish(name, inst, ck);
    }
    throw contract_error("verify_cloud_identity: unknown identity '" + name + "'");
}

std::vector<CloudVerifyReport> run_cloud_suite(const std::vector<std::string>& names, int trials,
                                               std::uint64_t seed,
                                               const CloudInstanceOptions& opts) {
    std::vector<std::string> run = names.empty() ? cloud_identity_names() : names;
    std::vector<CloudVerifyReport> out;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        CloudInstance inst = random_cloud_instance(rng, opts);
        for (const auto& n : run) out.push_back(verify_cloud_identity(n, inst));
    }
    return out;
}

}  // namespace cleankit
