#include "cleankit/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace cleankit {

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

DMat diag_values(const std::vector<double>& d) { return DMat::diagonal(d); }

DMat beta_product(const std::vector<Profile>& hs, const DMat& a, bool dual = false) {
    DMat m = DMat::identity(a.size());
    for (const auto& h : hs) m = m * dense_cleaning(h, a, dual);
    return m;
}

Profile combined_profile(const std::vector<Profile>& hs) {
    Profile out(hs.front().space_ptr());
    std::size_t n = out.space().size();
    for (std::size_t x = 0; x < n; ++x) {
        double q = 1.0;
        for (const auto& h : hs) q *= 1.0 - h.at(static_cast<site_index>(x));
        out.set(static_cast<site_index>(x), 1.0 - q);
    }
    return out;
}

double scale_of(const DMat& a, const DMat& b) {
    return std::max(1.0, std::max(a.max_abs(), b.max_abs()));
}

VerifyReport identity_report(const std::string& name, const VerifyInstance& inst, const DMat& lhs,
                             const DMat& rhs) {
    VerifyReport rep;
    rep.name = name;
    rep.instance_digest = inst.digest();
    rep.is_identity = true;
    rep.max_residual = (lhs - rhs).max_abs();
    rep.pass = rep.max_residual <= 1e-10 * scale_of(lhs, rhs);
    return rep;
}

// f with chi_Lambda <= f <= 1, deterministic from the instance seed
Profile dominating_profile(const VerifyInstance& inst) {
    std::mt19937_64 rng(inst.seed ^ 0x5f5f5f5fULL);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Profile f(inst.space);
    for (std::size_t x = 0; x < inst.space->size(); ++x) {
        site_index xi = static_cast<site_index>(x);
        f.set(xi, inst.lambda.contains(xi) ? 1.0 : u(rng));
    }
    return f;
}

std::vector<double> ones_on_lambda_random_outside(const VerifyInstance& inst, std::uint64_t salt) {
    std::mt19937_64 rng(inst.seed ^ salt);
    std::uniform_real_distribution<double> u(-1.0, 2.0);
    std::vector<double> h(inst.space->size());
    for (std::size_t x = 0; x < h.size(); ++x)
        h[x] = inst.lambda.contains(static_cast<site_index>(x)) ? 1.0 : u(rng);
    return h;
}

// h strictly positive exactly on lambda
Profile full_support_profile(const VerifyInstance& inst) {
    std::mt19937_64 rng(inst.seed ^ 0x9e3779b9ULL);
    std::uniform_real_distribution<double> u(0.1, 1.0);
    Profile h(inst.space);
    for (site_index x : inst.lambda.members()) h.set(x, u(rng));
    return h;
}

DMat restrict_both(const DMat& m, const DMat& ilam) { return ilam * m * ilam; }

}  // namespace

std::string VerifyInstance::digest() const {
    std::string s;
    s.reserve(256);
    for (std::size_t r = 0; r < alpha.size(); ++r)
        for (const auto& e : alpha.row(static_cast<site_index>(r))) {
            s += std::to_string(r);
            s += ':';
            s += std::to_string(e.col);
            s += ':';
            s += std::to_string(e.value);
            s += ';';
        }
    for (double v : w.values()) {
        s += std::to_string(v);
        s += ',';
    }
    for (site_index x : lambda.members()) {
        s += std::to_string(x);
        s += '|';
    }
    s += std::to_string(seed);
    return hex64(fnv1a(s));
}

VerifyInstance random_instance(std::mt19937_64& rng, const InstanceOptions& opts) {
    auto space = std::make_shared<SiteSpace>(numbered_space(static_cast<std::size_t>(opts.n_sites)));
    std::uniform_real_distribution<double> uval(0.1, 1.0);
    std::uniform_real_distribution<double> u01(0.0, 1.0);

    Kernel alpha(space);
    for (int r = 0; r < opts.n_sites; ++r)
        for (int c = 0; c < opts.n_sites; ++c)
            if (u01(rng) < opts.density) alpha.set(r, c, uval(rng));

    WeightVector w(space, 1.0);
    for (int i = 0; i < opts.n_sites; ++i) w.set(i, 0.5 + 1.5 * u01(rng));

    if (opts.ensure_fh) {
        std::uniform_real_distribution<double> utheta(0.2, opts.theta_max);
        for (int x = 0; x < opts.n_sites; ++x) {
            double s = 0.0;
            for (const auto& e : alpha.row(x)) s += e.value * w[e.col];
            if (s > 0.0) alpha.scale_row(x, utheta(rng) * w[x] / s);
        }
    }

    VerifyInstance inst(space, std::move(alpha), std::move(w));
    inst.fh = opts.ensure_fh;
    inst.seed = rng();

    inst.lambda = SiteSet(static_cast<std::size_t>(opts.n_sites));
    for (int i = 0; i < opts.n_sites; ++i)
        if (u01(rng) < 0.5) inst.lambda.insert(i);
    if (inst.lambda.empty()) inst.lambda.insert(static_cast<site_index>(rng() % opts.n_sites));
    if (inst.lambda.is_all()) inst.lambda.erase(static_cast<site_index>(rng() % opts.n_sites));

    for (int k = 0; k < opts.n_profiles; ++k) {
        Profile p(space);
        for (int x = 0; x < opts.n_sites; ++x)
            if (u01(rng) < 0.7) p.set(x, u01(rng));
        inst.profiles.push_back(std::move(p));
    }
    for (int k = 0; k < opts.n_lambda_profiles; ++k) {
        Profile p(space);
        for (site_index x : inst.lambda.members())
            if (u01(rng) < 0.8) p.set(x, u01(rng));
        inst.lambda_profiles.push_back(std::move(p));
    }
    return inst;
}

std::vector<std::string> identity_names() {
    return {"intertwining_I",     "intertwining_II", "comparison",
            "collapse",           "telescoping",     "restricted_support",
            "pi_properties",      "convergence_to_balayage", "geometric_identity"};
}

std::vector<std::string> inequality_names() {
    return {"positivity_lemma",      "multi_monotonicity", "collapse_inequality",
            "multi_collapse",        "reverse_multi",      "reverse_collapse",
            "reverse_multi_collapse", "pi_comparison",     "cleaner_comparison",
            "geometric_series_bound", "hardest_bound",     "betastar_sum"};
}

VerifyReport verify_identity(const std::string& name, const VerifyInstance& inst) {
    const DMat a = DMat::from_kernel(inst.alpha);
    const DMat id = DMat::identity(a.size());
    const DMat ilam = dense_diag_set(inst.lambda);
    const DMat ilamc = dense_diag_set(inst.lambda.complement());

    if (name == "restricted_support" || name == "pi_properties" ||
        name == "convergence_to_balayage" || name == "geometric_identity") {
        for (const auto& p : inst.lambda_profiles)
            if (!p.supported_in(inst.lambda))
                throw contract_error("verify_identity: " + name +
                                     " requires supp(h_i) inside lambda");
    }

    if (name == "intertwining_I") {
        const Profile& h = inst.profiles.at(0);
        DMat lhs = (id - a) * dense_cleaning(h, a);
        DMat rhs = dense_cleaning(h, a, true) * (id - a);
        return identity_report(name, inst, lhs, rhs);
    }
    if (name == "intertwining_II") {
        const Profile& h1 = inst.profiles.at(0);
        const Profile& h2 = inst.profiles.at(1);
        DMat lhs = (dense_cleaning(h1, a) - id) * dense_diag_profile(h2);
        DMat rhs = dense_diag_profile(h1) * (dense_cleaning(h2, a, true) - id);
        // second form: beta_h I_h = I_h beta*_h
        DMat lhs2 = dense_cleaning(h1, a) * dense_diag_profile(h1);
        DMat rhs2 = dense_diag_profile(h1) * dense_cleaning(h1, a, true);
        VerifyReport rep = identity_report(name, inst, lhs, rhs);
        double r2 = (lhs2 - rhs2).max_abs();
        rep.max_residual = std::max(rep.max_residual, r2);
        rep.pass = rep.pass && r2 <= 1e-10 * scale_of(lhs2, rhs2);
        return rep;
    }
    if (name == "comparison") {
        const Profile& h1 = inst.profiles.at(0);
        const Profile& h2 = inst.profiles.at(1);
        std::vector<double> d(inst.space->size());
        for (std::size_t x = 0; x < d.size(); ++x)
            d[x] = h2.at(static_cast<site_index>(x)) - h1.at(static_cast<site_index>(x));
        DMat lhs = dense_cleaning(h1, a) - dense_cleaning(h2, a);
        DMat rhs = diag_values(d) * (id - a);
        return identity_report(name, inst, lhs, rhs);
    }
    if (name == "collapse") {
        const Profile& h1 = inst.profiles.at(0);
        const Profile& h2 = inst.profiles.at(1);
        DMat lhs = dense_cleaning(h1, a) * dense_cleaning(h2, a);
        DMat rhs = dense_cleaning(combined_profile({h1, h2}), a) -
                   dense_diag_profile(h1) * a * dense_diag_profile(h2) * (id - a);
        return identity_report(name, inst, lhs, rhs);
    }
    if (name == "telescoping") {
        std::size_t n = inst.profiles.size() / 2;
        std::vector<Profile> g(inst.profiles.begin(), inst.profiles.begin() + n);
        std::vector<Profile> h(inst.profiles.begin() + n, inst.profiles.begin() + 2 * n);
        DMat lhs = beta_product(g, a) - beta_product(h, a);
        DMat rhs(a.size());
        for (std::size_t i = 0; i < n; ++i) {
            DMat left = beta_product({g.begin(), g.begin() + i}, a);
            DMat right = beta_product({h.begin() + i + 1, h.end()}, a);
            std::vector<double> d(inst.space->size());
            for (std::size_t x = 0; x < d.size(); ++x)
                d[x] = h[i].at(static_cast<site_index>(x)) - g[i].at(static_cast<site_index>(x));
            rhs = rhs + left * diag_values(d) * (id - a) * right;
        }
        return identity_report(name, inst, lhs, rhs);
    }
    if (name == "restricted_support") {
        const auto& gs = inst.lambda_profiles;
        std::size_t n = std::min<std::size_t>(3, gs.size());
        std::vector<Profile> g(gs.begin(), gs.begin() + n);
        DMat lhs = beta_product(g, a) * ilam;
        DMat rhs = id;
        for (std::size_t i = 0; i < n; ++i)
            rhs = rhs * diag_values(ones_on_lambda_random_outside(inst, 11 + i)) *
                  dense_cleaning(g[i], a);
        rhs = rhs * ilam;
        VerifyReport rep = identity_report(name, inst, lhs, rhs);

        DMat lhs2 = ilam;
        for (std::size_t i = 0; i < n; ++i) lhs2 = lhs2 * dense_cleaning(g[i], a, true);
        DMat rhs2 = ilam;
        for (std::size_t i = 0; i < n; ++i)
            rhs2 = rhs2 * dense_cleaning(g[i], a, true) *
                   diag_values(ones_on_lambda_random_outside(inst, 37 + i));
        double r2 = (lhs2 - rhs2).max_abs();

        DMat prod = beta_product(g, a);
        DMat dual_prod = beta_product(g, a, true);
        double r3 = (ilamc * prod - ilamc).max_abs();
        double r4 = (dual_prod * ilamc - ilamc).max_abs();

        rep.max_residual = std::max({rep.max_residual, r2, r3, r4});
        rep.pass = rep.max_residual <= 1e-10 * std::max({scale_of(lhs, rhs), scale_of(lhs2, rhs2)});
        return rep;
    }
    if (name == "pi_properties") {
        DMat pi = dense_balayage(a, inst.lambda);
        const Profile& h = inst.lambda_profiles.at(0);
        DMat bh = dense_cleaning(h, a);
        double r1 = (pi * pi - pi).max_abs();
        double r2 = (bh * pi - pi).max_abs();
        double r3 = (pi * bh - pi).max_abs();
        VerifyReport rep;
        rep.name = name;
        rep.instance_digest = inst.digest();
        rep.max_residual = std::max({r1, r2, r3});
        rep.pass = rep.max_residual <= 1e-10 * std::max(1.0, pi.max_abs());
        return rep;
    }
    if (name == "convergence_to_balayage") {
        DMat pi = dense_balayage(a, inst.lambda);
        std::size_t n = std::min<std::size_t>(3, inst.lambda_profiles.size());
        std::vector<Profile> h(inst.lambda_profiles.begin(), inst.lambda_profiles.begin() + n);
        DMat prod = beta_product(h, a);
        DMat lhs = prod - pi;
        DMat rhs = prod * ilam * (id - pi);
        VerifyReport rep = identity_report(name, inst, lhs, rhs);
        // restricted form (I_L beta I_L) ... (I_L beta I_L) I_L (I - Pi)
        DMat rhs2 = id;
        for (const auto& hi : h) rhs2 = rhs2 * restrict_both(dense_cleaning(hi, a), ilam);
        rhs2 = rhs2 * ilam * (id - pi);
        double r2 = (lhs - rhs2).max_abs();
        rep.max_residual = std::max(rep.max_residual, r2);
        rep.pass = rep.max_residual <= 1e-10 * scale_of(lhs, rhs);
        return rep;
    }
    if (name == "geometric_identity") {
        Profile h = full_support_profile(inst);
        DMat m = restrict_both(dense_cleaning(h, a), ilam);
        DMat lhs = (id - m).solve_matrix(dense_diag_profile(h));
        DMat rhs = (id - restrict_both(a, ilam)).solve_matrix(ilam);
        return identity_report(name, inst, lhs, rhs);
    }
    throw contract_error("verify_identity: unknown identity '" + name + "'");
}

namespace {

VerifyReport slack_report(const std::string& name, const VerifyInstance& inst,
                          std::initializer_list<double> slacks, double scale) {
    VerifyReport rep;
    rep.name = name;
    rep.instance_digest = inst.digest();
    rep.is_identity = false;
    rep.min_slack = *std::min_element(slacks.begin(), slacks.end());
    rep.pass = rep.min_slack >= -1e-10 * std::max(1.0, scale);
    return rep;
}

double min_vec(const std::vector<double>& v) { return *std::min_element(v.begin(), v.end()); }

std::vector<double> vec_sub(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> o(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) o[i] = a[i] - b[i];
    return o;
}

void require_fh(const VerifyInstance& inst, const std::string& name) {
    if (!inst.fh)
        throw contract_error("verify_inequality: '" + name + "' requires an FH witness");
}

}  // namespace

VerifyReport verify_inequality(const std::string& name, const VerifyInstance& inst) {
    const DMat a = DMat::from_kernel(inst.alpha);
    const DMat id = DMat::identity(a.size());
    const DMat ilam = dense_diag_set(inst.lambda);
    const DMat ilamc = dense_diag_set(inst.lambda.complement());
    const std::vector<double>& wv = inst.w.values();

    auto lam_profiles = [&](std::size_t k) {
        std::vector<Profile> h(inst.lambda_profiles.begin(),
                               inst.lambda_profiles.begin() +
                                   std::min(k, inst.lambda_profiles.size()));
        return h;
    };
    // pointwise smaller profiles 0 <= g_i <= h_i
    auto shrink = [&](const std::vector<Profile>& hs, double factor) {
        std::vector<Profile> g;
        for (const auto& h : hs) g.push_back(h.scaled(factor));
        return g;
    };

    if (name == "positivity_lemma") {
        require_fh(inst, name);
        Profile f = dominating_profile(inst);
        std::vector<double> v1 = (ilam * (id - a) * dense_diag_profile(f)).mul_vec(wv);
        std::vector<Profile> h = lam_profiles(3);
        std::vector<double> v2 =
            (ilam * (id - a) * beta_product(h, a) * dense_diag_profile(f)).mul_vec(wv);
        return slack_report(name, inst, {min_vec(v1), min_vec(v2)}, 1.0);
    }
    if (name == "multi_monotonicity") {
        require_fh(inst, name);
        Profile f = dominating_profile(inst);
        std::vector<Profile> h = lam_profiles(4);
        std::vector<Profile> g = shrink(h, 0.5);
        std::vector<double> hi = (beta_product(h, a) * dense_diag_profile(f)).mul_vec(wv);
        std::vector<double> lo = (beta_product(g, a) * dense_diag_profile(f)).mul_vec(wv);
        return slack_report(name, inst, {min_vec(vec_sub(lo, hi))}, min_vec(lo) + 1.0);
    }
    if (name == "collapse_inequality") {
        require_fh(inst, name);
        Profile f = dominating_profile(inst);
        std::vector<Profile> g = lam_profiles(2);
        std::vector<Profile> h = lam_profiles(4);
        h.erase(h.begin(), h.begin() + std::min<std::size_t>(2, h.size()));
        DMat tail = beta_product(h, a) * dense_diag_profile(f);
        std::vector<double> lhs = (beta_product(g, a) * tail).mul_vec(wv);
        std::vector<double> rhs = (dense_cleaning(combined_profile(g), a) * tail).mul_vec(wv);
        return slack_report(name, inst, {min_vec(vec_sub(rhs, lhs))}, 1.0);
    }
    if (name == "multi_collapse") {
        require_fh(inst, name);
        Profile f = dominating_profile(inst);
        std::vector<Profile> h = lam_profiles(4);
        // blocks {h1,h2} and {h3,h4}; g_j = the blockwise collapse
        std::vector<Profile> g = {combined_profile({h.at(0), h.at(1)}),
                                  combined_profile({h.at(2), h.at(3)})};
        std::vector<double> lhs = (beta_product(h, a) * dense_diag_profile(f)).mul_vec(wv);
        std::vector<double> rhs = (beta_product(g, a) * dense_diag_profile(f)).mul_vec(wv);
        return slack_report(name, inst, {min_vec(vec_sub(rhs, lhs))}, 1.0);
    }
    if (name == "reverse_multi") {
        std::vector<Profile> g = lam_profiles(4);
        std::vector<Profile> h = shrink(g, 0.5);
        DMat diff = beta_product(g, a) * ilamc - beta_product(h, a) * ilamc;
        return slack_report(name, inst, {diff.min_entry()}, diff.max_abs());
    }
    if (name == "reverse_collapse") {
        std::vector<Profile> g = lam_profiles(2);
        std::vector<Profile> h = lam_profiles(4);
        h.erase(h.begin(), h.begin() + std::min<std::size_t>(2, h.size()));
        DMat tail = beta_product(h, a) * ilamc;
        DMat diff = beta_product(g, a) * tail - dense_cleaning(combined_profile(g), a) * tail;
        return slack_report(name, inst, {diff.min_entry()}, diff.max_abs());
    }
    if (name == "reverse_multi_collapse") {
        std::vector<Profile> h = lam_profiles(4);
        std::vector<Profile> g = {combined_profile({h.at(0), h.at(1)}),
                                  combined_profile({h.at(2), h.at(3)})};
        DMat diff = beta_product(h, a) * ilamc - beta_product(g, a) * ilamc;
        return slack_report(name, inst, {diff.min_entry()}, diff.max_abs());
    }
    if (name == "pi_comparison") {
        require_fh(inst, name);
        DMat pi = dense_balayage(a, inst.lambda);
        DMat A = beta_product(lam_profiles(3), a);
        std::vector<double> piw = pi.mul_vec(wv);
        std::vector<double> aw = A.mul_vec(wv);
        DMat ai_lamc = A * ilamc;
        DMat rem = pi - ai_lamc;  // = A I_L Pi >= 0
        std::vector<double> remw = rem.mul_vec(wv);
        std::vector<double> ailw = (A * ilam).mul_vec(wv);
        double s1 = min_vec(piw);
        double s2 = min_vec(vec_sub(aw, piw));
        double s3 = rem.min_entry();
        double s4 = min_vec(vec_sub(ailw, remw));
        double r5 = (rem - A * ilam * pi).max_abs();  // exact decomposition
        VerifyReport rep = slack_report(name, inst, {s1, s2, s3, s4, -r5}, pi.max_abs() + 1.0);
        return rep;
    }
    if (name == "cleaner_comparison") {
        require_fh(inst, name);
        DMat pi = dense_balayage(a, inst.lambda);
        std::vector<Profile> h = lam_profiles(3);
        std::vector<Profile> g = shrink(h, 0.4);
        DMat A = beta_product(h, a);
        DMat B = beta_product(g, a);
        double na = dense_operator_norm(A - pi, inst.w);
        double nb = dense_operator_norm(B - pi, inst.w);
        // vector form with a deterministic nonnegative c
        std::mt19937_64 rng(inst.seed ^ 0xabcdefULL);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::vector<double> c(a.size());
        for (double& x : c) x = u01(rng);
        auto dev = [&](const DMat& m) {
            std::vector<double> row = (m - pi).vec_mul(c);
            double s = 0.0;
            for (std::size_t i = 0; i < row.size(); ++i)
                s += std::abs(row[i]) * wv[i];
            return s;
        };
        return slack_report(name, inst, {nb - na, dev(B) - dev(A)}, nb + 1.0);
    }
    if (name == "geometric_series_bound") {
        // coverage floor: sum f_i >= (1/4) chi_Lambda keeps both series summable
        std::vector<Profile> f = lam_profiles(3);
        for (site_index x : inst.lambda.members())
            if (f[0].at(x) < 0.25) f[0].set(x, 0.25);
        DMat B = beta_product(f, a);
        DMat m = restrict_both(B, ilam);
        Profile h = combined_profile(f);
        // restrict h to lambda (the f_i are already supported there)
        DMat lhs = (id - m).solve_matrix(dense_diag_profile(h));
        DMat rhs = (id - restrict_both(a, ilam)).solve_matrix(ilam);
        DMat diff = rhs - lhs;
        return slack_report(name, inst, {diff.min_entry()}, rhs.max_abs());
    }
    if (name == "hardest_bound") {
        std::vector<Profile> f = lam_profiles(3);
        for (site_index x : inst.lambda.members())
            if (f[0].at(x) < 0.25) f[0].set(x, 0.25);
        std::size_t mcount = f.size();
        DMat B = beta_product(f, a);
        DMat aL = restrict_both(a, ilam);
        DMat lhs = (id - aL).solve_matrix(id);
        DMat partial(a.size());
        DMat pw = id;
        for (std::size_t k = 0; k < mcount; ++k) {
            partial = partial + pw;
            pw = pw * aL;
        }
        DMat rhs = (id - restrict_both(B, ilam)).solve_matrix(partial);
        DMat diff = rhs - lhs;
        return slack_report(name, inst, {diff.min_entry()}, rhs.max_abs());
    }
    if (name == "betastar_sum") {
        std::vector<Profile> f(inst.profiles.begin(),
                               inst.profiles.begin() + std::min<std::size_t>(3, inst.profiles.size()));
        std::size_t mcount = f.size();
        DMat P(a.size());
        for (std::size_t i = 0; i < mcount; ++i) {
            DMat term = dense_diag_profile(f[i]);
            for (std::size_t j = i + 1; j < mcount; ++j) term = term * dense_cleaning(f[j], a, true);
            P = P + term;
        }
        DMat bound(a.size());
        DMat pw = id;
        for (std::size_t k = 0; k < mcount; ++k) {
            bound = bound + pw;
            pw = pw * a;
        }
        DMat diff = bound - P;
        return slack_report(name, inst, {P.min_entry(), diff.min_entry()}, bound.max_abs());
    }
    throw contract_error("verify_inequality: unknown inequality '" + name + "'");
}

std::vector<VerifyReport> run_verifier_suite(const std::vector<std::string>& names, int trials,
                                             std::uint64_t seed, const InstanceOptions& opts) {
    std::vector<std::string> run = names;
    if (run.empty()) {
        run = identity_names();
        for (const auto& n : inequality_names()) run.push_back(n);
    }
    auto ids = identity_names();
    std::vector<VerifyReport> out;
    std::mt19937_64 rng(seed);
    for (int t = 0; t < trials; ++t) {
        VerifyInstance inst = random_instance(rng, opts);
        for (const auto& n : run) {
            bool is_id = std::find(ids.begin(), ids.end(), n) != ids.end();
            out.push_back(is_id ? verify_identity(n, inst) : verify_inequality(n, inst));
        }
    }
    return out;
}

}  // namespace cleankit
