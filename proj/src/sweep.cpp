#include "cleankit/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cleankit {

Schedule Schedule::of_profiles(SiteSet lambda, std::vector<Profile> steps) {
    if (steps.empty()) throw contract_error("Schedule: empty step list");
    for (const auto& p : steps)
        if (!p.supported_in(lambda)) throw contract_error("Schedule: step not supported in lambda");
    Schedule s;
    s.lambda = std::move(lambda);
    s.profiles = std::move(steps);
    return s;
}

Schedule Schedule::of_sites(SiteSet lambda, std::vector<site_index> order, double eps) {
    if (order.empty()) throw contract_error("Schedule: empty site order");
    if (eps <= 0.0 || eps > 1.0) throw contract_error("Schedule: eps outside (0,1]");
    for (site_index x : order)
        if (!lambda.contains(x)) throw contract_error("Schedule: swept site outside lambda");
    Schedule s;
    s.lambda = std::move(lambda);
    s.sites = std::move(order);
    s.site_eps = eps;
    return s;
}

Schedule round_robin_schedule(const SiteSet& lambda, double eps) {
    return Schedule::of_sites(lambda, lambda.members(), eps);
}

Schedule ScaledSchedule::to_schedule(std::shared_ptr<const SiteSpace> space) const {
    std::vector<Profile> steps;
    steps.reserve(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i)
        steps.push_back(Profile::delta(space, sites[i], scales[i]));
    if (steps.empty()) steps.push_back(Profile(space));
    return Schedule::of_profiles(lambda, std::move(steps));
}

std::vector<double> contraction_profile(const Kernel& alpha, const SiteSet& lambda,
                                        const WeightVector& w, const DirtVector* c, int max_ell) {
    require_same_space(alpha.space(), w.space(), "contraction_profile");
    if (max_ell < 0) throw contract_error("contraction_profile: max_ell must be >= 0");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(max_ell) + 1);

    if (c) {
        require_same_space(c->space(), w.space(), "contraction_profile");
        std::vector<double> v = c->values();
        for (int l = 0; l <= max_ell; ++l) {
            if (l > 0) {
                // v <- v (I_L alpha I_L)
                std::vector<double> nv(v.size(), 0.0);
                for (site_index x : lambda.members()) {
                    double vx = v[static_cast<std::size_t>(x)];
                    if (vx == 0.0) continue;
                    for (const auto& e : alpha.row(x))
                        if (lambda.contains(e.col)) nv[static_cast<std::size_t>(e.col)] += vx * e.value;
                }
                v = std::move(nv);
            }
            double s = 0.0;
            for (std::size_t i = 0; i < v.size(); ++i)
                s += std::abs(v[i]) * w[static_cast<site_index>(i)];
            out.push_back(s);
        }
    } else {
        // operator form: (I_L a I_L)^l w, norm = sup ratio
        std::vector<double> v = w.values();
        for (int l = 0; l <= max_ell; ++l) {
            if (l == 0) {
                out.push_back(1.0);  // identity
                // restrict v to lambda for the recursion
                for (std::size_t i = 0; i < v.size(); ++i)
                    if (!lambda.contains(static_cast<site_index>(i))) v[i] = 0.0;
                continue;
            }
            std::vector<double> nv(v.size(), 0.0);
            for (site_index x : lambda.members()) {
                double s = 0.0;
                for (const auto& e : alpha.row(x))
                    if (lambda.contains(e.col)) s += e.value * v[static_cast<std::size_t>(e.col)];
                nv[static_cast<std::size_t>(x)] = s;
            }
            v = std::move(nv);
            double best = 0.0;
            for (site_index x : lambda.members())
                best = std::max(best, v[static_cast<std::size_t>(x)] / w[x]);
            out.push_back(best);
        }
    }
    return out;
}

ConvergenceTrace run_schedule(const DirtVector& c, const Schedule& schedule, const Kernel& alpha,
                              const WeightVector& w, const RunOptions& opts) {
    require_same_space(c.space(), alpha.space(), "run_schedule");
    ConvergenceTrace trace;
    trace.seed = opts.seed;

    // extended precision: the adversarial-tree family carries branch masses
    // far below the double denormal range before they double back up
    std::vector<long double> cur(c.values().begin(), c.values().end());
    std::vector<double> coverage(cur.size(), 0.0);

    std::vector<char> in_lambda(cur.size(), 0);
    for (site_index x : schedule.lambda.members()) in_lambda[static_cast<std::size_t>(x)] = 1;

    // c Pi_Lambda is invariant under the sweeps; precompute once
    std::vector<double> target;
    if (opts.balayage) {
        SignedVector t = apply_kernel(c, opts.balayage->matrix);
        target = t.values();
    }

    auto dirt_in_lambda = [&]() {
        long double s = 0.0L;
        for (std::size_t i = 0; i < cur.size(); ++i)
            if (in_lambda[i]) s += std::abs(cur[i]) * w[static_cast<site_index>(i)];
        return static_cast<double>(s);
    };

    auto record = [&](long n) {
        TraceRow row;
        row.n = n;
        row.dirt_in_lambda = dirt_in_lambda();
        if (!target.empty()) {
            long double dev = 0.0L;
            for (std::size_t i = 0; i < cur.size(); ++i)
                dev += std::abs(cur[i] - static_cast<long double>(target[i])) *
                       w[static_cast<site_index>(i)];
            row.deviation = static_cast<double>(dev);
        }
        double cmin = 0.0, cmax = 0.0;
        bool first = true;
        for (std::size_t i = 0; i < cur.size(); ++i) {
            if (!in_lambda[i]) continue;
            double cov = coverage[i];
            if (first) {
                cmin = cmax = cov;
                first = false;
            } else {
                cmin = std::min(cmin, cov);
                cmax = std::max(cmax, cov);
            }
        }
        row.coverage_min = cmin;
        row.coverage_max = cmax;
        if (!opts.probe.empty()) {
            long double s = 0.0L;
            for (site_index x : opts.probe) s += std::abs(cur[static_cast<std::size_t>(x)]) * w[x];
            row.probe_mass = static_cast<double>(s);
        }
        trace.rows.push_back(row);
    };

    auto sweep_one = [&](site_index y, long double eps) {
        long double moved = cur[static_cast<std::size_t>(y)] * eps;
        if (moved == 0.0L) return;
        cur[static_cast<std::size_t>(y)] -= moved;
        for (const auto& e : alpha.row(y))
            cur[static_cast<std::size_t>(e.col)] += moved * static_cast<long double>(e.value);
    };

    long stride = std::max<long>(1, opts.trace_every);
    std::size_t next_mark = 0;
    std::vector<std::pair<site_index, long double>> staged;
    for (long n = 1; n <= opts.n_steps; ++n) {
        std::size_t i = static_cast<std::size_t>(n - 1) % schedule.size();
        if (schedule.site_form()) {
            site_index y = schedule.sites[i];
            sweep_one(y, schedule.site_eps);
            coverage[static_cast<std::size_t>(y)] += schedule.site_eps;
        } else {
            const Profile& h = schedule.profiles[i];
            // simultaneous update: stage the moves before applying
            staged.clear();
            for (const auto& [x, fx] : h.support()) {
                long double m = cur[static_cast<std::size_t>(x)] * fx;
                if (m != 0.0L) staged.push_back({x, m});
            }
            for (const auto& [x, m] : staged) {
                cur[static_cast<std::size_t>(x)] -= m;
                for (const auto& e : alpha.row(x))
                    cur[static_cast<std::size_t>(e.col)] += m * static_cast<long double>(e.value);
            }
            for (const auto& [x, v] : h.support()) coverage[static_cast<std::size_t>(x)] += v;
        }
        bool marked = false;
        while (next_mark < opts.record_at.size() && opts.record_at[next_mark] <= n) {
            marked = marked || opts.record_at[next_mark] == n;
            ++next_mark;
        }
        if (marked || n % stride == 0 || n == opts.n_steps) record(n);
    }

    DirtVector out(c.space_ptr(), 0.0);
    for (std::size_t i = 0; i < cur.size(); ++i)
        out[static_cast<site_index>(i)] = std::max(0.0, static_cast<double>(cur[i]));
    trace.final_dirt = std::move(out);
    return trace;
}

SlowSchedule slow_schedule(const DirtVector& c, const std::function<double(long)>& delta,
                           long probe_horizon) {
    // Collect the strictly positive sites, in space order: c_1, c_2, ...
    std::vector<site_index> sites;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[static_cast<site_index>(i)] > 0.0) sites.push_back(static_cast<site_index>(i));
    if (sites.empty()) throw contract_error("slow_schedule: c must have positive support");

    // N_i = first index from which delta stays below c_i / 2
    auto stays_below_from = [&](double bound, long start) -> long {
        long n = std::max<long>(start, 1);
        while (n <= probe_horizon) {
            if (delta(n) <= bound) {
                long m = n;
                bool ok = true;
                for (; m <= probe_horizon; ++m) {
                    if (delta(m) > bound) {
                        ok = false;
                        break;
                    }
                }
                if (ok) return n;
                n = m + 1;
            } else {
                ++n;
            }
        }
        return -1;
    };

    // vacuous bound: any positive rates work, use full sweeps
    bool all_zero = true;
    for (long n = 1; n <= probe_horizon && all_zero; ++n) all_zero = delta(n) == 0.0;
    if (all_zero) {
        Profile ones(c.space_ptr());
        for (site_index x : sites) ones.set(x, 1.0);
        return {std::move(ones), 1, probe_horizon, {}};
    }

    // settling indices N_1 < N_2 < ... < N_K, then N_{K+1} := horizon so the
    // guarantee chain delta_N <= c_i/2 <= c_i (1-h_i)^{N_{i+1}} <= eps_N
    // covers [N_1, horizon]
    std::vector<long> settle(sites.size() + 1, 0);
    long prevN = 0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
        long Ni = stays_below_from(c[sites[i]] / 2.0, prevN + 1);
        if (Ni < 0)
            throw contract_error(
                "slow_schedule: delta does not settle below c_i/2 within the probe horizon");
        settle[i] = Ni;
        prevN = Ni;
    }
    if (prevN >= probe_horizon)
        throw contract_error("slow_schedule: probe horizon too short for the support of c");
    settle[sites.size()] = probe_horizon;

    Profile rates(c.space_ptr());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        // (1-h)^{N_{i+1}} = 2^{-s} > 1/2 for s slightly below 1
        double base = std::exp2(-0.999999 / static_cast<double>(settle[i + 1]));
        rates.set(sites[i], 1.0 - base);
    }
    return {std::move(rates), settle[0], probe_horizon, std::move(settle)};
}

double imitation_epsilon(const DirtVector& c, const Cloud& nu, const Marker& eta, double kappa,
                         const Kernel& alpha) {
    require_same_space(c.space(), alpha.space(), "imitation_epsilon");
    double nu_eta = nu.value(eta);
    if (kappa < 0.0 || kappa > nu_eta + 1e-12)
        throw contract_error("imitation_epsilon: kappa must lie in [0, nu(eta)]");
    if (kappa == 0.0) return 0.0;

    site_index y = marker_last(eta);
    double cT_eta_y = c[marker_first(eta)] * path_weight(alpha, eta);
    if (cT_eta_y == 0.0) return 0.0;

    // (c T_nu)_y
    Kernel t = realize(nu, alpha);
    SignedVector ct = apply_kernel(c, t);
    double denom = ct[y];
    if (denom <= 0.0) return 0.0;
    double eps = kappa * cT_eta_y / denom;
    return std::min(eps, 1.0);
}

ScaledSchedule plan_cleaning(const DirtVector& c, const WeightVector& w, const Kernel& alpha,
                             const SiteSet& lambda, const PlanOptions& opts) {
    require_same_space(c.space(), w.space(), "plan_cleaning");
    require_same_space(c.space(), alpha.space(), "plan_cleaning");

    // Decay probe: c (I_L a I_L)^k w must tend to 0.
    std::vector<double> probe = contraction_profile(alpha, lambda, w, &c, opts.probe_powers);
    double pmax = *std::max_element(probe.begin(), probe.end());
    if (pmax > 0.0 && probe.back() > opts.decay_factor * pmax)
        throw nonconvergence_error(
            "plan_cleaning: c (I_L alpha I_L)^k w does not decay over the probe horizon");

    ScaledSchedule plan;
    plan.lambda = lambda;

    // Active level mass per site (the level-k marker masses aggregated by
    // endpoint) and the current dirt vector restricted to lambda.  One
    // emitted sweep per (level, site) equals the composite of that batch's
    // single-marker imitation updates.
    std::vector<double> active(c.size(), 0.0), dirt(c.size(), 0.0);
    for (site_index x : lambda.members()) {
        active[static_cast<std::size_t>(x)] = c[x];
        dirt[static_cast<std::size_t>(x)] = c[x];
    }

    auto level_mass = [&]() {
        double s = 0.0;
        for (site_index x : lambda.members()) s += active[static_cast<std::size_t>(x)] * w[x];
        return s;
    };

    for (int stage = 0; stage < opts.max_stages; ++stage) {
        if (level_mass() <= opts.dirt_target) break;
        std::vector<double> next(c.size(), 0.0);
        for (site_index y : lambda.members()) {
            double m = active[static_cast<std::size_t>(y)];
            double d = dirt[static_cast<std::size_t>(y)];
            if (m <= 0.0 || d <= 0.0) continue;
            double eps = std::min(1.0, m / d);
            plan.sites.push_back(y);
            plan.scales.push_back(eps);
            dirt[static_cast<std::size_t>(y)] -= m;
            active[static_cast<std::size_t>(y)] = 0.0;
            for (const auto& e : alpha.row(y)) {
                if (!lambda.contains(e.col)) continue;  // left lambda: retired
                next[static_cast<std::size_t>(e.col)] += m * e.value;
                dirt[static_cast<std::size_t>(e.col)] += m * e.value;
            }
        }
        active = std::move(next);
        plan.stage_ends.push_back(static_cast<long>(plan.sites.size()));
    }
    return plan;
}

std::string trace_to_csv(const ConvergenceTrace& trace) {
    std::ostringstream os;
    os << "# seed=" << trace.seed << "\n";
    os << "n,dirt_in_lambda,deviation,coverage_min,coverage_max\n";
    os.precision(17);
    for (const auto& r : trace.rows) {
        os << r.n << "," << r.dirt_in_lambda << "," << r.deviation << "," << r.coverage_min << ","
           << r.coverage_max << "\n";
    }
    return os.str();
}

}  // namespace cleankit
