#include "cleankit/cloud.hpp"

#include <algorithm>
#include <cmath>

namespace cleankit {

Cloud::Cloud(std::shared_ptr<const SiteSpace> space)
    : space_(std::move(space)), store_(std::make_shared<MarkerStore>()) {}

Cloud Cloud::zero(std::shared_ptr<const SiteSpace> space) { return Cloud(std::move(space)); }

Cloud Cloud::rho(std::shared_ptr<const SiteSpace> space, int k) {
    if (k < 0) throw contract_error("Cloud::rho: negative level");
    std::size_t n = space->size();
    double count = std::pow(static_cast<double>(n), k + 1);
    if (count > 4e6) throw contract_error("Cloud::rho: level indicator too large to materialize");
    Cloud c(space);
    Marker m;
    std::function<void(int)> rec = [&](int depth) {
        if (depth == k + 1) {
            c.set(m, 1.0);
            return;
        }
        for (std::size_t s = 0; s < n; ++s) {
            m.push_back(static_cast<site_index>(s));
            rec(depth + 1);
            m.pop_back();
        }
    };
    rec(0);
    return c;
}

Cloud Cloud::diag(const Profile& f) {
    Cloud c(f.space_ptr());
    for (const auto& [i, v] : f.support()) c.set({i}, v);
    return c;
}

Cloud Cloud::diag_set(std::shared_ptr<const SiteSpace> space, const SiteSet& s) {
    Cloud c(space);
    for (site_index i : s.members()) c.set({i}, 1.0);
    return c;
}

Cloud Cloud::beta(const Profile& f) {
    Cloud c(f.space_ptr());
    std::size_t n = f.space().size();
    for (std::size_t x = 0; x < n; ++x) {
        site_index xi = static_cast<site_index>(x);
        double fx = f.at(xi);
        if (fx != 1.0) c.set({xi}, 1.0 - fx);
        if (fx != 0.0)
            for (std::size_t y = 0; y < n; ++y)
                c.set({xi, static_cast<site_index>(y)}, fx);
    }
    return c;
}

void Cloud::set(const Marker& m, double v) {
    if (m.empty()) throw contract_error("Cloud::set: empty marker");
    auto id = store_->intern(m);
    if (v == 0.0) {
        weights_.erase(id);
    } else {
        weights_[id] = v;
        level_bound_ = std::max(level_bound_, marker_level(m));
    }
}

void Cloud::add(const Marker& m, double v) {
    if (v == 0.0) return;
    set(m, value(m) + v);
}

double Cloud::value(const Marker& m) const {
    auto id = store_->find(m);
    if (id == MarkerStore::npos) return 0.0;
    auto it = weights_.find(id);
    return it == weights_.end() ? 0.0 : it->second;
}

double Cloud::cumulative(const Marker& m) const {
    double s = 0.0;
    MarkerStore::node_id cur = MarkerStore::npos;
    for (site_index x : m) {
        cur = store_->find_child(cur, x);
        if (cur == MarkerStore::npos) break;
        auto it = weights_.find(cur);
        if (it != weights_.end()) s += it->second;
    }
    return s;
}

double Cloud::norm() const {
    // the sup of the cumulative |nu| is attained on a stored marker
    double best = 0.0;
    for (const auto& [id, w] : weights_) {
        (void)w;
        double s = 0.0;
        for (auto cur = id; cur != MarkerStore::npos; cur = store_->parent(cur)) {
            auto it = weights_.find(cur);
            if (it != weights_.end()) s += std::abs(it->second);
        }
        best = std::max(best, s);
    }
    return best;
}

bool Cloud::nonnegative(double tol) const {
    for (const auto& [id, w] : weights_) {
        (void)id;
        if (w < -tol) return false;
    }
    return true;
}

void Cloud::for_each(const std::function<void(const Marker&, double)>& f) const {
    for (const auto& [id, w] : weights_) f(store_->path(id), w);
}

Cloud Cloud::operator+(const Cloud& o) const {
    require_same_space(space(), o.space(), "Cloud::operator+");
    Cloud out = *this;
    o.for_each([&](const Marker& m, double w) { out.add(m, w); });
    return out;
}

Cloud Cloud::operator-(const Cloud& o) const {
    require_same_space(space(), o.space(), "Cloud::operator-");
    Cloud out = *this;
    o.for_each([&](const Marker& m, double w) { out.add(m, -w); });
    return out;
}

Cloud Cloud::scaled(double s) const {
    Cloud out(space_);
    for_each([&](const Marker& m, double w) { out.set(m, w * s); });
    return out;
}

Cloud Cloud::abs() const {
    Cloud out(space_);
    for_each([&](const Marker& m, double w) { out.set(m, std::abs(w)); });
    return out;
}

bool Cloud::carried_by(const SiteSet& lambda, Marker* witness) const {
    for (const auto& [id, w] : weights_) {
        if (w == 0.0) continue;
        // every entry before the last must lie in lambda
        for (auto cur = store_->parent(id); cur != MarkerStore::npos; cur = store_->parent(cur)) {
            if (!lambda.contains(store_->site(cur))) {
                if (witness) *witness = store_->path(id);
                return false;
            }
        }
    }
    return true;
}

double Cloud::dual_value(const Marker& m) const {
    double full = cumulative(m);
    if (m.size() == 1) return full;
    Marker tail(m.begin() + 1, m.end());
    return full - cumulative(tail);
}

Cloud convolve(const Cloud& a, const Cloud& b) {
    require_same_space(a.space(), b.space(), "convolve");
    // group b's support by first site
    std::unordered_map<site_index, std::vector<std::pair<Marker, double>>> by_first;
    b.for_each([&](const Marker& m, double w) { by_first[marker_first(m)].push_back({m, w}); });

    Cloud out(a.space_ptr());
    a.for_each([&](const Marker& ma, double wa) {
        auto it = by_first.find(marker_last(ma));
        if (it == by_first.end()) return;
        for (const auto& [mb, wb] : it->second) out.add(marker_splice(ma, mb), wa * wb);
    });
    return out;
}

Cloud convolve_power(const Cloud& a, int n) {
    if (n < 0) throw contract_error("convolve_power: negative exponent");
    Cloud out = Cloud::rho(a.space_ptr(), 0);
    for (int i = 0; i < n; ++i) out = convolve(out, a);
    return out;
}

// --- specials ---------------------------------------------------------------

std::string SpecialCloud::name() const {
    switch (kind) {
        case Kind::pi_lambda: return "pi_lambda";
        case Kind::one: return "one";
        case Kind::one_lambda: return "one_lambda";
    }
    return "?";
}

SpecialCloud make_pi_lambda(const SiteSet& lambda) { return {SpecialCloud::Kind::pi_lambda, lambda}; }
SpecialCloud make_one() { return {SpecialCloud::Kind::one, SiteSet()}; }
SpecialCloud make_one_lambda(const SiteSet& lambda) { return {SpecialCloud::Kind::one_lambda, lambda}; }

double special_value(const SpecialCloud& s, const Marker& m) {
    switch (s.kind) {
        case SpecialCloud::Kind::one:
            return 1.0;
        case SpecialCloud::Kind::one_lambda:
            for (site_index x : m)
                if (!s.lambda.contains(x)) return 0.0;
            return 1.0;
        case SpecialCloud::Kind::pi_lambda: {
            for (std::size_t i = 0; i + 1 < m.size(); ++i)
                if (!s.lambda.contains(m[i])) return 0.0;
            return s.lambda.contains(m.back()) ? 0.0 : 1.0;
        }
    }
    return 0.0;
}

double special_cumulative(const SpecialCloud& s, const Marker& m) {
    switch (s.kind) {
        case SpecialCloud::Kind::one:
            return static_cast<double>(m.size());
        case SpecialCloud::Kind::one_lambda: {
            double c = 0.0;
            for (site_index x : m) {
                if (!s.lambda.contains(x)) break;
                c += 1.0;
            }
            return c;
        }
        case SpecialCloud::Kind::pi_lambda:
            // 1 iff some entry lies outside lambda
            for (site_index x : m)
                if (!s.lambda.contains(x)) return 1.0;
            return 0.0;
    }
    return 0.0;
}

SpecialCloud convolve(const SpecialCloud& a, const SpecialCloud& b) {
    if (a.kind == SpecialCloud::Kind::pi_lambda && b.kind == SpecialCloud::Kind::pi_lambda &&
        a.lambda == b.lambda)
        return a;  // pi * pi = pi
    throw not_implemented_error("convolve: unsupported special pair " + a.name() + " * " + b.name());
}

double convolve_pi_value(const Cloud& mu, const SiteSet& lambda, const Marker& m) {
    std::size_t k = m.size() - 1;
    if (lambda.contains(m.back())) return 0.0;
    // split at j: the suffix (x_j..x_k) lies in the boundary iff
    // x_j..x_{k-1} all lie in lambda; walk splits from j = k downwards
    double s = 0.0;
    Marker prefix = m;
    for (std::size_t jj = k + 1; jj-- > 0;) {
        prefix.resize(jj + 1);
        s += mu.value(prefix);
        if (jj > 0 && !lambda.contains(m[jj - 1])) break;
    }
    return s;
}

double convolve_pi_cumulative(const Cloud& mu, const SiteSet& lambda, const Marker& m) {
    // (mu * pi)~ = mu * pi~, and pi~(suffix) = 1 iff the suffix leaves lambda
    std::size_t k = m.size() - 1;
    std::vector<char> any_out(k + 2, 0);
    for (std::size_t j = k + 1; j-- > 0;)
        any_out[j] = any_out[j + 1] || !lambda.contains(m[j]);
    double s = 0.0;
    Marker prefix;
    prefix.reserve(m.size());
    for (std::size_t j = 0; j <= k; ++j) {
        prefix.push_back(m[j]);
        if (any_out[j]) {  // suffix starting at j leaves lambda
            s += mu.value(prefix) * 1.0;
        }
    }
    return s;
}

// --- ordering ---------------------------------------------------------------

namespace {

template <typename Visit>
void enumerate_markers(const SiteSpace& space, int max_level, const Visit& visit) {
    Marker m;
    std::function<void(int)> rec = [&](int level) {
        for (std::size_t s = 0; s < space.size(); ++s) {
            m.push_back(static_cast<site_index>(s));
            if (visit(m) && level < max_level) rec(level + 1);
            m.pop_back();
        }
    };
    rec(0);
}

}  // namespace

void for_each_marker(const SiteSpace& space, int max_level,
                     const std::function<bool(const Marker&)>& visit) {
    enumerate_markers(space, max_level, visit);
}

OrderResult order_leq(const Cloud& mu, const Cloud& nu, int level_cap) {
    require_same_space(mu.space(), nu.space(), "order_leq");
    int need = std::max(mu.level_bound(), nu.level_bound()) + 1;
    if (level_cap < need)
        throw contract_error("order_leq: level_cap too small for cumulative stabilization");
    OrderResult res;
    res.holds = true;
    enumerate_markers(mu.space(), std::min(level_cap, need), [&](const Marker& m) -> bool {
        if (!res.holds) return false;
        if (mu.cumulative(m) > nu.cumulative(m) + 1e-12) {
            res.holds = false;
            res.witness = m;
            return false;
        }
        return true;
    });
    return res;
}

// --- classification ----------------------------------------------------------

CloudClassReport classify(const Cloud& nu, const std::optional<SiteSet>& lambda, double tol) {
    CloudClassReport rep;
    const SiteSpace& space = nu.space();
    int bound = std::max(nu.level_bound(), 0);
    int cap = bound + 1;
    rep.cap_used = cap;

    rep.nonnegative = nu.nonnegative(tol);
    rep.norm_value = nu.norm();

    // R: cumulative never increases when the first entry is dropped,
    // checked in the one-step form, complete on levels <= bound+1.
    rep.in_R = rep.nonnegative;
    enumerate_markers(space, cap, [&](const Marker& m) -> bool {
        if (!rep.in_R) return false;
        if (m.size() >= 2) {
            Marker tail(m.begin() + 1, m.end());
            if (nu.cumulative(tail) > nu.cumulative(m) + tol) {
                rep.in_R = false;
                rep.r_witness = {m, tail};
                return false;
            }
        }
        return true;
    });

    // P: cumulative monotone under passing to subsequences.
    rep.in_P = rep.nonnegative;
    enumerate_markers(space, cap, [&](const Marker& m) -> bool {
        if (!rep.in_P) return false;
        double cm = nu.cumulative(m);
        std::size_t len = m.size();
        if (len >= 2) {
            // proper nonempty subsequences via bitmask
            for (std::uint32_t mask = 1; mask + 1 < (1u << len); ++mask) {
                Marker sub;
                for (std::size_t i = 0; i < len; ++i)
                    if (mask & (1u << i)) sub.push_back(m[i]);
                if (nu.cumulative(sub) > cm + tol) {
                    rep.in_P = false;
                    rep.p_witness = {m, sub};
                    return false;
                }
            }
        }
        return true;
    });
    // S_a: branch suprema M(eta) constant; computed over descendants to the
    // support bound, complete on levels <= bound+1.
    {
        bool first = true;
        bool constant = rep.nonnegative;
        double a_value = 0.0;
        Marker m;
        // returns M(eta) for the current prefix
        std::function<double(int)> walk = [&](int level) -> double {
            double here = nu.cumulative(m);
            double best = here;
            if (level < bound) {
                for (std::size_t s = 0; s < space.size(); ++s) {
                    m.push_back(static_cast<site_index>(s));
                    best = std::max(best, walk(level + 1));
                    m.pop_back();
                }
            }
            return best;
        };
        std::function<void(int)> check = [&](int level) {
            if (!constant) return;
            for (std::size_t s = 0; s < space.size() && constant; ++s) {
                m.push_back(static_cast<site_index>(s));
                double mval = walk(level);
                if (first) {
                    a_value = mval;
                    first = false;
                } else if (std::abs(mval - a_value) > tol) {
                    constant = false;
                    rep.s_witness = m;
                }
                if (constant && level < cap) check(level + 1);
                m.pop_back();
            }
        };
        check(0);
        rep.in_S = constant;
        rep.s_value = constant ? a_value : 0.0;
    }

    if (lambda) {
        Marker w;
        bool c = nu.carried_by(*lambda, &w);
        rep.carried = c;
        if (!c) rep.carried_witness = w;

        // Lambda-regular: norm <= 1 and cumulative == 1 on the boundary.
        bool reg = rep.nonnegative && rep.norm_value <= 1.0 + tol;
        if (reg) {
            enumerate_markers(space, cap, [&](const Marker& m) -> bool {
                if (!reg) return false;
                bool boundary = !lambda->contains(m.back());
                for (std::size_t i = 0; i + 1 < m.size() && boundary; ++i)
                    if (!lambda->contains(m[i])) boundary = false;
                if (boundary && std::abs(nu.cumulative(m) - 1.0) > tol) {
                    reg = false;
                    rep.regular_witness = m;
                    return false;
                }
                // descendants of a boundary marker are never boundary markers
                return !boundary;
            });
        }
        rep.lambda_regular = reg;
    }
    return rep;
}

// --- realization -------------------------------------------------------------

double path_weight(const Kernel& alpha, const Marker& m) {
    double p = 1.0;
    for (std::size_t i = 0; i + 1 < m.size(); ++i) {
        p *= alpha.at(m[i], m[i + 1]);
        if (p == 0.0) return 0.0;
    }
    return p;
}

Kernel realize(const Cloud& nu, const Kernel& alpha) {
    require_same_space(nu.space(), alpha.space(), "realize");
    Kernel out(alpha.space_ptr());
    nu.for_each([&](const Marker& m, double w) {
        double pw = path_weight(alpha, m);
        if (pw != 0.0 && w != 0.0) out.add(marker_first(m), marker_last(m), w * pw);
    });
    return out;
}

BalayageResult realize_pi(const SiteSet& lambda, const Kernel& alpha, const WeightVector& w,
                          double tol, int max_terms) {
    return balayage(alpha, lambda, w, tol, max_terms);
}

// --- product traces ------------------------------------------------------------

Cloud truncate(const Cloud& c, int level_cap) {
    Cloud out(c.space_ptr());
    c.for_each([&](const Marker& m, double w) {
        if (marker_level(m) <= level_cap) out.set(m, w);
    });
    return out;
}

CloudTrace cloud_product_trace(const std::vector<Profile>& h, const SiteSet& lambda, int level_cap,
                               int n_steps) {
    if (h.empty()) throw contract_error("cloud_product_trace: empty profile sequence");
    auto space = h.front().space_ptr();
    for (const auto& p : h)
        if (!p.supported_in(lambda))
            throw contract_error("cloud_product_trace: profile not supported in lambda");
    SpecialCloud pi = make_pi_lambda(lambda);

    CloudTrace trace{{}, Cloud::rho(space, 0)};
    Cloud mu = Cloud::rho(space, 0);
    for (int n = 1; n <= n_steps; ++n) {
        const Profile& step = h[static_cast<std::size_t>((n - 1) % static_cast<int>(h.size()))];
        mu = truncate(convolve(mu, Cloud::beta(step)), level_cap);

        CloudTraceRow row;
        row.n = n;
        row.level_dist.assign(static_cast<std::size_t>(level_cap) + 1, 0.0);
        enumerate_markers(*space, level_cap, [&](const Marker& m) -> bool {
            double d = std::abs(mu.value(m) - special_value(pi, m));
            row.pointwise_dist = std::max(row.pointwise_dist, d);
            auto lvl = static_cast<std::size_t>(marker_level(m));
            row.level_dist[lvl] = std::max(row.level_dist[lvl], d);
            return true;
        });
        trace.rows.push_back(std::move(row));
    }
    trace.final_cloud = mu;
    return trace;
}

std::vector<double> beta_power_on_chain(const Profile& h, const Marker& chain, int steps) {
    if (chain.empty()) throw contract_error("beta_power_on_chain: empty chain");
    std::vector<double> v(chain.size(), 0.0);
    v[0] = 1.0;  // rho^0 on the level-0 prefix
    std::vector<double> next(chain.size());
    for (int n = 0; n < steps; ++n) {
        for (std::size_t j = 0; j < chain.size(); ++j) {
            double hx = h.at(chain[j]);
            next[j] = v[j] * (1.0 - hx) + (j > 0 ? v[j - 1] * hx : 0.0);
        }
        v = next;
    }
    return v;
}

}  // namespace cleankit
