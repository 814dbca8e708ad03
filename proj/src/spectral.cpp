#include "cleankit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cleankit {

namespace {

// Iterative Tarjan; the gallery builds site spaces in the millions, so no
// recursion.
struct TarjanState {
    const Kernel& a;
    std::vector<int> index, lowlink;
    std::vector<bool> on_stack;
    std::vector<site_index> stack;
    std::vector<std::vector<site_index>> components;
    int counter = 0;

    explicit TarjanState(const Kernel& k)
        : a(k), index(k.size(), -1), lowlink(k.size(), 0), on_stack(k.size(), false) {}

    void run(site_index root) {
        struct Frame {
            site_index v;
            std::size_t edge;
        };
        std::vector<Frame> frames;
        frames.push_back({root, 0});
        index[root] = lowlink[root] = counter++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!frames.empty()) {
            Frame& f = frames.back();
            const auto& row = a.row(f.v);
            if (f.edge < row.size()) {
                site_index w = row[f.edge].col;
                ++f.edge;
                if (index[w] < 0) {
                    index[w] = lowlink[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    lowlink[f.v] = std::min(lowlink[f.v], index[w]);
                }
            } else {
                site_index v = f.v;
                frames.pop_back();
                if (!frames.empty())
                    lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[v]);
                if (lowlink[v] == index[v]) {
                    std::vector<site_index> comp;
                    site_index w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp.push_back(w);
                    } while (w != v);
                    std::sort(comp.begin(), comp.end());
                    components.push_back(std::move(comp));
                }
            }
        }
    }
};

struct Block {
    std::vector<site_index> sites;                 // global indices
    std::vector<std::vector<Kernel::Entry>> rows;  // local column indices
};

Block extract_block(const Kernel& a, const std::vector<site_index>& sites) {
    Block b;
    b.sites = sites;
    std::unordered_map<site_index, site_index> local;
    for (std::size_t i = 0; i < sites.size(); ++i) local[sites[i]] = static_cast<site_index>(i);
    b.rows.resize(sites.size());
    for (std::size_t i = 0; i < sites.size(); ++i) {
        for (const auto& e : a.row(sites[i])) {
            auto it = local.find(e.col);
            if (it != local.end()) b.rows[i].push_back({it->second, e.value});
        }
    }
    return b;
}

// Collatz-Wielandt power iteration on (block + I); returns spr(block) and
// optionally the (shifted) Perron direction.  The +I shift makes the
// iteration matrix primitive on a strongly connected block, so both bracket
// ends converge.
double block_radius(const Block& b, double tol, int max_iter, std::vector<double>* perron) {
    std::size_t n = b.sites.size();
    if (n == 1 && b.rows[0].empty()) {
        if (perron) *perron = {1.0};
        return 0.0;
    }
    std::vector<double> x(n, 1.0), y(n);
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        double ymax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double s = x[i];  // shift term
            for (const auto& e : b.rows[i]) s += e.value * x[static_cast<std::size_t>(e.col)];
            y[i] = s;
            ymax = std::max(ymax, s);
        }
        double cur_lo = std::numeric_limits<double>::infinity(), cur_hi = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double r = y[i] / x[i];
            cur_lo = std::min(cur_lo, r);
            cur_hi = std::max(cur_hi, r);
        }
        lo = std::max(lo, cur_lo);
        hi = std::min(hi, cur_hi);
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ymax;
        if (hi - lo <= tol * std::max(1.0, hi)) {
            if (perron) *perron = x;
            return 0.5 * (lo + hi) - 1.0;
        }
    }
    throw iteration_error("spectral_radius: power iteration did not converge", lo - 1.0, hi - 1.0);
}

}  // namespace

ClassDecomposition class_decomposition(const Kernel& alpha, double tol, int max_iter) {
    ClassDecomposition d;
    TarjanState t(alpha);
    for (std::size_t v = 0; v < alpha.size(); ++v)
        if (t.index[v] < 0) t.run(static_cast<site_index>(v));
    d.classes = std::move(t.components);

    d.class_of.assign(alpha.size(), -1);
    for (std::size_t c = 0; c < d.classes.size(); ++c)
        for (site_index s : d.classes[c]) d.class_of[static_cast<std::size_t>(s)] = static_cast<site_index>(c);

    d.dag_children.resize(d.classes.size());
    d.is_final.assign(d.classes.size(), true);
    for (std::size_t v = 0; v < alpha.size(); ++v) {
        int cv = d.class_of[v];
        for (const auto& e : alpha.row(static_cast<site_index>(v))) {
            int cw = d.class_of[static_cast<std::size_t>(e.col)];
            if (cw != cv) {
                auto& ch = d.dag_children[static_cast<std::size_t>(cv)];
                if (std::find(ch.begin(), ch.end(), cw) == ch.end()) ch.push_back(cw);
                d.is_final[static_cast<std::size_t>(cv)] = false;
            }
        }
    }

    d.class_radius.resize(d.classes.size());
    for (std::size_t c = 0; c < d.classes.size(); ++c) {
        Block b = extract_block(alpha, d.classes[c]);
        d.class_radius[c] = block_radius(b, tol, max_iter, nullptr);
    }
    return d;
}

double spectral_radius(const Kernel& a, double tol, int max_iter) {
    ClassDecomposition d = class_decomposition(a, tol, max_iter);
    double best = 0.0;
    for (double r : d.class_radius) best = std::max(best, r);
    return best;
}

namespace {

// Truncated Neumann series w_J = sum_k alpha_JJ^k b; valid for spr < 1.
// Returns false if the series fails to settle (witness construction then
// falls back to "no witness").
bool neumann_solve(const Block& b, const std::vector<double>& rhs, std::vector<double>& out) {
    std::size_t n = b.sites.size();
    out.assign(n, 0.0);
    std::vector<double> term = rhs, next(n);
    for (int k = 0; k < 200000; ++k) {
        double tmax = 0.0, omax = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            out[i] += term[i];
            tmax = std::max(tmax, std::abs(term[i]));
            omax = std::max(omax, std::abs(out[i]));
        }
        if (!std::isfinite(omax)) return false;
        if (tmax <= 1e-14 * std::max(1.0, omax)) return true;
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (const auto& e : b.rows[i]) s += e.value * term[static_cast<std::size_t>(e.col)];
            next[i] = s;
        }
        term.swap(next);
    }
    return false;
}

}  // namespace

FhReport check_fh(const Kernel& alpha, double tol) {
    FhReport rep;
    rep.decomposition = class_decomposition(alpha);
    const ClassDecomposition& d = rep.decomposition;

    rep.holds = true;
    for (std::size_t c = 0; c < d.count(); ++c) {
        double r = d.class_radius[c];
        if (r > 1.0 + tol) {
            rep.holds = false;
            rep.violating_class = static_cast<int>(c);
            rep.radius_excess = std::max(rep.radius_excess, r - 1.0);
        } else if (r >= 1.0 - tol && !d.is_final[c]) {
            rep.holds = false;
            if (!rep.violating_class) rep.violating_class = static_cast<int>(c);
        }
    }
    if (!rep.holds) return rep;

    // Witness assembly, children before parents.  Order classes by DAG depth.
    std::size_t nc = d.count();
    std::vector<int> order(nc);
    {
        std::vector<int> outdeg(nc, 0), tmp;
        std::vector<std::vector<int>> parents(nc);
        for (std::size_t c = 0; c < nc; ++c) {
            outdeg[c] = static_cast<int>(d.dag_children[c].size());
            for (int ch : d.dag_children[c]) parents[static_cast<std::size_t>(ch)].push_back(static_cast<int>(c));
        }
        for (std::size_t c = 0; c < nc; ++c)
            if (outdeg[c] == 0) tmp.push_back(static_cast<int>(c));
        std::size_t pos = 0;
        while (pos < tmp.size()) {
            int c = tmp[pos++];
            for (int p : parents[static_cast<std::size_t>(c)])
                if (--outdeg[static_cast<std::size_t>(p)] == 0) tmp.push_back(p);
        }
        order = tmp;  // sinks first
    }

    WeightVector w(alpha.space_ptr(), 1.0);
    bool built = true;
    for (int c : order) {
        const auto& sites = d.classes[static_cast<std::size_t>(c)];
        Block b = extract_block(alpha, sites);
        std::vector<double> wj;
        if (d.class_radius[static_cast<std::size_t>(c)] >= 1.0 - tol) {
            // critical final class: Perron vector of alpha_JJ
            try {
                block_radius(b, 1e-13, 200000, &wj);
            } catch (const iteration_error&) {
                built = false;
                break;
            }
        } else {
            std::vector<double> rhs(sites.size(), 1.0);
            for (std::size_t i = 0; i < sites.size(); ++i) {
                for (const auto& e : alpha.row(sites[i])) {
                    if (d.class_of[static_cast<std::size_t>(e.col)] != c)
                        rhs[i] += e.value * w[e.col];
                }
            }
            if (!neumann_solve(b, rhs, wj)) {
                built = false;
                break;
            }
        }
        for (std::size_t i = 0; i < sites.size(); ++i) {
            if (!(wj[i] > 0.0) || !std::isfinite(wj[i])) {
                built = false;
                break;
            }
            w[sites[i]] = wj[i];
        }
        if (!built) break;
    }

    if (built && is_subinvariant(alpha, w, 1e-10))
        rep.witness = std::move(w);
    return rep;
}

}  // namespace cleankit
