#include "cleankit/gallery.hpp"

#include <algorithm>
#include <cmath>

namespace cleankit {

namespace {

double param(const GalleryParams& p, const std::string& key, double dflt) {
    auto it = p.find(key);
    return it == p.end() ? dflt : it->second;
}

std::shared_ptr<const SiteSpace> tree_space(int max_branch) {
    // {0} plus (k,l) for 1 <= k <= l <= max_branch, labeled "k.l"
    std::vector<std::string> labels;
    labels.reserve(1 + static_cast<std::size_t>(max_branch) * (max_branch + 1) / 2);
    labels.push_back("0");
    for (int l = 1; l <= max_branch; ++l)
        for (int k = 1; k <= l; ++k) labels.push_back(std::to_string(k) + "." + std::to_string(l));
    return std::make_shared<SiteSpace>(SiteSpace(std::move(labels)));
}

inline site_index tree_site(int k, int l) {
    // position of (k,l) in the ordering above
    return 1 + (l - 1) * l / 2 + (k - 1);
}

GalleryInstance build_star(const GalleryParams& p) {
    int M = static_cast<int>(param(p, "M", 1000));
    if (M < 2) throw contract_error("star_example: M must be >= 2");
    auto space = std::make_shared<SiteSpace>(numbered_space(static_cast<std::size_t>(M + 1)));
    GalleryInstance g("star_example", space);
    for (int j = 1; j <= M; ++j) g.alpha.set(0, j, 1.0);
    for (int i = 0; i <= M; ++i) g.c.set(i, 1.0 / ((i + 1.0) * (i + 1.0)));
    g.lambda = SiteSet::all(space->size());
    g.notes.push_back("c (I_L a I_L) w = c_0 * M stands in for the untruncated +infinity; it grows linearly in M");
    return g;
}

GalleryInstance build_unbounded_row(const GalleryParams& p) {
    int M = static_cast<int>(param(p, "M", 200));
    if (M < 2) throw contract_error("unbounded_row_example: M must be >= 2");
    std::vector<std::string> labels;
    for (int i = 1; i <= M; ++i) labels.push_back("x" + std::to_string(i));
    for (int j = 1; j <= M; ++j) labels.push_back("y" + std::to_string(j));
    auto space = std::make_shared<SiteSpace>(SiteSpace(std::move(labels)));
    GalleryInstance g("unbounded_row_example", space);
    auto xi = [&](int i) { return static_cast<site_index>(i - 1); };
    auto yj = [&](int j) { return static_cast<site_index>(M + j - 1); };
    for (int i = 1; i <= M; ++i)
        for (int j = 1; j <= i; ++j) g.alpha.set(xi(i), yj(j), 1.0);
    for (int i = 1; i <= M; ++i) {
        g.c.set(xi(i), 1.0 / (double(i) * i));
        g.c.set(yj(i), 1.0 / (double(i) * i));
    }
    g.lambda = SiteSet::all(space->size());
    g.notes.push_back("(alpha w)_{x_i} = i is pointwise finite but unbounded: no C with I_L a I_L w <= C w uniformly in M");
    return g;
}

// interleaved sweep order 0, A_{L_1}, B_1, A_{L_2}, B_2, ..., A_{L_r}, B_r
GalleryInstance build_adversarial_tree(const GalleryParams& p) {
    int r_max = static_cast<int>(param(p, "r_max", 2));
    double rho = param(p, "rho", 1.0);
    if (r_max < 1 || r_max > 3) throw contract_error("adversarial_tree: r_max in 1..3");

    // L_r: smallest L with sum_{l=r}^{L} rho/2 >= 10^r + rho/2
    std::vector<int> L(static_cast<std::size_t>(r_max) + 1, 0);
    for (int r = 1; r <= r_max; ++r) {
        double need = std::pow(10.0, r) + rho / 2.0;
        L[static_cast<std::size_t>(r)] = r + static_cast<int>(std::ceil(2.0 * need / rho)) - 1;
    }
    int Lmax = L[static_cast<std::size_t>(r_max)];

    auto space = tree_space(Lmax);
    GalleryInstance g("adversarial_tree", space);
    // The untruncated root row is rho_1 / (2^l rho_0), which falls out of double
    // range past l ~ 1074.  Store the row scaled by 2^shift and put 2^{-shift}
    // on the root mass instead: the row is crossed exactly once on every
    // trajectory, so all dirt values are bit-for-bit those of the original
    // construction (the engine's extended-precision masses carry the small
    // intermediate values).
    int shift = Lmax > 1000 ? 1000 : 0;
    for (int l = 1; l <= Lmax; ++l)
        g.alpha.set(0, tree_site(1, l), std::exp2(static_cast<double>(shift - l)));
    for (int l = 2; l <= Lmax; ++l)
        for (int k = 1; k < l; ++k) g.alpha.set(tree_site(k, l), tree_site(k + 1, l), 2.0);
    g.c.set(0, rho * std::exp2(static_cast<double>(-shift)));
    g.lambda = SiteSet::all(space->size());
    for (int l = 1; l <= Lmax; ++l) g.summit_sites.push_back(tree_site(l, l));

    std::vector<site_index> order;
    order.push_back(0);
    for (int r = 1; r <= r_max; ++r) {
        for (int l = 2; l <= L[static_cast<std::size_t>(r)]; ++l)
            for (int k = 1; k < l; ++k) order.push_back(tree_site(k, l));
        g.stage_ends.push_back(static_cast<long>(order.size()));  // after A_{L_r}
        for (int b = 1; b <= r; ++b) order.push_back(tree_site(b, b));
    }
    g.schedule = Schedule::of_sites(g.lambda, std::move(order), 1.0);
    g.notes.push_back("branches truncated at L_{r_max}; sweeping a summit annihilates its mass");
    if (shift != 0)
        g.notes.push_back("root row stored scaled by 2^1000 with the root mass scaled down to match; dirt values are unchanged");
    return g;
}

GalleryInstance build_good_sweep_tree(const GalleryParams& p) {
    int Lmax = static_cast<int>(param(p, "L", 64));
    double rho = param(p, "rho", 1.0);
    double ratio = param(p, "rho_ratio", 1.0);  // rho_k = rho * ratio^k
    if (Lmax < 2) throw contract_error("good_sweep_tree: L must be >= 2");
    if (ratio <= 0.0 || ratio > 1.0) throw contract_error("good_sweep_tree: rho_ratio in (0,1]");

    // greedy gamma_{k,l} = min(sigma_l, (rho_k - partial)/2), sigma_l = 1/l
    std::vector<std::vector<double>> gamma(static_cast<std::size_t>(Lmax) + 1);
    for (int k = 1; k <= Lmax; ++k) {
        auto& row = gamma[static_cast<std::size_t>(k)];
        row.assign(static_cast<std::size_t>(Lmax) + 1, 0.0);
        double rho_k = rho * std::pow(ratio, k);
        double partial = 0.0;
        for (int l = k; l <= Lmax; ++l) {
            double v = std::min(1.0 / l, 0.5 * (rho_k - partial));
            row[static_cast<std::size_t>(l)] = v;
            partial += v;
        }
    }

    auto space = tree_space(Lmax);
    GalleryInstance g("good_sweep_tree", space);
    for (int l = 1; l <= Lmax; ++l)
        g.alpha.set(0, tree_site(1, l), gamma[1][static_cast<std::size_t>(l)] / rho);
    for (int l = 2; l <= Lmax; ++l)
        for (int k = 1; k < l; ++k)
            g.alpha.set(tree_site(k, l), tree_site(k + 1, l),
                        gamma[static_cast<std::size_t>(k + 1)][static_cast<std::size_t>(l)] /
                            gamma[static_cast<std::size_t>(k)][static_cast<std::size_t>(l)]);
    g.c.set(0, rho);
    g.lambda = SiteSet::all(space->size());

    // sweep 0, then branch by branch: (1,l), (2,l), ..., (l,l)
    std::vector<site_index> order;
    order.push_back(0);
    for (int l = 1; l <= Lmax; ++l) {
        for (int k = 1; k <= l; ++k) order.push_back(tree_site(k, l));
        g.stage_ends.push_back(static_cast<long>(order.size()));  // stage l: (l,l) swept
        // stagewise bound: sigma_{l+1} + sum_{l' >= l+2} gamma_{1,l'}
        double tail = 0.0;
        for (int lp = l + 2; lp <= Lmax; ++lp) tail += gamma[1][static_cast<std::size_t>(lp)];
        g.stage_bounds.push_back(1.0 / (l + 1.0) + tail);
    }
    g.schedule = Schedule::of_sites(g.lambda, std::move(order), 1.0);
    for (int l = 1; l <= Lmax; ++l) g.summit_sites.push_back(tree_site(l, l));
    g.notes.push_back("gamma tails beyond the truncation never enter: row 0 of alpha is strictly substochastic");
    return g;
}

GalleryInstance build_shift(const GalleryParams& p) {
    int M = static_cast<int>(param(p, "M", 1000));
    if (M < 4) throw contract_error("shift_example: M must be >= 4");
    std::vector<std::string> labels;
    for (int i = 1; i <= M; ++i) labels.push_back(std::to_string(i));
    auto space = std::make_shared<SiteSpace>(SiteSpace(std::move(labels)));
    GalleryInstance g("shift_example", space);
    for (int i = 1; i < M; ++i) g.alpha.set(i - 1, i, 1.0);
    for (int i = 1; i <= M; ++i) {
        g.c.set(i - 1, 1.0);
        g.w.set(i - 1, 1.0 / (double(i) * i));
    }
    g.lambda = SiteSet::all(space->size());

    // nu(eta) = 1 when level(eta) = first(eta): dirt at i jumps i levels,
    // landing on site 2i; truncation drops paths past M
    Cloud nu(space);
    Kernel t(space);
    for (int i = 1; 2 * i <= M; ++i) {
        Marker m;
        for (int s = i; s <= 2 * i; ++s) m.push_back(static_cast<site_index>(s - 1));
        nu.set(m, 1.0);
        t.set(static_cast<site_index>(i - 1), static_cast<site_index>(2 * i - 1), 1.0);
    }
    g.cloud = std::move(nu);
    g.cloud_operator = std::move(t);
    g.notes.push_back("(T_nu^k w)_i = 4^{-k}/i^2 while 2^k i <= M, 0 past the truncation");
    return g;
}

GalleryInstance build_fh_failure(const GalleryParams& p) {
    int M = static_cast<int>(param(p, "M", 64));
    double eps = param(p, "eps", 0.0);
    if (M < 3) throw contract_error("fh_failure: M must be >= 3");
    if (eps < 0.0 || eps >= 1.0) throw contract_error("fh_failure: eps in [0,1)");
    std::vector<std::string> labels;
    for (int i = 1; i <= M; ++i) labels.push_back(std::to_string(i));
    auto space = std::make_shared<SiteSpace>(SiteSpace(std::move(labels)));
    GalleryInstance g("fh_failure", space);
    if (eps > 0.0) g.alpha.set(0, 0, eps);
    for (int j = 2; j <= M; ++j) g.alpha.set(0, j - 1, 1.0);
    for (int i = 2; i < M; ++i) g.alpha.set(i, i - 1, 2.0);
    for (int i = 1; i <= M; ++i) g.c.set(i - 1, 1.0);
    g.lambda = SiteSet::all(space->size());
    g.notes.push_back("every finite truncation satisfies FH (witness needs w_1 >= (2^{M-1}-1) w_2, blowing up with M); the failure is an infinite-X phenomenon");
    return g;
}

GalleryInstance build_figure_cloud(const std::string& which) {
    auto space = std::make_shared<SiteSpace>(SiteSpace({"x", "y"}));
    GalleryInstance g(which, space);
    Cloud mu(space);
    auto set = [&](const std::vector<std::string>& path) {
        mu.set(marker_from_labels(*space, path), 1.0);
    };
    if (which == "cloud_P_not_B") {
        set({"x", "y"});
        set({"x", "x", "x"});
        set({"x", "x", "y"});
        set({"y", "x"});
        set({"y", "y", "x"});
        set({"y", "y", "y"});
    } else if (which == "cloud_R_not_P") {
        set({"x", "x"});
        set({"x", "y", "x", "x"});
        set({"x", "y", "x", "y"});
        set({"x", "y", "y"});
        set({"y", "x", "x"});
        set({"y", "x", "y"});
        set({"y", "y", "x"});
        set({"y", "y", "y"});
    } else {  // cloud_S1_not_R
        set({"x", "x"});
        set({"x", "y", "x"});
        set({"x", "y", "y"});
        set({"y"});
    }
    g.cloud = std::move(mu);
    g.lambda = SiteSet::all(2);
    return g;
}

}  // namespace

std::vector<std::string> gallery_names() {
    return {"star_example",   "unbounded_row_example", "adversarial_tree",
            "good_sweep_tree", "shift_example",        "fh_failure",
            "cloud_P_not_B",  "cloud_R_not_P",         "cloud_S1_not_R"};
}

GalleryInstance build_gallery(const std::string& name, const GalleryParams& params) {
    if (name == "star_example") return build_star(params);
    if (name == "unbounded_row_example") return build_unbounded_row(params);
    if (name == "adversarial_tree") return build_adversarial_tree(params);
    if (name == "good_sweep_tree") return build_good_sweep_tree(params);
    if (name == "shift_example") return build_shift(params);
    if (name == "fh_failure") return build_fh_failure(params);
    if (name == "cloud_P_not_B" || name == "cloud_R_not_P" || name == "cloud_S1_not_R")
        return build_figure_cloud(name);
    throw contract_error("build_gallery: unknown family '" + name + "'");
}

}  // namespace cleankit
