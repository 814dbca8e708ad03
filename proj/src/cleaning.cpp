#include "cleankit/cleaning.hpp"

#include <algorithm>
#include <cmath>

namespace cleankit {

CleaningOperator::CleaningOperator(Profile f, const Kernel& alpha, bool dual)
    : f_(std::move(f)), alpha_(&alpha), dual_(dual) {
    require_same_space(f_.space(), alpha.space(), "CleaningOperator");
}

Kernel CleaningOperator::matrix() const {
    Kernel m(alpha_->space_ptr());
    std::size_t n = m.size();
    std::vector<Kernel::Entry> rowbuf;
    for (std::size_t x = 0; x < n; ++x) {
        site_index xi = static_cast<site_index>(x);
        double fx = f_.at(xi);
        rowbuf.clear();
        if (1.0 - fx != 0.0) rowbuf.push_back({xi, 1.0 - fx});
        if (!dual_) {
            if (fx != 0.0)
                for (const auto& e : alpha_->row(xi)) rowbuf.push_back({e.col, fx * e.value});
        } else {
            for (const auto& e : alpha_->row(xi)) {
                double fy = f_.at(e.col);
                if (fy != 0.0) rowbuf.push_back({e.col, e.value * fy});
            }
        }
        m.set_row(xi, rowbuf);
    }
    return m;
}

DirtVector apply_cleaning(const DirtVector& c, const CleaningOperator& op) {
    require_same_space(c.space(), op.kernel().space(), "apply_cleaning");
    DirtVector out = c;
    if (!op.dual()) {
        for (const auto& [x, fx] : op.profile().support()) {
            double moved = c[x] * fx;
            if (moved == 0.0) continue;
            out[x] -= moved;
            for (const auto& e : op.kernel().row(x)) out[e.col] += moved * e.value;
        }
    } else {
        // c beta*_f = c I_{1-f} + (c alpha) I_f
        SignedVector ca = apply_kernel(c, op.kernel());
        for (std::size_t y = 0; y < out.size(); ++y) {
            site_index yi = static_cast<site_index>(y);
            double fy = op.profile().at(yi);
            out[yi] = c[yi] * (1.0 - fy) + ca[yi] * fy;
        }
    }
    // clamp the tiny negatives produced by cancellation
    for (double& v : out.values())
        if (v < 0.0 && v > -1e-15) v = 0.0;
    return out;
}

double sweep_inplace(std::vector<double>& c, const Profile& f, const Kernel& alpha,
                     const WeightVector& w, const SiteSet& lambda) {
    double delta = 0.0;
    // two passes so simultaneous updates of a profile read consistent input
    std::vector<std::pair<site_index, double>> moved;
    moved.reserve(f.support().size());
    for (const auto& [x, fx] : f.support()) {
        double m = c[static_cast<std::size_t>(x)] * fx;
        if (m != 0.0) moved.push_back({x, m});
    }
    for (const auto& [x, m] : moved) {
        c[static_cast<std::size_t>(x)] -= m;
        if (lambda.contains(x)) delta -= m * w[x];
        for (const auto& e : alpha.row(x)) {
            c[static_cast<std::size_t>(e.col)] += m * e.value;
            if (lambda.contains(e.col)) delta += m * e.value * w[e.col];
        }
    }
    return delta;
}

BalayageResult balayage(const Kernel& alpha, const SiteSet& lambda, const WeightVector& w,
                        double tol, int max_terms) {
    require_same_space(alpha.space(), w.space(), "balayage");
    if (tol < 0.0) throw contract_error("balayage: tol must be >= 0");
    std::size_t n = alpha.size();
    SiteSet lambdac = lambda.complement();

    Kernel acc(alpha.space_ptr());
    // k = 0 term: I_{Lambda^c}
    for (site_index x : lambdac.members()) acc.set(x, x, 1.0);

    // Row-by-row accumulation: term rows live only on Lambda.
    // term_k = (I_L alpha)^k; contribution to Pi is term_k restricted to
    // columns in Lambda^c.  tail vector t_k = (I_L alpha I_L)^k w certifies
    // the remainder through the decomposition
    // Pi - Pi^(K) = (I_L alpha I_L)^(K+1) I_L Pi.
    std::vector<std::vector<Kernel::Entry>> term(n);
    for (site_index x : lambda.members()) term[static_cast<std::size_t>(x)] = {{x, 1.0}};

    std::vector<double> tail(n, 0.0);
    for (site_index x : lambda.members()) tail[static_cast<std::size_t>(x)] = w[x];

    auto tail_norm = [&]() {
        double b = 0.0;
        for (site_index x : lambda.members())
            b = std::max(b, tail[static_cast<std::size_t>(x)] / w[x]);
        return b;
    };

    BalayageResult res(lambda, std::move(acc));
    res.tail_bound = tail_norm();  // ||(I_L a I_L)^0|| restricted; refined below
    int k = 0;
    std::vector<double> row_accum(n, 0.0);
    while (k < max_terms) {
        // term <- term * alpha, restricted to rows already in Lambda
        ++k;
        bool any = false;
        for (site_index x : lambda.members()) {
            auto& row = term[static_cast<std::size_t>(x)];
            if (row.empty()) continue;
            std::vector<site_index> touched;
            for (const auto& te : row) {
                for (const auto& ae : alpha.row(te.col)) {
                    if (row_accum[static_cast<std::size_t>(ae.col)] == 0.0) touched.push_back(ae.col);
                    row_accum[static_cast<std::size_t>(ae.col)] += te.value * ae.value;
                }
            }
            row.clear();
            for (site_index col : touched) {
                double v = row_accum[static_cast<std::size_t>(col)];
                row_accum[static_cast<std::size_t>(col)] = 0.0;
                if (v == 0.0) continue;
                if (lambdac.contains(col))
                    res.matrix.add(x, col, v);  // lands outside Lambda: final
                else
                    row.push_back({col, v});    // stays in Lambda: keep iterating
                any = true;
            }
        }
        // tail <- (I_L alpha I_L) tail
        std::vector<double> nt(n, 0.0);
        for (site_index x : lambda.members()) {
            double s = 0.0;
            for (const auto& e : alpha.row(x))
                if (lambda.contains(e.col)) s += e.value * tail[static_cast<std::size_t>(e.col)];
            nt[static_cast<std::size_t>(x)] = s;
        }
        tail = std::move(nt);
        res.terms_used = k;
        res.tail_bound = tail_norm();
        if (res.tail_bound <= tol) {
            res.converged = true;
            break;
        }
        if (!any && res.tail_bound == 0.0) {
            res.converged = true;
            break;
        }
    }
    if (res.tail_bound <= tol) res.converged = true;
    return res;
}

DirtVector apply_balayage(const DirtVector& c, const BalayageResult& pi) {
    require_same_space(c.space(), pi.matrix.space(), "apply_balayage");
    SignedVector out = apply_kernel(c, pi.matrix);
    DirtVector d(c.space_ptr(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) d[static_cast<site_index>(i)] = std::max(0.0, out.values()[i]);
    return d;
}

}  // namespace cleankit
