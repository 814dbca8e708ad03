#include "cleankit/dense.hpp"

#include <algorithm>
#include <cmath>

namespace cleankit {

DMat DMat::identity(std::size_t n) {
    DMat m(n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

DMat DMat::diagonal(const std::vector<double>& d) {
    DMat m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m.at(i, i) = d[i];
    return m;
}

DMat DMat::from_kernel(const Kernel& k) {
    DMat m(k.size());
    for (std::size_t r = 0; r < k.size(); ++r)
        for (const auto& e : k.row(static_cast<site_index>(r)))
            m.at(r, static_cast<std::size_t>(e.col)) = e.value;
    return m;
}

DMat DMat::operator+(const DMat& o) const {
    DMat m(n_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] + o.a_[i];
    return m;
}

DMat DMat::operator-(const DMat& o) const {
    DMat m(n_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] - o.a_[i];
    return m;
}

DMat DMat::operator*(const DMat& o) const {
    DMat m(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t k = 0; k < n_; ++k) {
            double aik = a_[i * n_ + k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n_; ++j) m.a_[i * n_ + j] += aik * o.a_[k * n_ + j];
        }
    return m;
}

DMat DMat::scaled(double s) const {
    DMat m(n_);
    for (std::size_t i = 0; i < a_.size(); ++i) m.a_[i] = a_[i] * s;
    return m;
}

double DMat::max_abs() const {
    double b = 0.0;
    for (double v : a_) b = std::max(b, std::abs(v));
    return b;
}

double DMat::min_entry() const {
    double b = a_.empty() ? 0.0 : a_[0];
    for (double v : a_) b = std::min(b, v);
    return b;
}

std::vector<double> DMat::mul_vec(const std::vector<double>& v) const {
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < n_; ++j) s += a_[i * n_ + j] * v[j];
        out[i] = s;
    }
    return out;
}

std::vector<double> DMat::vec_mul(const std::vector<double>& c) const {
    std::vector<double> out(n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        double ci = c[i];
        if (ci == 0.0) continue;
        for (std::size_t j = 0; j < n_; ++j) out[j] += ci * a_[i * n_ + j];
    }
    return out;
}

std::vector<double> DMat::solve(std::vector<double> b) const {
    DMat lu = *this;
    std::vector<std::size_t> perm(n_);
    for (std::size_t i = 0; i < n_; ++i) perm[i] = i;
    for (std::size_t col = 0; col < n_; ++col) {
        std::size_t piv = col;
        double best = std::abs(lu.at(col, col));
        for (std::size_t r = col + 1; r < n_; ++r)
            if (std::abs(lu.at(r, col)) > best) {
                best = std::abs(lu.at(r, col));
                piv = r;
            }
        if (best == 0.0) throw nonconvergence_error("DMat::solve: singular matrix");
        if (piv != col) {
            for (std::size_t j = 0; j < n_; ++j) std::swap(lu.at(col, j), lu.at(piv, j));
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n_; ++r) {
            double f = lu.at(r, col) / lu.at(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n_; ++j) lu.at(r, j) -= f * lu.at(col, j);
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n_, 0.0);
    for (std::size_t ri = n_; ri-- > 0;) {
        double s = b[ri];
        for (std::size_t j = ri + 1; j < n_; ++j) s -= lu.at(ri, j) * x[j];
        x[ri] = s / lu.at(ri, ri);
    }
    return x;
}

DMat DMat::solve_matrix(const DMat& b) const {
    DMat x(n_);
    for (std::size_t col = 0; col < n_; ++col) {
        std::vector<double> rhs(n_);
        for (std::size_t r = 0; r < n_; ++r) rhs[r] = b.at(r, col);
        std::vector<double> sol = solve(std::move(rhs));
        for (std::size_t r = 0; r < n_; ++r) x.at(r, col) = sol[r];
    }
    return x;
}

DMat dense_diag_profile(const Profile& f) {
    std::size_t n = f.space().size();
    DMat m(n);
    for (const auto& [i, v] : f.support()) m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = v;
    return m;
}

DMat dense_diag_one_minus(const Profile& f) {
    std::size_t n = f.space().size();
    DMat m(n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0 - f.at(static_cast<site_index>(i));
    return m;
}

DMat dense_diag_set(const SiteSet& s) {
    DMat m(s.space_size());
    for (site_index i : s.members()) m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(i)) = 1.0;
    return m;
}

DMat dense_cleaning(const Profile& f, const DMat& alpha, bool dual) {
    DMat If = dense_diag_profile(f);
    DMat I1f = dense_diag_one_minus(f);
    return dual ? I1f + alpha * If : I1f + If * alpha;
}

DMat dense_balayage(const DMat& alpha, const SiteSet& lambda) {
    std::size_t n = alpha.size();
    DMat ilam = dense_diag_set(lambda);
    DMat ilamc = dense_diag_set(lambda.complement());
    DMat system = DMat::identity(n) - ilam * alpha;
    return system.solve_matrix(ilamc);
}

double dense_operator_norm(const DMat& a, const WeightVector& w) {
    double best = 0.0;
    for (std::size_t x = 0; x < a.size(); ++x) {
        double s = 0.0;
        for (std::size_t y = 0; y < a.size(); ++y)
            s += std::abs(a.at(x, y)) * w[static_cast<site_index>(y)];
        best = std::max(best, s / w[static_cast<site_index>(x)]);
    }
    return best;
}

}  // namespace cleankit
