#ifndef CLEANKIT_DENSE_HPP
#define CLEANKIT_DENSE_HPP

#include <vector>

#include "cleankit/kernel.hpp"

namespace cleankit {

/// Small dense matrix used by the desk-scale verifiers (sites <= 64).
/// The application path stays sparse; this type exists for bit-simple
/// residual arithmetic.
class DMat {
  public:
    DMat() : n_(0) {}
    explicit DMat(std::size_t n, double fill = 0.0) : n_(n), a_(n * n, fill) {}

    static DMat identity(std::size_t n);
    static DMat diagonal(const std::vector<double>& d);
    static DMat from_kernel(const Kernel& k);

    std::size_t size() const { return n_; }
    double& at(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
    double at(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }

    DMat operator+(const DMat& o) const;
    DMat operator-(const DMat& o) const;
    DMat operator*(const DMat& o) const;
    DMat scaled(double s) const;

    /// Largest |entry|.
    double max_abs() const;
    /// Smallest entry (signed); used for slack checks.
    double min_entry() const;

    std::vector<double> mul_vec(const std::vector<double>& v) const;      // A v
    std::vector<double> vec_mul(const std::vector<double>& c) const;      // c A

    /// Solves A x = b by LU with partial pivoting; throws on singularity.
    std::vector<double> solve(std::vector<double> b) const;
    /// Solves A X = B columnwise.
    DMat solve_matrix(const DMat& b) const;

  private:
    std::size_t n_;
    std::vector<double> a_;
};

/// Diagonal matrix I_f from a profile (or any function values).
DMat dense_diag_profile(const Profile& f);
DMat dense_diag_one_minus(const Profile& f);
DMat dense_diag_set(const SiteSet& s);

/// beta_f = I_{1-f} + I_f alpha (dual: I_{1-f} + alpha I_f).
DMat dense_cleaning(const Profile& f, const DMat& alpha, bool dual = false);

/// Pi_Lambda = sum_k (I_Lambda alpha)^k I_{Lambda^c}, computed exactly by
/// solving (I - I_Lambda alpha) Pi = I_{Lambda^c}.  Requires
/// spr(I_Lambda alpha I_Lambda) < 1.
DMat dense_balayage(const DMat& alpha, const SiteSet& lambda);

/// sup_x w_x^{-1} sum_y |A_xy| w_y for a dense matrix.
double dense_operator_norm(const DMat& a, const WeightVector& w);

}  // namespace cleankit

#endif
