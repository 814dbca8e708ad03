#ifndef CLEANKIT_CLEANING_HPP
#define CLEANKIT_CLEANING_HPP

#include "cleankit/kernel.hpp"

namespace cleankit {

/// The operator I_{1-f} + I_f alpha (dual = false) or I_{1-f} + alpha I_f
/// (dual = true).  Held by reference to its kernel; cheap to copy.
class CleaningOperator {
  public:
    CleaningOperator(Profile f, const Kernel& alpha, bool dual = false);

    const Profile& profile() const { return f_; }
    const Kernel& kernel() const { return *alpha_; }
    bool dual() const { return dual_; }

    /// Materializes the operator as a sparse kernel (entries >= 0).
    Kernel matrix() const;

  private:
    Profile f_;
    const Kernel* alpha_;
    bool dual_;
};

/// c <- c (I_{1-f} + I_f alpha).  Touches only supp(f) rows of alpha.
DirtVector apply_cleaning(const DirtVector& c, const CleaningOperator& op);

/// In-place sweep used by the schedule engine; returns the change in
/// sum_{x in lambda} c_x w_x so the caller can maintain running norms.
double sweep_inplace(std::vector<double>& c, const Profile& f, const Kernel& alpha,
                     const WeightVector& w, const SiteSet& lambda);

/// Truncated balayage Pi_Lambda^{(n)} = sum_{k<=n} (I_Lambda alpha)^k I_{Lambda^c}
/// with a certified bound on ||Pi_Lambda - Pi_Lambda^{(n)}||_{w->w}.
struct BalayageResult {
    SiteSet lambda;
    Kernel matrix;                 // the partial sum
    int terms_used = 0;
    double tail_bound = 0.0;       // ||(I_L alpha I_L)^{n+1}||_{w->w}
    bool converged = false;        // tail_bound <= tol

    BalayageResult(SiteSet l, Kernel m) : lambda(std::move(l)), matrix(std::move(m)) {}
};

/// Sums the series until the certified tail drops below tol or max_terms is
/// reached.  A non-contracting Lambda is reported through converged = false,
/// not an exception.
BalayageResult balayage(const Kernel& alpha, const SiteSet& lambda, const WeightVector& w,
                        double tol = 1e-12, int max_terms = 4096);

/// c * Pi_Lambda for a computed balayage.
DirtVector apply_balayage(const DirtVector& c, const BalayageResult& pi);

}  // namespace cleankit

#endif
