#ifndef CLEANKIT_CLOUD_HPP
#define CLEANKIT_CLOUD_HPP

#include <functional>
#include <optional>
#include <string>

#include "cleankit/cleaning.hpp"
#include "cleankit/marker.hpp"

namespace cleankit {

struct not_implemented_error : std::logic_error {
    using std::logic_error::logic_error;
};

/// Real-valued function on markers with finite stored support.  Weights are
/// kept in binary floating point, which is exact on the dyadic inputs the
/// tree identities are stated for.
class Cloud {
  public:
    explicit Cloud(std::shared_ptr<const SiteSpace> space);

    const SiteSpace& space() const { return *space_; }
    std::shared_ptr<const SiteSpace> space_ptr() const { return space_; }

    // constructors for the named clouds
    static Cloud zero(std::shared_ptr<const SiteSpace> space);
    static Cloud rho(std::shared_ptr<const SiteSpace> space, int k);  // level indicator
    static Cloud diag(const Profile& f);                              // I_f
    static Cloud diag_set(std::shared_ptr<const SiteSpace> space, const SiteSet& s);  // I_Lambda
    static Cloud beta(const Profile& f);                              // cleaning cloud

    void set(const Marker& m, double v);
    void add(const Marker& m, double v);
    double value(const Marker& m) const;

    std::size_t support_size() const { return weights_.size(); }
    int level_bound() const { return level_bound_; }  // max stored level, -1 if empty

    /// Prefix sum along the ancestors of m.
    double cumulative(const Marker& m) const;

    /// sup_eta sum_{sigma <= eta} |nu_sigma|
    double norm() const;

    bool nonnegative(double tol = 0.0) const;

    /// Applies f to every stored (marker, weight) pair.
    void for_each(const std::function<void(const Marker&, double)>& f) const;

    Cloud operator+(const Cloud& o) const;
    Cloud operator-(const Cloud& o) const;
    Cloud scaled(double s) const;
    Cloud abs() const;

    bool carried_by(const SiteSet& lambda, Marker* witness = nullptr) const;

    /// The dual accessor nu*(eta) = cum(eta) - cum(eta_-); not a true duality.
    double dual_value(const Marker& m) const;

  private:
    std::shared_ptr<const SiteSpace> space_;
    std::shared_ptr<MarkerStore> store_;
    std::unordered_map<MarkerStore::node_id, double> weights_;
    int level_bound_ = -1;

    friend Cloud convolve(const Cloud&, const Cloud&);
};

/// Exact convolution (nu1 * nu2)(eta) = sum splittings nu1(eta1) nu2(eta2);
/// level bounds add.
Cloud convolve(const Cloud& a, const Cloud& b);

Cloud convolve_power(const Cloud& a, int n);  // a^{*n}, a^{*0} = rho^0

/// Drops markers above the cap.  Iterating truncated convolutions stays
/// exact on the kept levels, since a splice never lowers level.
Cloud truncate(const Cloud& c, int level_cap);

// --- specials (infinite support, closed forms) ----------------------------

struct SpecialCloud {
    enum class Kind { pi_lambda, one, one_lambda };
    Kind kind;
    SiteSet lambda;  // unused for Kind::one
    std::string name() const;
};

SpecialCloud make_pi_lambda(const SiteSet& lambda);
SpecialCloud make_one();
SpecialCloud make_one_lambda(const SiteSet& lambda);

double special_value(const SpecialCloud& s, const Marker& m);
double special_cumulative(const SpecialCloud& s, const Marker& m);

/// pi_Lambda * pi_Lambda = pi_Lambda; any other special pair refuses.
SpecialCloud convolve(const SpecialCloud& a, const SpecialCloud& b);

/// Pointwise evaluation of mu * pi_Lambda for finite mu (used by the
/// absorption lemmas); the result has infinite support, so no materialized
/// cloud is returned.
double convolve_pi_value(const Cloud& mu, const SiteSet& lambda, const Marker& m);
double convolve_pi_cumulative(const Cloud& mu, const SiteSet& lambda, const Marker& m);

/// Visits every marker of level <= max_level (depth-first, site order); the
/// visitor returns whether to descend below the current marker.
void for_each_marker(const SiteSpace& space, int max_level,
                     const std::function<bool(const Marker&)>& visit);

// --- ordering and classification ------------------------------------------

struct OrderResult {
    bool holds = false;
    std::optional<Marker> witness;  // marker where cum(mu) > cum(nu)
};

/// Decides mu <= nu in the cumulative order over all markers, which is
/// complete once level_cap exceeds both level bounds (cumulatives stabilize
/// past the support).  Throws contract_error if the cap is insufficient.
OrderResult order_leq(const Cloud& mu, const Cloud& nu, int level_cap);

struct CloudClassReport {
    bool nonnegative = false;
    double norm_value = 0.0;
    bool in_R = false;
    std::vector<Marker> r_witness;   // {eta, suffix} on failure
    bool in_P = false;
    std::vector<Marker> p_witness;   // {eta, subsequence} on failure
    bool in_S = false;               // constant branch suprema
    double s_value = 0.0;            // the constant a when in_S
    std::optional<Marker> s_witness;
    std::optional<bool> carried;     // only when lambda given
    std::optional<Marker> carried_witness;
    std::optional<bool> lambda_regular;
    std::optional<Marker> regular_witness;
    int cap_used = 0;
};

/// Classifies a finitely supported cloud.  Membership in B is not decided;
/// build B members through the beta()/convolve() constructors instead.
CloudClassReport classify(const Cloud& nu, const std::optional<SiteSet>& lambda = std::nullopt,
                          double tol = 1e-12);

// --- operator realization ---------------------------------------------------

/// T_nu = sum_eta nu_eta I_{x0} alpha ... alpha I_{xk} as a sparse kernel.
Kernel realize(const Cloud& nu, const Kernel& alpha);

/// T_{pi_Lambda} delegates to the balayage series.
BalayageResult realize_pi(const SiteSet& lambda, const Kernel& alpha, const WeightVector& w,
                          double tol = 1e-12, int max_terms = 4096);

/// alpha^eta = product of alpha along the path.
double path_weight(const Kernel& alpha, const Marker& m);

// --- products of cleaning clouds -------------------------------------------

struct CloudTraceRow {
    int n = 0;
    double pointwise_dist = 0.0;       // max over markers (level <= cap) |mu_n - pi_Lambda|
    std::vector<double> level_dist;    // sup per level
};

struct CloudTrace {
    std::vector<CloudTraceRow> rows;
    Cloud final_cloud;
};

/// mu_n = beta_{h_1} * ... * beta_{h_n}, truncated to level_cap (exact on
/// the kept levels), with distances to pi_Lambda per step.
CloudTrace cloud_product_trace(const std::vector<Profile>& h, const SiteSet& lambda,
                               int level_cap, int n_steps);

/// Values of beta_{h}^{*N} on every prefix of a fixed chain, by the
/// two-term ancestor recursion; exact for dyadic h.
std::vector<double> beta_power_on_chain(const Profile& h, const Marker& chain, int steps);

}  // namespace cleankit

#endif
