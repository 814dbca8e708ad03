#ifndef CLEANKIT_GALLERY_HPP
#define CLEANKIT_GALLERY_HPP

#include <map>

#include "cleankit/sweep.hpp"

namespace cleankit {

/// A finite, runnable truncation of one of the named constructions, with the
/// quantities that its qualitative claim is tested against.
struct GalleryInstance {
    std::string family;
    std::shared_ptr<const SiteSpace> space;
    Kernel alpha;
    DirtVector c;
    WeightVector w;
    SiteSet lambda;
    std::optional<Schedule> schedule;
    std::vector<long> stage_ends;          // step counts closing each stage
    std::vector<double> stage_bounds;      // per-stage dirt bounds (good sweep)
    std::vector<site_index> summit_sites;  // tree summit row
    std::optional<Cloud> cloud;            // figure clouds / shift cloud
    Kernel cloud_operator;                 // realized T_nu (shift family)
    std::vector<std::string> notes;        // truncation semantics

    GalleryInstance(std::string fam, std::shared_ptr<const SiteSpace> sp)
        : family(std::move(fam)),
          space(sp),
          alpha(sp),
          c(sp, 0.0),
          w(sp, 1.0),
          lambda(sp->size()),
          cloud_operator(sp) {}
};

using GalleryParams = std::map<std::string, double>;

std::vector<std::string> gallery_names();

/// Builders are pure: identical name+params give identical instances.
///   star_example            M (unbounded-row star; lambda = X)
///   unbounded_row_example   M (pairs x_i, y_j; alpha w pointwise finite, unbounded)
///   adversarial_tree        r_max, rho (constant rho_k; interleaved A/B sweeps)
///   good_sweep_tree         L, rho (constant), sigma = 1/l; branchwise sweep
///   shift_example           M (right shift, w = 1/j^2, level(eta) = first(eta) cloud)
///   fh_failure              M, eps
///   cloud_P_not_B | cloud_R_not_P | cloud_S1_not_R (two-site figure clouds)
GalleryInstance build_gallery(const std::string& name, const GalleryParams& params = {});

}  // namespace cleankit

#endif
