#ifndef CLEANKIT_CLOUD_VERIFY_HPP
#define CLEANKIT_CLOUD_VERIFY_HPP

#include <random>

#include "cleankit/cloud.hpp"

namespace cleankit {

struct CloudVerifyReport {
    std::string name;
    std::string instance_digest;
    double max_residual = 0.0;
    bool pass = false;
};

/// Random instance for the tree-identity verifiers.  Cloud weights are drawn
/// dyadic (multiples of 1/64) so the coefficient identities evaluate exactly.
struct CloudInstance {
    std::shared_ptr<const SiteSpace> space;
    SiteSet lambda;
    std::vector<Profile> lambda_profiles;  // dyadic, supported in lambda
    std::vector<Profile> profiles;         // dyadic, general
    Cloud mu;                              // random nonnegative cloud
    Cloud nu;                              // random nonnegative cloud, norm <= 1
    std::uint64_t seed = 0;
    int level_cap = 4;

    std::string digest() const;
};

struct CloudInstanceOptions {
    int n_sites = 3;
    int cloud_levels = 2;
    int level_cap = 4;
};

CloudInstance random_cloud_instance(std::mt19937_64& rng, const CloudInstanceOptions& opts);

std::vector<std::string> cloud_identity_names();

/// Evaluates the named tree identity coefficientwise on all markers up to
/// the instance cap; residuals are exact zeros on the dyadic paths, and the
/// series-limit parts are bounded at 1e-10.
CloudVerifyReport verify_cloud_identity(const std::string& name, const CloudInstance& inst);

std::vector<CloudVerifyReport> run_cloud_suite(const std::vector<std::string>& names, int trials,
                                               std::uint64_t seed, const CloudInstanceOptions& opts);

}  // namespace cleankit

#endif
