#ifndef CLEANKIT_VERIFY_HPP
#define CLEANKIT_VERIFY_HPP

#include <random>
#include <string>

#include "cleankit/dense.hpp"

namespace cleankit {

struct VerifyReport {
    std::string name;
    std::string instance_digest;
    bool is_identity = true;
    double max_residual = 0.0;  // identities
    double min_slack = 0.0;     // inequalities (negative = violation)
    bool pass = false;
};

/// One randomly generated test instance shared by the verifier families.
struct VerifyInstance {
    std::shared_ptr<const SiteSpace> space;
    Kernel alpha;
    WeightVector w;     // subinvariant witness when fh = true
    bool fh = false;
    SiteSet lambda;
    std::vector<Profile> profiles;         // general [0,1] profiles on X
    std::vector<Profile> lambda_profiles;  // supported in lambda
    std::uint64_t seed = 0;

    VerifyInstance(std::shared_ptr<const SiteSpace> s, Kernel a, WeightVector ww)
        : space(std::move(s)), alpha(std::move(a)), w(std::move(ww)) {}

    std::string digest() const;
};

struct InstanceOptions {
    int n_sites = 6;
    double density = 0.5;
    bool ensure_fh = true;
    double theta_max = 0.9;  // row scale bound; keeps spr(I_L a I_L) under it
    int n_profiles = 6;
    int n_lambda_profiles = 6;
};

VerifyInstance random_instance(std::mt19937_64& rng, const InstanceOptions& opts);

std::vector<std::string> identity_names();
std::vector<std::string> inequality_names();

/// Builds both sides as dense matrices and reports the max absolute entry of
/// the difference; pass iff max_residual <= 1e-10 * scale with
/// scale = max(1, largest |entry| among both sides).
VerifyReport verify_identity(const std::string& name, const VerifyInstance& inst);

/// Entrywise slack checks; pass iff min_slack >= -1e-10 * scale.
VerifyReport verify_inequality(const std::string& name, const VerifyInstance& inst);

/// Runs the named verifiers (or all, for an empty list) on `trials` random
/// instances each and returns every report.
std::vector<VerifyReport> run_verifier_suite(const std::vector<std::string>& names, int trials,
                                             std::uint64_t seed, const InstanceOptions& opts);

}  // namespace cleankit

#endif
