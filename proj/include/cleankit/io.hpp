#ifndef CLEANKIT_IO_HPP
#define CLEANKIT_IO_HPP

#include "cleankit/battery.hpp"
#include "cleankit/cloud_verify.hpp"
#include "cleankit/gallery.hpp"
#include "cleankit/spectral.hpp"
#include "cleankit/verify.hpp"

// vendored single-header json
#include "json.hpp"

namespace cleankit {

using json = nlohmann::json;

/// Kernel document: {"sites": [...], "entries": [[row, col, value], ...]}
json kernel_to_json(const Kernel& k);
Kernel kernel_from_json(const json& j);

/// Vectors as {site: value} maps.
json vector_to_json(const SignedVector& v);
DirtVector dirt_from_json(const json& j, std::shared_ptr<const SiteSpace> space);
WeightVector weight_from_json(const json& j, std::shared_ptr<const SiteSpace> space);
Profile profile_from_json(const json& j, std::shared_ptr<const SiteSpace> space);

json siteset_to_json(const SiteSet& s, const SiteSpace& space);
SiteSet siteset_from_json(const json& j, const SiteSpace& space);

/// Cloud literal: {"markers": [{"path": ["x","y"], "w": 1.0}, ...],
///                 "level_bound": N}
json cloud_to_json(const Cloud& c);
Cloud cloud_from_json(const json& j, std::shared_ptr<const SiteSpace> space);

/// Instance bundle {"kernel": ..., "c": ..., "w": ..., "lambda": [...]}
struct InstanceDoc {
    std::shared_ptr<const SiteSpace> space;
    Kernel alpha;
    DirtVector c;
    WeightVector w;
    SiteSet lambda;
    std::optional<Cloud> cloud;
};
InstanceDoc instance_from_json(const json& j);
json instance_to_json(const InstanceDoc& doc);
json gallery_to_json(const GalleryInstance& g);

json report_to_json(const VerifyReport& r);
json report_to_json(const CloudVerifyReport& r);
json classify_to_json(const CloudClassReport& r, const SiteSpace& space);
json balayage_to_json(const BalayageResult& b);
json battery_to_json(const BatteryReport& b);
json fh_to_json(const FhReport& r, const SiteSpace& space);

/// FNV-1a digest of a canonical rendering; embedded in every CLI output.
std::string config_digest(const json& j);

}  // namespace cleankit

#endif
