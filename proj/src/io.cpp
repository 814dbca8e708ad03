#include "cleankit/io.hpp"

#include <cstdio>

namespace cleankit {

json kernel_to_json(const Kernel& k) {
    json j;
    j["sites"] = k.space().labels();
    json entries = json::array();
    for (std::size_t r = 0; r < k.size(); ++r)
        for (const auto& e : k.row(static_cast<site_index>(r)))
            entries.push_back({k.space().label(static_cast<site_index>(r)), k.space().label(e.col), e.value});
    j["entries"] = std::move(entries);
    return j;
}

Kernel kernel_from_json(const json& j) {
    auto space = std::make_shared<SiteSpace>(SiteSpace(j.at("sites").get<std::vector<std::string>>()));
    Kernel k(space);
    for (const auto& e : j.at("entries")) {
        if (!e.is_array() || e.size() != 3)
            throw contract_error("kernel_from_json: entries must be [row, col, value] triples");
        k.add(space->index(e[0].get<std::string>()), space->index(e[1].get<std::string>()),
              e[2].get<double>());
    }
    return k;
}

json vector_to_json(const SignedVector& v) {
    json j = json::object();
    for (std::size_t i = 0; i < v.size(); ++i) {
        double x = v[static_cast<site_index>(i)];
        if (x != 0.0) j[v.space().label(static_cast<site_index>(i))] = x;
    }
    return j;
}

namespace {
template <typename V>
V vector_from_json(const json& j, std::shared_ptr<const SiteSpace> space) {
    V v(space, std::is_same_v<V, WeightVector> ? 1.0 : 0.0);
    for (auto it = j.begin(); it != j.end(); ++it)
        v.set(space->index(it.key()), it.value().template get<double>());
    return v;
}
}  // namespace

DirtVector dirt_from_json(const json& j, std::shared_ptr<const SiteSpace> space) {
    return vector_from_json<DirtVector>(j, space);
}

WeightVector weight_from_json(const json& j, std::shared_ptr<const SiteSpace> space) {
    return vector_from_json<WeightVector>(j, space);
}

Profile profile_from_json(const json& j, std::shared_ptr<const SiteSpace> space) {
    Profile p(space);
    for (auto it = j.begin(); it != j.end(); ++it) p.set(space->index(it.key()), it.value().get<double>());
    return p;
}

json siteset_to_json(const SiteSet& s, const SiteSpace& space) {
    json j = json::array();
    for (site_index x : s.members()) j.push_back(space.label(x));
    return j;
}

SiteSet siteset_from_json(const json& j, const SiteSpace& space) {
    SiteSet s(space.size());
    for (const auto& l : j) s.insert(space.index(l.get<std::string>()));
    return s;
}

json cloud_to_json(const Cloud& c) {
    json markers = json::array();
    c.for_each([&](const Marker& m, double w) {
        json path = json::array();
        for (site_index x : m) path.push_back(c.space().label(x));
        markers.push_back({{"path", std::move(path)}, {"w", w}});
    });
    json j;
    j["markers"] = std::move(markers);
    j["level_bound"] = c.level_bound();
    return j;
}

Cloud cloud_from_json(const json& j, std::shared_ptr<const SiteSpace> space) {
    Cloud c(space);
    for (const auto& m : j.at("markers")) {
        Marker path = marker_from_labels(*space, m.at("path").get<std::vector<std::string>>());
        c.add(path, m.at("w").get<double>());
    }
    if (j.contains("level_bound") && !j["level_bound"].is_null()) {
        int bound = j["level_bound"].get<int>();
        if (c.level_bound() > bound)
            throw contract_error("cloud_from_json: marker above the declared level bound");
    }
    return c;
}

InstanceDoc instance_from_json(const json& j) {
    Kernel k = kernel_from_json(j.at("kernel"));
    auto space = k.space_ptr();
    InstanceDoc doc{space, std::move(k), DirtVector(space, 0.0), WeightVector(space, 1.0),
                    SiteSet::all(space->size()), std::nullopt};
    if (j.contains("c")) doc.c = dirt_from_json(j["c"], space);
    if (j.contains("w")) doc.w = weight_from_json(j["w"], space);
    if (j.contains("lambda")) doc.lambda = siteset_from_json(j["lambda"], *space);
    if (j.contains("cloud")) doc.cloud = cloud_from_json(j["cloud"], space);
    return doc;
}

json instance_to_json(const InstanceDoc& doc) {
    json j;
    j["kernel"] = kernel_to_json(doc.alpha);
    j["c"] = vector_to_json(doc.c);
    j["w"] = vector_to_json(doc.w);
    j["lambda"] = siteset_to_json(doc.lambda, *doc.space);
    if (doc.cloud) j["cloud"] = cloud_to_json(*doc.cloud);
    return j;
}

json gallery_to_json(const GalleryInstance& g) {
    json j;
    j["family"] = g.family;
    j["kernel"] = kernel_to_json(g.alpha);
    j["c"] = vector_to_json(g.c);
    j["w"] = vector_to_json(g.w);
    j["lambda"] = siteset_to_json(g.lambda, *g.space);
    if (g.cloud) j["cloud"] = cloud_to_json(*g.cloud);
    if (!g.stage_ends.empty()) j["stage_ends"] = g.stage_ends;
    if (!g.stage_bounds.empty()) j["stage_bounds"] = g.stage_bounds;
    if (!g.notes.empty()) j["notes"] = g.notes;
    if (g.schedule) {
        json s;
        s["lambda"] = siteset_to_json(g.schedule->lambda, *g.space);
        if (g.schedule->site_form()) {
            json order = json::array();
            for (site_index x : g.schedule->sites) order.push_back(g.space->label(x));
            s["sites"] = std::move(order);
            s["eps"] = g.schedule->site_eps;
        }
        j["schedule"] = std::move(s);
    }
    return j;
}

json report_to_json(const VerifyReport& r) {
    json j;
    j["name"] = r.name;
    j["instance_digest"] = r.instance_digest;
    if (r.is_identity)
        j["max_residual"] = r.max_residual;
    else
        j["min_slack"] = r.min_slack;
    j["pass"] = r.pass;
    return j;
}

json report_to_json(const CloudVerifyReport& r) {
    json j;
    j["name"] = r.name;
    j["instance_digest"] = r.instance_digest;
    j["max_residual"] = r.max_residual;
    j["pass"] = r.pass;
    return j;
}

namespace {
json marker_json(const Marker& m, const SiteSpace& space) {
    json j = json::array();
    for (site_index x : m) j.push_back(space.label(x));
    return j;
}
}  // namespace

json classify_to_json(const CloudClassReport& r, const SiteSpace& space) {
    json j;
    j["nonnegative"] = r.nonnegative;
    j["norm"] = r.norm_value;
    j["in_R"] = r.in_R;
    if (!r.r_witness.empty()) {
        j["r_witness"] = json::array();
        for (const auto& m : r.r_witness) j["r_witness"].push_back(marker_json(m, space));
    }
    j["in_P"] = r.in_P;
    if (!r.p_witness.empty()) {
        j["p_witness"] = json::array();
        for (const auto& m : r.p_witness) j["p_witness"].push_back(marker_json(m, space));
    }
    j["in_S"] = r.in_S;
    if (r.in_S) j["s_value"] = r.s_value;
    if (r.s_witness) j["s_witness"] = marker_json(*r.s_witness, space);
    if (r.carried) {
        j["carried_by_lambda"] = *r.carried;
        if (r.carried_witness) j["carried_witness"] = marker_json(*r.carried_witness, space);
    }
    if (r.lambda_regular) {
        j["lambda_regular"] = *r.lambda_regular;
        if (r.regular_witness) j["regular_witness"] = marker_json(*r.regular_witness, space);
    }
    j["cap_used"] = r.cap_used;
    return j;
}

json balayage_to_json(const BalayageResult& b) {
    json j;
    j["matrix"] = kernel_to_json(b.matrix);
    j["lambda"] = siteset_to_json(b.lambda, b.matrix.space());
    j["terms_used"] = b.terms_used;
    j["tail_bound"] = b.tail_bound;
    j["converged"] = b.converged;
    return j;
}

json battery_to_json(const BatteryReport& b) {
    json j;
    json conds = json::array();
    for (const auto& c : b.conditions) {
        json cj;
        cj["name"] = c.name;
        cj["holds"] = c.holds;
        json ev = json::array();
        for (const auto& v : c.evidence) {
            json vj;
            vj["finite"] = v.finite;
            vj["overflow"] = v.overflow;
            vj["value"] = v.value;
            vj["terms"] = v.terms;
            if (v.spr >= 0.0) vj["spr"] = v.spr;
            ev.push_back(std::move(vj));
        }
        cj["evidence"] = std::move(ev);
        conds.push_back(std::move(cj));
    }
    j["conditions"] = std::move(conds);
    j["hypothesis_C"] = b.hypothesis_C;
    j["hypothesis_bounded"] = b.hypothesis_bounded;
    j["all_agree"] = b.all_equivalent_agree;
    return j;
}

json fh_to_json(const FhReport& r, const SiteSpace& space) {
    json j;
    j["holds"] = r.holds;
    if (r.witness) j["witness"] = vector_to_json(*r.witness);
    if (r.violating_class) {
        json cls = json::array();
        for (site_index x : r.decomposition.classes[static_cast<std::size_t>(*r.violating_class)])
            cls.push_back(space.label(x));
        j["violating_class"] = std::move(cls);
        j["radius_excess"] = r.radius_excess;
    }
    json classes = json::array();
    for (std::size_t c = 0; c < r.decomposition.count(); ++c) {
        json cj;
        cj["sites"] = json::array();
        for (site_index x : r.decomposition.classes[c]) cj["sites"].push_back(space.label(x));
        cj["radius"] = r.decomposition.class_radius[c];
        cj["final"] = static_cast<bool>(r.decomposition.is_final[c]);
        classes.push_back(std::move(cj));
    }
    j["classes"] = std::move(classes);
    return j;
}

std::string config_digest(const json& j) {
    std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace cleankit
