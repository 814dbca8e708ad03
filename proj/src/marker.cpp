#include "cleankit/marker.hpp"

namespace cleankit {

Marker marker_splice(const Marker& a, const Marker& b) {
    if (a.empty() || b.empty()) throw contract_error("marker_splice: empty marker");
    if (a.back() != b.front()) throw contract_error("marker_splice: last(a) != first(b)");
    Marker out = a;
    out.insert(out.end(), b.begin() + 1, b.end());
    return out;
}

std::string marker_to_string(const SiteSpace& space, const Marker& m) {
    std::string s;
    for (std::size_t i = 0; i < m.size(); ++i) {
        if (i) s += ".";
        s += space.label(m[i]);
    }
    return s;
}

Marker marker_from_labels(const SiteSpace& space, const std::vector<std::string>& labels) {
    if (labels.empty()) throw contract_error("marker_from_labels: empty path");
    Marker m;
    m.reserve(labels.size());
    for (const auto& l : labels) m.push_back(space.index(l));
    return m;
}

namespace {
inline std::uint64_t edge_key(MarkerStore::node_id parent, site_index s) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(parent)) << 32) |
           static_cast<std::uint32_t>(s);
}
}  // namespace

MarkerStore::node_id MarkerStore::child_or_insert(node_id parent, site_index s) {
    auto key = edge_key(parent, s);
    auto it = edges_.find(key);
    if (it != edges_.end()) return it->second;
    std::lock_guard<std::mutex> lock(insert_mutex_);
    it = edges_.find(key);
    if (it != edges_.end()) return it->second;
    Node n;
    n.parent = parent;
    n.site = s;
    n.level = parent == npos ? 0 : nodes_[static_cast<std::size_t>(parent)].level + 1;
    n.first = parent == npos ? s : nodes_[static_cast<std::size_t>(parent)].first;
    node_id id = static_cast<node_id>(nodes_.size());
    nodes_.push_back(n);
    edges_.emplace(key, id);
    return id;
}

MarkerStore::node_id MarkerStore::intern(const Marker& m) {
    if (m.empty()) throw contract_error("MarkerStore::intern: empty marker");
    node_id cur = npos;
    for (site_index s : m) cur = child_or_insert(cur, s);
    return cur;
}

MarkerStore::node_id MarkerStore::find_child(node_id parent, site_index s) const {
    auto it = edges_.find(edge_key(parent, s));
    return it == edges_.end() ? npos : it->second;
}

MarkerStore::node_id MarkerStore::find(const Marker& m) const {
    node_id cur = npos;
    for (site_index s : m) {
        cur = find_child(cur, s);
        if (cur == npos) return npos;
    }
    return cur;
}

Marker MarkerStore::path(node_id n) const {
    Marker m;
    for (node_id cur = n; cur != npos; cur = nodes_[static_cast<std::size_t>(cur)].parent)
        m.push_back(nodes_[static_cast<std::size_t>(cur)].site);
    std::reverse(m.begin(), m.end());
    return m;
}

}  // namespace cleankit
