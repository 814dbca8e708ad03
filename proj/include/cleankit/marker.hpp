#ifndef CLEANKIT_MARKER_HPP
#define CLEANKIT_MARKER_HPP

#include <cstdint>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "cleankit/types.hpp"

namespace cleankit {

/// A marker is a nonempty finite sequence of sites; level = length - 1.
using Marker = std::vector<site_index>;

inline int marker_level(const Marker& m) { return static_cast<int>(m.size()) - 1; }
inline site_index marker_first(const Marker& m) { return m.front(); }
inline site_index marker_last(const Marker& m) { return m.back(); }

/// Splice eta1 * eta2 (last(eta1) must equal first(eta2)).
Marker marker_splice(const Marker& a, const Marker& b);

std::string marker_to_string(const SiteSpace& space, const Marker& m);
Marker marker_from_labels(const SiteSpace& space, const std::vector<std::string>& labels);

/// Prefix-tree store interning marker paths.  Node ids are stable; the
/// structure is append-only, so concurrent readers are safe while insertion
/// is serialized.
class MarkerStore {
  public:
    using node_id = std::int32_t;
    static constexpr node_id npos = -1;

    /// Interns a path and returns its node id.
    node_id intern(const Marker& m);
    /// Child lookup without insertion; npos if absent.
    node_id find_child(node_id parent, site_index s) const;
    node_id find(const Marker& m) const;

    node_id parent(node_id n) const { return nodes_[static_cast<std::size_t>(n)].parent; }
    site_index site(node_id n) const { return nodes_[static_cast<std::size_t>(n)].site; }
    int level(node_id n) const { return nodes_[static_cast<std::size_t>(n)].level; }
    site_index first(node_id n) const { return nodes_[static_cast<std::size_t>(n)].first; }

    Marker path(node_id n) const;
    std::size_t size() const { return nodes_.size(); }

  private:
    struct Node {
        node_id parent;
        site_index site;
        site_index first;
        int level;
    };
    node_id child_or_insert(node_id parent, site_index s);

    std::vector<Node> nodes_;
    std::unordered_map<std::uint64_t, node_id> edges_;  // (parent, site) -> child
    std::mutex insert_mutex_;
};

}  // namespace cleankit

#endif
