#include "cleankit/types.hpp"

#include <algorithm>

namespace cleankit {

SiteSpace::SiteSpace(std::vector<std::string> sites) : sites_(std::move(sites)) {
    if (sites_.empty()) throw contract_error("SiteSpace: must be nonempty");
    index_.reserve(sites_.size());
    for (std::size_t i = 0; i < sites_.size(); ++i) {
        auto [it, inserted] = index_.emplace(sites_[i], static_cast<site_index>(i));
        (void)it;
        if (!inserted) throw contract_error("SiteSpace: duplicate site identifier '" + sites_[i] + "'");
    }
}

site_index SiteSpace::index(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw contract_error("SiteSpace: unknown site '" + label + "'");
    return it->second;
}

SiteSpace numbered_space(std::size_t n) {
    std::vector<std::string> labels;
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) labels.push_back(std::to_string(i));
    return SiteSpace(std::move(labels));
}

SiteSet SiteSet::all(std::size_t space_size) {
    SiteSet s(space_size);
    std::fill(s.bits_.begin(), s.bits_.end(), true);
    return s;
}

SiteSet SiteSet::of(std::size_t space_size, const std::vector<site_index>& members) {
    SiteSet s(space_size);
    for (site_index i : members) s.insert(i);
    return s;
}

std::size_t SiteSet::count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), true));
}

SiteSet SiteSet::complement() const {
    SiteSet s(bits_.size());
    for (std::size_t i = 0; i < bits_.size(); ++i) s.bits_[i] = !bits_[i];
    return s;
}

std::vector<site_index> SiteSet::members() const {
    std::vector<site_index> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) out.push_back(static_cast<site_index>(i));
    return out;
}

}  // namespace cleankit
