#ifndef CLEANKIT_TYPES_HPP
#define CLEANKIT_TYPES_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cleankit {

/// Thrown when two objects live on different site spaces.
struct dimension_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a documented precondition is violated.
struct contract_error : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Thrown when an iterative procedure fails to converge; carries the best
/// bracket found so far.
struct iteration_error : std::runtime_error {
    double lower = 0.0;
    double upper = 0.0;
    iteration_error(const std::string& what, double lo, double hi)
        : std::runtime_error(what), lower(lo), upper(hi) {}
};

/// Thrown when a requested computation is outside the regime where it can
/// succeed (non-contraction, planner inapplicable).  Not a crash: callers
/// translate it into a non-convergence report.
struct nonconvergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using site_index = std::int32_t;

/// An ordered, finite collection of distinct site identifiers.  All other
/// objects reference sites by dense index into this list.
class SiteSpace {
  public:
    SiteSpace() = default;
    explicit SiteSpace(std::vector<std::string> sites);

    std::size_t size() const { return sites_.size(); }
    const std::string& label(site_index i) const { return sites_.at(static_cast<std::size_t>(i)); }
    const std::vector<std::string>& labels() const { return sites_; }

    /// Dense index of a site identifier; throws if unknown.
    site_index index(const std::string& label) const;
    bool contains(const std::string& label) const { return index_.count(label) != 0; }

    bool operator==(const SiteSpace& o) const { return sites_ == o.sites_; }
    bool operator!=(const SiteSpace& o) const { return !(*this == o); }

  private:
    std::vector<std::string> sites_;
    std::unordered_map<std::string, site_index> index_;
};

/// Convenience: sites "0", "1", ..., "n-1".
SiteSpace numbered_space(std::size_t n);

/// Subset of a SiteSpace with bitset semantics.
class SiteSet {
  public:
    SiteSet() = default;
    explicit SiteSet(std::size_t space_size) : bits_(space_size, false) {}
    static SiteSet all(std::size_t space_size);
    static SiteSet of(std::size_t space_size, const std::vector<site_index>& members);

    std::size_t space_size() const { return bits_.size(); }
    bool contains(site_index i) const { return bits_[static_cast<std::size_t>(i)]; }
    void insert(site_index i) { bits_[static_cast<std::size_t>(i)] = true; }
    void erase(site_index i) { bits_[static_cast<std::size_t>(i)] = false; }

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    bool is_all() const { return count() == bits_.size(); }
    SiteSet complement() const;

    std::vector<site_index> members() const;

    bool operator==(const SiteSet& o) const { return bits_ == o.bits_; }

  private:
    std::vector<bool> bits_;
};

inline void require_same_space(const SiteSpace& a, const SiteSpace& b, const char* what) {
    if (a != b) throw dimension_error(std::string(what) + ": mismatched site spaces");
}

}  // namespace cleankit

#endif
