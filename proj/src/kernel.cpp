#include "cleankit/kernel.hpp"

#include <algorithm>
#include <cmath>

namespace cleankit {

Kernel::Kernel(std::shared_ptr<const SiteSpace> space) : space_(std::move(space)) {
    rows_.resize(space_->size());
}

namespace {
inline bool entry_col_less(const Kernel::Entry& e, site_index col) { return e.col < col; }
}  // namespace

void Kernel::set(site_index row, site_index col, double value) {
    if (value < 0.0) throw contract_error("Kernel::set: negative entry");
    auto& r = rows_[static_cast<std::size_t>(row)];
    auto it = std::lower_bound(r.begin(), r.end(), col, entry_col_less);
    bool present = it != r.end() && it->col == col;
    if (value == 0.0) {
        if (present) r.erase(it);
        return;
    }
    if (present)
        it->value = value;
    else
        r.insert(it, {col, value});
}

void Kernel::add(site_index row, site_index col, double value) {
    set(row, col, at(row, col) + value);
}

double Kernel::at(site_index row, site_index col) const {
    const auto& r = rows_[static_cast<std::size_t>(row)];
    auto it = std::lower_bound(r.begin(), r.end(), col, entry_col_less);
    return it != r.end() && it->col == col ? it->value : 0.0;
}

void Kernel::set_row(site_index row, std::vector<Entry> entries) {
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.col < b.col; });
    std::vector<Entry> merged;
    merged.reserve(entries.size());
    for (const Entry& e : entries) {
        if (e.value < 0.0) throw contract_error("Kernel::set_row: negative entry");
        if (!merged.empty() && merged.back().col == e.col)
            merged.back().value += e.value;
        else
            merged.push_back(e);
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const Entry& e) { return e.value == 0.0; }),
                 merged.end());
    rows_[static_cast<std::size_t>(row)] = std::move(merged);
}

std::size_t Kernel::nnz() const {
    std::size_t n = 0;
    for (const auto& r : rows_) n += r.size();
    return n;
}

void Kernel::scale_row(site_index r, double factor) {
    if (factor < 0.0) throw contract_error("Kernel::scale_row: negative factor");
    for (Entry& e : rows_[static_cast<std::size_t>(r)]) e.value *= factor;
    if (factor == 0.0) rows_[static_cast<std::size_t>(r)].clear();
}

SignedVector::SignedVector(std::shared_ptr<const SiteSpace> space, double fill)
    : space_(std::move(space)), values_(space_->size(), fill) {}

DirtVector::DirtVector(std::shared_ptr<const SiteSpace> space, double fill)
    : SignedVector(std::move(space), fill) {
    if (fill < 0.0) throw contract_error("DirtVector: negative fill");
}

void DirtVector::set(site_index i, double v) {
    if (v < 0.0) throw contract_error("DirtVector::set: negative value");
    (*this)[i] = v;
}

void DirtVector::check() const {
    for (double v : values())
        if (v < 0.0) throw contract_error("DirtVector: negative entry");
}

WeightVector::WeightVector(std::shared_ptr<const SiteSpace> space, double fill)
    : SignedVector(std::move(space), fill) {
    if (fill <= 0.0) throw contract_error("WeightVector: weights must be positive");
}

void WeightVector::set(site_index i, double v) {
    if (v <= 0.0) throw contract_error("WeightVector::set: weights must be positive");
    (*this)[i] = v;
}

void WeightVector::check() const {
    for (double v : values())
        if (v <= 0.0) throw contract_error("WeightVector: nonpositive entry");
}

Profile::Profile(std::shared_ptr<const SiteSpace> space) : space_(std::move(space)) {}

Profile Profile::indicator(std::shared_ptr<const SiteSpace> space, const SiteSet& lambda) {
    Profile p(space);
    for (site_index i : lambda.members()) p.set(i, 1.0);
    return p;
}

Profile Profile::delta(std::shared_ptr<const SiteSpace> space, site_index x, double eps) {
    Profile p(space);
    p.set(x, eps);
    return p;
}

void Profile::set(site_index i, double v) {
    if (v < 0.0 || v > 1.0) throw contract_error("Profile::set: value outside [0,1]");
    if (v == 0.0)
        values_.erase(i);
    else
        values_[i] = v;
}

double Profile::at(site_index i) const {
    auto it = values_.find(i);
    return it == values_.end() ? 0.0 : it->second;
}

bool Profile::supported_in(const SiteSet& lambda) const {
    for (const auto& [i, v] : values_)
        if (v != 0.0 && !lambda.contains(i)) return false;
    return true;
}

Profile Profile::scaled(double factor) const {
    Profile p(space_);
    for (const auto& [i, v] : values_) p.set(i, v * factor);
    return p;
}

double weighted_vector_norm(const SignedVector& c, const WeightVector& w) {
    require_same_space(c.space(), w.space(), "weighted_vector_norm");
    double s = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i)
        s += std::abs(c.values()[i]) * w.values()[i];
    return s;
}

double weighted_operator_norm(const Kernel& a, const WeightVector& w) {
    require_same_space(a.space(), w.space(), "weighted_operator_norm");
    double best = 0.0;
    for (std::size_t x = 0; x < a.size(); ++x) {
        double rowsum = 0.0;
        for (const auto& e : a.row(static_cast<site_index>(x)))
            rowsum += std::abs(e.value) * w[e.col];
        best = std::max(best, rowsum / w[static_cast<site_index>(x)]);
    }
    return best;
}

bool is_subinvariant(const Kernel& alpha, const WeightVector& w, double tol) {
    require_same_space(alpha.space(), w.space(), "is_subinvariant");
    if (tol < 0.0) throw contract_error("is_subinvariant: tol must be >= 0");
    for (std::size_t x = 0; x < alpha.size(); ++x) {
        double rowsum = 0.0;
        for (const auto& e : alpha.row(static_cast<site_index>(x))) rowsum += e.value * w[e.col];
        if (rowsum > w[static_cast<site_index>(x)] * (1.0 + tol)) return false;
    }
    return true;
}

SignedVector apply_kernel(const SignedVector& c, const Kernel& alpha) {
    require_same_space(c.space(), alpha.space(), "apply_kernel");
    SignedVector out(c.space_ptr(), 0.0);
    for (std::size_t x = 0; x < c.size(); ++x) {
        double cx = c.values()[x];
        if (cx == 0.0) continue;
        for (const auto& e : alpha.row(static_cast<site_index>(x))) out[e.col] += cx * e.value;
    }
    return out;
}

SignedVector kernel_times(const Kernel& alpha, const SignedVector& w) {
    require_same_space(alpha.space(), w.space(), "kernel_times");
    SignedVector out(w.space_ptr(), 0.0);
    for (std::size_t x = 0; x < alpha.size(); ++x) {
        double s = 0.0;
        for (const auto& e : alpha.row(static_cast<site_index>(x))) s += e.value * w[e.col];
        out[static_cast<site_index>(x)] = s;
    }
    return out;
}

Kernel kernel_multiply(const Kernel& a, const Kernel& b) {
    require_same_space(a.space(), b.space(), "kernel_multiply");
    Kernel out(a.space_ptr());
    std::vector<double> accum(a.size(), 0.0);
    std::vector<Kernel::Entry> rowbuf;
    for (std::size_t r = 0; r < a.size(); ++r) {
        rowbuf.clear();
        for (const auto& ea : a.row(static_cast<site_index>(r))) {
            for (const auto& eb : b.row(ea.col)) {
                if (accum[static_cast<std::size_t>(eb.col)] == 0.0) rowbuf.push_back({eb.col, 0.0});
                accum[static_cast<std::size_t>(eb.col)] += ea.value * eb.value;
            }
        }
        for (auto& e : rowbuf) {
            e.value = accum[static_cast<std::size_t>(e.col)];
            accum[static_cast<std::size_t>(e.col)] = 0.0;
        }
        out.set_row(static_cast<site_index>(r), rowbuf);
    }
    return out;
}

Kernel kernel_restrict(const Kernel& a, const SiteSet& s) {
    Kernel out(a.space_ptr());
    std::vector<Kernel::Entry> rowbuf;
    for (std::size_t r = 0; r < a.size(); ++r) {
        if (!s.contains(static_cast<site_index>(r))) continue;
        rowbuf.clear();
        for (const auto& e : a.row(static_cast<site_index>(r)))
            if (s.contains(e.col)) rowbuf.push_back(e);
        out.set_row(static_cast<site_index>(r), rowbuf);
    }
    return out;
}

}  // namespace cleankit
