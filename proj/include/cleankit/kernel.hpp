#ifndef CLEANKIT_KERNEL_HPP
#define CLEANKIT_KERNEL_HPP

#include <map>
#include <memory>
#include <vector>

#include "cleankit/types.hpp"

namespace cleankit {

/// Sparse nonnegative square matrix over a SiteSpace, row-major storage.
/// Absent entries are zero.
class Kernel {
  public:
    struct Entry {
        site_index col;
        double value;
    };

    explicit Kernel(std::shared_ptr<const SiteSpace> space);

    const SiteSpace& space() const { return *space_; }
    std::shared_ptr<const SiteSpace> space_ptr() const { return space_; }
    std::size_t size() const { return rows_.size(); }

    /// Sets alpha[row][col].  Values must be >= 0; setting 0 erases.
    /// Rows are kept sorted by column.
    void set(site_index row, site_index col, double value);
    void add(site_index row, site_index col, double value);
    double at(site_index row, site_index col) const;

    /// Replaces a whole row at once (duplicates merged); the fast path for
    /// the bulk builders and the sparse product.
    void set_row(site_index row, std::vector<Entry> entries);

    const std::vector<Entry>& row(site_index r) const { return rows_[static_cast<std::size_t>(r)]; }
    std::size_t nnz() const;

    /// Scales every entry of the given row by factor >= 0.
    void scale_row(site_index r, double factor);

  private:
    std::shared_ptr<const SiteSpace> space_;
    std::vector<std::vector<Entry>> rows_;
};

/// Dense vector over a SiteSpace; sign constraints are enforced by the
/// named wrappers below.
class SignedVector {
  public:
    SignedVector() = default;
    explicit SignedVector(std::shared_ptr<const SiteSpace> space, double fill = 0.0);

    const SiteSpace& space() const { return *space_; }
    std::shared_ptr<const SiteSpace> space_ptr() const { return space_; }
    std::size_t size() const { return values_.size(); }

    double operator[](site_index i) const { return values_[static_cast<std::size_t>(i)]; }
    double& operator[](site_index i) { return values_[static_cast<std::size_t>(i)]; }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

  private:
    std::shared_ptr<const SiteSpace> space_;
    std::vector<double> values_;
};

/// Nonnegative dirt distribution.
class DirtVector : public SignedVector {
  public:
    DirtVector() = default;
    explicit DirtVector(std::shared_ptr<const SiteSpace> space, double fill = 0.0);
    void set(site_index i, double v);
    /// Verifies every entry is >= -0 (rejects negatives within tolerance 0).
    void check() const;
};

/// Strictly positive weight vector.
class WeightVector : public SignedVector {
  public:
    WeightVector() = default;
    explicit WeightVector(std::shared_ptr<const SiteSpace> space, double fill = 1.0);
    void set(site_index i, double v);
    void check() const;
};

/// Function X -> [0,1]; absent values are 0.
class Profile {
  public:
    Profile() = default;
    explicit Profile(std::shared_ptr<const SiteSpace> space);
    static Profile indicator(std::shared_ptr<const SiteSpace> space, const SiteSet& lambda);
    static Profile delta(std::shared_ptr<const SiteSpace> space, site_index x, double eps = 1.0);

    const SiteSpace& space() const { return *space_; }
    std::shared_ptr<const SiteSpace> space_ptr() const { return space_; }

    void set(site_index i, double v);
    double at(site_index i) const;
    const std::map<site_index, double>& support() const { return values_; }

    /// True iff every nonzero value sits inside lambda.
    bool supported_in(const SiteSet& lambda) const;

    Profile scaled(double factor) const;

  private:
    std::shared_ptr<const SiteSpace> space_;
    std::map<site_index, double> values_;
};

// --- norms and subinvariance ---------------------------------------------

/// ||c||_w = sum_x |c_x| w_x
double weighted_vector_norm(const SignedVector& c, const WeightVector& w);

/// ||A||_{w->w} = sup_x w_x^{-1} sum_y |A_xy| w_y
double weighted_operator_norm(const Kernel& a, const WeightVector& w);

/// True iff (alpha w)_x <= w_x (1 + tol) for all x.
bool is_subinvariant(const Kernel& alpha, const WeightVector& w, double tol);

/// Row-vector product c <- c * alpha (dirt flows forward).
SignedVector apply_kernel(const SignedVector& c, const Kernel& alpha);

/// Vector product alpha * w (column action, used for subinvariance).
SignedVector kernel_times(const Kernel& alpha, const SignedVector& w);

/// Sparse matrix product A B.
Kernel kernel_multiply(const Kernel& a, const Kernel& b);

/// I_S A I_S: zeroes every row and column outside S.
Kernel kernel_restrict(const Kernel& a, const SiteSet& s);

}  // namespace cleankit

#endif
