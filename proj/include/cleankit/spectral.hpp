#ifndef CLEANKIT_SPECTRAL_HPP
#define CLEANKIT_SPECTRAL_HPP

#include <optional>
#include <vector>

#include "cleankit/kernel.hpp"

namespace cleankit {

/// Strongly connected components of the positivity digraph of a kernel,
/// the induced condensation DAG, and the spectral radius of each diagonal
/// block alpha_JJ.
struct ClassDecomposition {
    std::vector<std::vector<site_index>> classes;   // each SCC, sites in space order
    std::vector<site_index> class_of;               // site -> class id
    std::vector<std::vector<int>> dag_children;     // class -> classes it feeds (edges leaving J)
    std::vector<double> class_radius;               // spr(alpha_JJ)
    std::vector<bool> is_final;                     // no edges leaving J

    std::size_t count() const { return classes.size(); }
};

/// spr(A) for a finite nonnegative kernel, computed per strongly connected
/// component by power iteration on (alpha_JJ + I) with Collatz-Wielandt
/// brackets; overall radius is the max over components.
double spectral_radius(const Kernel& a, double tol = 1e-12, int max_iter = 100000);

ClassDecomposition class_decomposition(const Kernel& alpha, double tol = 1e-12,
                                       int max_iter = 100000);

struct FhReport {
    bool holds = false;
    std::optional<WeightVector> witness;            // w > 0 with alpha w <= w, when found
    std::optional<int> violating_class;             // class id breaking the criterion
    double radius_excess = 0.0;                     // max(spr - 1, 0) over violating classes
    ClassDecomposition decomposition;
};

/// Finite-X decision procedure for the existence of a strictly positive
/// subinvariant vector: holds iff spr(alpha) <= 1 and every class J with
/// spr(alpha_JJ) = 1 is final.  On success attempts to construct a witness
/// (Perron vector on critical final classes, truncated Neumann series
/// elsewhere) and validates it with is_subinvariant; if validation fails the
/// report keeps holds = true with witness = nullopt.
FhReport check_fh(const Kernel& alpha, double tol = 1e-9);

}  // namespace cleankit

#endif
