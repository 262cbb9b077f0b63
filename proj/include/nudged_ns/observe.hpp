#pragma once

#include "nudged_ns/fespace.hpp"
#include "nudged_ns/linalg.hpp"

#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace nudged_ns {

enum class ObserverKind { coarse_p0_mean, coarse_p0_centroid, identity };

const char* to_string(ObserverKind k);
/// Throws ConfigError on an unknown name.
ObserverKind parse_observer_kind(std::string_view name);

/// Observation operator I_H acting on coefficient vectors of a fine space.
///
/// The coarse kinds map a fine field to one value per coarse cell and
/// component: the cell mean (coarse_p0_mean) or the value at the coarse
/// centroid (coarse_p0_centroid). The fine mesh must be nested in the coarse
/// one. The identity kind returns its input unchanged.
class Observer {
public:
    Observer(ObserverKind kind, const FESpace& fine, std::shared_ptr<const Mesh> coarse);

    ObserverKind kind() const { return kind_; }
    int components() const { return components_; }
    int n_fine_dofs() const { return n_fine_; }
    /// Number of coarse cells; 0 for the identity kind.
    int n_coarse() const { return coarse_ ? coarse_->num_cells() : 0; }
    const Mesh* coarse_mesh() const { return coarse_.get(); }

    /// Coarse cell containing each fine cell.
    const std::vector<int>& parent() const { return parent_; }

    /// Scalar map fine dofs -> coarse cell values (cell means or centroid samples).
    const SparseMatrix& restriction() const { return sample_; }
    /// Scalar cell-mean map, R_Kj = |K|^-1 * integral over K of phi_j.
    const SparseMatrix& averaging() const { return mean_; }

    /// Coarse values interleaved by component, or v itself for the identity kind.
    std::vector<double> observe(std::span<const double> v) const;

private:
    ObserverKind kind_;
    int components_ = 1;
    int n_fine_ = 0;
    std::shared_ptr<const Mesh> coarse_;
    std::vector<int> parent_;
    SparseMatrix mean_;
    SparseMatrix sample_;
};

/// Coarse cell of every fine cell; throws NestingError when a fine cell is
/// not contained in a single coarse cell.
std::vector<int> nest(const Mesh& fine, const Mesh& coarse);

struct InterpRatio {
    double H = 0.0;
    double error = 0.0;      // ||I_H phi - phi||
    double grad_norm = 0.0;  // ||grad phi||
    double ratio = 0.0;      // error / (H ||grad phi||), 0 when grad_norm vanishes
};

/// Empirical interpolation constant on unit-square meshes with H = 1/n for
/// each n. The fine space is P2 on the once-refined square (h = H/2) and phi
/// enters through its fine interpolant.
std::vector<InterpRatio> measure_interp_constant(ObserverKind kind, const ScalarFunction& phi,
                                                 std::span<const int> coarse_n);

} // namespace nudged_ns
