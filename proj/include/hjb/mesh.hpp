#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hjb {

using Point = std::vector<double>;

/// Relative geometric tolerance used library-wide (scaled by domain diameter
/// where a length scale is needed).
inline constexpr double kGeomTol = 1e-12;

class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LocationError : public MeshError {
public:
    using MeshError::MeshError;
};

/// Axis-aligned box [lower, upper] in R^d.
struct BoxDomain {
    std::vector<double> lower;
    std::vector<double> upper;

    static BoxDomain create(std::vector<double> lo, std::vector<double> up);

    std::size_t dim() const { return lower.size(); }
    double edge(std::size_t axis) const { return upper[axis] - lower[axis]; }
    double diameter() const;
    bool contains(const Point& x, double tol = 0.0) const;
    bool contains_box(const BoxDomain& inner, double tol = 0.0) const;
    Point clamp(Point x) const;
};

/// A query point expressed in the barycentric coordinates of its containing
/// simplex: x = sum_j weights[j] * vertex(vertex_indices[j]).
struct BarycentricLocation {
    std::vector<std::size_t> vertex_indices;  // d+1 global node indices
    std::vector<double> weights;              // nonnegative, sum to 1
};

/// Regular simplicial triangulation of a box: each grid cell is split into d!
/// simplices by the Kuhn/Freudenthal decomposition (sorting fractional
/// coordinates). Immutable after build; all queries are const and
/// thread-safe.
class Mesh {
public:
    static Mesh build(BoxDomain domain, std::vector<int> subdivisions);

    const BoxDomain& domain() const { return domain_; }
    const std::vector<int>& subdivisions() const { return subdivisions_; }
    std::size_t dim() const { return domain_.dim(); }
    std::size_t num_vertices() const { return n_vertices_; }

    /// Maximum simplex diameter: the diagonal of one grid cell.
    double mesh_size() const { return mesh_size_; }
    double cell_width(std::size_t axis) const { return cell_width_[axis]; }

    /// Vertex ordering is lexicographic over grid multi-indices (axis 0
    /// slowest).
    Point vertex(std::size_t index) const;

    /// Containing simplex and barycentric weights for x in the closed domain.
    /// Points on shared faces resolve to the lowest cell index, then the
    /// lowest local simplex index within the cell.
    BarycentricLocation locate(const Point& x) const;

    /// Piecewise-linear interpolation of nodal data at x.
    double interp_scalar(std::span<const double> nodal_values, const Point& x) const;

    /// Weighted combination sum_j mu_j(x) * eval(j) over the containing
    /// simplex; eval is invoked only at nodes with nonzero weight.
    template <class NodeEval>
    double interp_node_scalar(const BarycentricLocation& loc, NodeEval&& eval) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < loc.weights.size(); ++j) {
            if (loc.weights[j] != 0.0) {
                acc += loc.weights[j] * eval(loc.vertex_indices[j]);
            }
        }
        return acc;
    }

    /// Vector-valued counterpart; eval(j) must return a Point of fixed size.
    template <class NodeEval>
    Point interp_node_vector(const BarycentricLocation& loc, NodeEval&& eval) const {
        Point acc;
        for (std::size_t j = 0; j < loc.weights.size(); ++j) {
            if (loc.weights[j] == 0.0) {
                continue;
            }
            Point v = eval(loc.vertex_indices[j]);
            if (acc.empty()) {
                acc.assign(v.size(), 0.0);
            }
            for (std::size_t a = 0; a < v.size(); ++a) {
                acc[a] += loc.weights[j] * v[a];
            }
        }
        if (acc.empty()) {
            acc.assign(dim(), 0.0);
        }
        return acc;
    }

    /// Structured-text description (domain, subdivisions, vertex count, k).
    /// Vertices are never serialized; they regenerate deterministically.
    std::string describe() const;

private:
    Mesh() = default;

    BoxDomain domain_;
    std::vector<int> subdivisions_;
    std::vector<double> cell_width_;
    std::vector<std::size_t> stride_;
    std::size_t n_vertices_ = 0;
    double mesh_size_ = 0.0;
};

}  // namespace hjb
