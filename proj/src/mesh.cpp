#include "hjb/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace hjb {

BoxDomain BoxDomain::create(std::vector<double> lo, std::vector<double> up) {
    if (lo.empty() || lo.size() != up.size()) {
        throw MeshError("domain: lower and upper must be nonempty and of equal dimension");
    }
    for (std::size_t a = 0; a < lo.size(); ++a) {
        if (!(lo[a] < up[a])) {
            throw MeshError("domain: lower >= upper on axis " + std::to_string(a));
        }
        if (!std::isfinite(lo[a]) || !std::isfinite(up[a])) {
            throw MeshError("domain: non-finite bound on axis " + std::to_string(a));
        }
    }
    BoxDomain d;
    d.lower = std::move(lo);
    d.upper = std::move(up);
    return d;
}

double BoxDomain::diameter() const {
    double s = 0.0;
    for (std::size_t a = 0; a < dim(); ++a) {
        s += edge(a) * edge(a);
    }
    return std::sqrt(s);
}

bool BoxDomain::contains(const Point& x, double tol) const {
    if (x.size() != dim()) {
        return false;
    }
    for (std::size_t a = 0; a < dim(); ++a) {
        if (x[a] < lower[a] - tol || x[a] > upper[a] + tol) {
            return false;
        }
    }
    return true;
}

bool BoxDomain::contains_box(const BoxDomain& inner, double tol) const {
    if (inner.dim() != dim()) {
        return false;
    }
    for (std::size_t a = 0; a < dim(); ++a) {
        if (inner.lower[a] < lower[a] - tol || inner.upper[a] > upper[a] + tol) {
            return false;
        }
    }
    return true;
}

Point BoxDomain::clamp(Point x) const {
    for (std::size_t a = 0; a < dim(); ++a) {
        x[a] = std::min(std::max(x[a], lower[a]), upper[a]);
    }
    return x;
}

Mesh Mesh::build(BoxDomain domain, std::vector<int> subdivisions) {
    if (subdivisions.size() != domain.dim()) {
        throw MeshError("mesh: subdivisions dimension does not match domain");
    }
    for (std::size_t a = 0; a < subdivisions.size(); ++a) {
        if (subdivisions[a] < 1) {
            throw MeshError("mesh: subdivisions must be >= 1 on axis " + std::to_string(a));
        }
    }
    Mesh m;
    m.domain_ = std::move(domain);
    m.subdivisions_ = std::move(subdivisions);
    const std::size_t d = m.domain_.dim();
    m.cell_width_.resize(d);
    double diag2 = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
        m.cell_width_[a] = m.domain_.edge(a) / m.subdivisions_[a];
        diag2 += m.cell_width_[a] * m.cell_width_[a];
    }
    m.mesh_size_ = std::sqrt(diag2);
    // Lexicographic ordering: axis 0 slowest, last axis contiguous.
    m.stride_.assign(d, 1);
    for (std::size_t a = d; a-- > 1;) {
        m.stride_[a - 1] = m.stride_[a] * (m.subdivisions_[a] + 1);
    }
    m.n_vertices_ = m.stride_[0] * (m.subdivisions_[0] + 1);
    return m;
}

Point Mesh::vertex(std::size_t index) const {
    const std::size_t d = dim();
    Point x(d);
    for (std::size_t a = 0; a < d; ++a) {
        const std::size_t ia = (index / stride_[a]) % (subdivisions_[a] + 1);
        x[a] = domain_.lower[a] + static_cast<double>(ia) * cell_width_[a];
    }
    // Make the last vertex along each axis land exactly on the bound.
    for (std::size_t a = 0; a < d; ++a) {
        const std::size_t ia = (index / stride_[a]) % (subdivisions_[a] + 1);
        if (static_cast<int>(ia) == subdivisions_[a]) {
            x[a] = domain_.upper[a];
        }
    }
    return x;
}

BarycentricLocation Mesh::locate(const Point& x) const {
    const std::size_t d = dim();
    if (x.size() != d) {
        throw LocationError("locate: point dimension mismatch");
    }
    const double tol = kGeomTol * domain_.diameter();
    std::vector<std::size_t> cell(d);
    std::vector<double> frac(d);
    for (std::size_t a = 0; a < d; ++a) {
        if (x[a] < domain_.lower[a] - tol || x[a] > domain_.upper[a] + tol) {
            std::ostringstream os;
            os << "locate: coordinate " << a << " = " << x[a] << " outside ["
               << domain_.lower[a] << ", " << domain_.upper[a] << "]";
            throw LocationError(os.str());
        }
        double t = (x[a] - domain_.lower[a]) / cell_width_[a];
        t = std::min(std::max(t, 0.0), static_cast<double>(subdivisions_[a]));
        // Face points resolve to the lower cell.
        long c = static_cast<long>(std::ceil(t)) - 1;
        c = std::min(std::max(c, 0L), static_cast<long>(subdivisions_[a]) - 1);
        cell[a] = static_cast<std::size_t>(c);
        frac[a] = std::min(std::max(t - static_cast<double>(c), 0.0), 1.0);
    }
    // Kuhn decomposition: traverse axes by decreasing fractional coordinate;
    // ties go to the lower axis index (lowest local simplex).
    std::vector<std::size_t> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&frac](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });

    BarycentricLocation loc;
    loc.vertex_indices.resize(d + 1);
    loc.weights.resize(d + 1);

    std::size_t base = 0;
    for (std::size_t a = 0; a < d; ++a) {
        base += cell[a] * stride_[a];
    }
    loc.vertex_indices[0] = base;
    loc.weights[0] = 1.0 - frac[order[0]];
    std::size_t idx = base;
    for (std::size_t j = 0; j < d; ++j) {
        idx += stride_[order[j]];
        loc.vertex_indices[j + 1] = idx;
        const double next = (j + 1 < d) ? frac[order[j + 1]] : 0.0;
        loc.weights[j + 1] = frac[order[j]] - next;
    }
    for (double& w : loc.weights) {
        if (w < 0.0) {
            w = 0.0;  // rounding guard; construction keeps weights >= 0
        }
    }
    return loc;
}

double Mesh::interp_scalar(std::span<const double> nodal_values, const Point& x) const {
    if (nodal_values.size() != n_vertices_) {
        throw MeshError("interp_scalar: nodal value count mismatch");
    }
    const auto loc = locate(x);
    double acc = 0.0;
    for (std::size_t j = 0; j < loc.weights.size(); ++j) {
        acc += loc.weights[j] * nodal_values[loc.vertex_indices[j]];
    }
    return acc;
}

std::string Mesh::describe() const {
    nlohmann::json j;
    j["domain"] = {{"lower", domain_.lower}, {"upper", domain_.upper}};
    j["subdivisions"] = subdivisions_;
    j["num_vertices"] = n_vertices_;
    j["mesh_size"] = mesh_size_;
    return j.dump(2);
}

}  // namespace hjb
