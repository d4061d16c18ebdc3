#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "cc4oc/errors.hpp"

namespace cc4oc {

/// Node-centred uniform grid on [x0, x0+lx] x [y0, y0+ly]; boundary nodes are physical nodes.
struct UniformGrid2D {
    int nx = 0;
    int ny = 0;
    double x0 = 0.0;
    double y0 = 0.0;
    double lx = 0.0;
    double ly = 0.0;
    double h = 0.0;  // spacing in x
    double k = 0.0;  // spacing in y

    double x(int i) const { return x0 + i * h; }
    double y(int j) const { return y0 + j * k; }
    /// Row-major, i fastest.
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }

    bool operator==(const UniformGrid2D&) const = default;
};

inline UniformGrid2D make_grid(int nx, int ny, double x0, double y0, double lx, double ly) {
    if (nx < 3 || ny < 3) {
        throw std::invalid_argument("make_grid: need at least 3 nodes per direction");
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
        throw std::invalid_argument("make_grid: domain extents must be positive and finite");
    }
    UniformGrid2D g;
    g.nx = nx;
    g.ny = ny;
    g.x0 = x0;
    g.y0 = y0;
    g.lx = lx;
    g.ly = ly;
    g.h = lx / (nx - 1);
    g.k = ly / (ny - 1);
    return g;
}

/// Nodal values of one transport quantity.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(const UniformGrid2D& grid, double fill = 0.0)
        : grid_(grid), values_(grid.size(), fill) {}
    ScalarField(const UniformGrid2D& grid, std::vector<double> values)
        : grid_(grid), values_(std::move(values)) {
        if (values_.size() != grid_.size()) {
            throw std::invalid_argument("ScalarField: value count does not match grid");
        }
    }

    const UniformGrid2D& grid() const { return grid_; }

    double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
    double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
    double& operator[](std::size_t n) { return values_[n]; }
    double operator[](std::size_t n) const { return values_[n]; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    std::vector<double>& data() { return values_; }
    const std::vector<double>& data() const { return values_; }
    std::size_t size() const { return values_.size(); }

private:
    UniformGrid2D grid_;
    std::vector<double> values_;
};

/// f(x, y, t)
using SpaceTimeFunction = std::function<double(double, double, double)>;

inline ScalarField sample(const UniformGrid2D& grid, const SpaceTimeFunction& f, double t) {
    ScalarField out(grid);
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            const double v = f(grid.x(i), grid.y(j), t);
            if (!std::isfinite(v)) {
                std::ostringstream msg;
                msg << "sample: non-finite value at node (" << i << ", " << j << ") = (" << grid.x(i) << ", "
                    << grid.y(j) << "), t = " << t;
                throw SamplingError(msg.str());
            }
            out(i, j) = v;
        }
    }
    return out;
}

enum class EdgeKind { Dirichlet, Periodic };

/// Treatment of one domain edge. For Dirichlet, `value` is required; `dx`/`dy` are optional
/// analytic derivative data (absent derivative data selects the one-sided compact closure).
struct EdgeCondition {
    EdgeKind kind = EdgeKind::Dirichlet;
    SpaceTimeFunction value;
    SpaceTimeFunction dx;
    SpaceTimeFunction dy;
};

/// Per-edge boundary data. Only b2 = 0 (Dirichlet) and periodic pairs are supported.
struct BoundarySpec {
    EdgeCondition left;
    EdgeCondition right;
    EdgeCondition bottom;
    EdgeCondition top;

    static BoundarySpec dirichlet(SpaceTimeFunction value, SpaceTimeFunction dx = {}, SpaceTimeFunction dy = {}) {
        EdgeCondition e{EdgeKind::Dirichlet, std::move(value), std::move(dx), std::move(dy)};
        return BoundarySpec{e, e, e, e};
    }

    static BoundarySpec periodic() {
        EdgeCondition e{EdgeKind::Periodic, {}, {}, {}};
        return BoundarySpec{e, e, e, e};
    }

    bool periodic_x() const { return left.kind == EdgeKind::Periodic; }
    bool periodic_y() const { return bottom.kind == EdgeKind::Periodic; }

    void validate() const {
        if ((left.kind == EdgeKind::Periodic) != (right.kind == EdgeKind::Periodic) ||
            (bottom.kind == EdgeKind::Periodic) != (top.kind == EdgeKind::Periodic)) {
            throw std::invalid_argument("BoundarySpec: periodic edges must be paired");
        }
        for (const EdgeCondition* e : {&left, &right, &bottom, &top}) {
            if (e->kind == EdgeKind::Dirichlet && !e->value) {
                throw std::invalid_argument("BoundarySpec: Dirichlet edge without a value function");
            }
        }
    }
};

/// Wraps a nodal field as a SpaceTimeFunction by nearest-node lookup. The field is read at
/// call time, so updates made through the pointer are seen by later evaluations.
inline SpaceTimeFunction nodal_lookup(std::shared_ptr<const ScalarField> field) {
    return [field = std::move(field)](double x, double y, double) {
        const UniformGrid2D& g = field->grid();
        const int i = static_cast<int>(std::lround((x - g.x0) / g.h));
        const int j = static_cast<int>(std::lround((y - g.y0) / g.k));
        return (*field)(i, j);
    };
}

}  // namespace cc4oc
