#include "dflow/initial.hpp"

#include "dflow/io.hpp"

#include <cmath>

namespace dflow {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
}

void InitialDataSpec::validate() const {
    if (kind == InitialKind::perturbed_great_circle && std::abs(amplitude) >= 1.0)
        throw Error("InitialDataSpec: |amplitude| must be < 1 for the normalization");
    if (kind == InitialKind::gaussian_twist && !(width > 0.0))
        throw Error("InitialDataSpec: width must be positive");
    if (kind == InitialKind::from_file && path.empty())
        throw Error("InitialDataSpec: from_file needs a path");
}

InitialKind initial_kind_from_string(const std::string& s) {
    if (s == "great_circle") return InitialKind::great_circle;
    if (s == "perturbed_great_circle") return InitialKind::perturbed_great_circle;
    if (s == "gaussian_twist") return InitialKind::gaussian_twist;
    if (s == "from_file") return InitialKind::from_file;
    throw Error("unknown initial data kind: " + s);
}

std::string initial_kind_to_string(InitialKind k) {
    switch (k) {
        case InitialKind::great_circle: return "great_circle";
        case InitialKind::perturbed_great_circle: return "perturbed_great_circle";
        case InitialKind::gaussian_twist: return "gaussian_twist";
        case InitialKind::from_file: return "from_file";
    }
    throw Error("unknown initial data kind");
}

DiscreteCurve make_initial(const InitialDataSpec& spec, const GridSpec& grid) {
    spec.validate();
    grid.validate();
    if (spec.kind == InitialKind::from_file) {
        DiscreteCurve u = read_curve(spec.path);
        if (!(u.grid == grid))
            throw Error("make_initial: snapshot grid differs from the configured grid");
        return u;
    }

    DiscreteCurve u;
    u.grid = grid;
    u.points.resize(static_cast<size_t>(grid.num_points));
    RVec xs = grid.nodes();
    double L = grid.domain_length;
    double center = spec.center < 0.0 ? 0.5 * L : spec.center;
    for (int i = 0; i < grid.num_points; ++i) {
        double th = kTwoPi * xs[i] / L;
        Vec3 p(std::cos(th), std::sin(th), 0.0);
        switch (spec.kind) {
            case InitialKind::great_circle:
                break;
            case InitialKind::perturbed_great_circle:
                p.z += spec.amplitude * std::sin(kTwoPi * spec.mode * xs[i] / L);
                break;
            case InitialKind::gaussian_twist: {
                double d = (xs[i] - center) / spec.width;
                double ang = spec.amplitude * std::exp(-d * d);
                double cy = std::cos(ang), sy = std::sin(ang);
                p = Vec3(p.x, cy * p.y - sy * p.z, sy * p.y + cy * p.z); // turn about e_x
                break;
            }
            case InitialKind::from_file:
                break;
        }
        double r = norm(p);
        if (!(r > 0.0)) throw Error("make_initial: degenerate point");
        u.points[static_cast<size_t>(i)] = p * (1.0 / r);
    }
    return u;
}

} // namespace dflow
