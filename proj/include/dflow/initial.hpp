#pragma once

#include "dflow/curve.hpp"

#include <string>

namespace dflow {

enum class InitialKind { great_circle, perturbed_great_circle, gaussian_twist, from_file };

struct InitialDataSpec {
    InitialKind kind = InitialKind::great_circle;
    double amplitude = 0.0; // transverse bump height / twist angle
    int mode = 1;           // Fourier mode of the transverse perturbation
    double width = 1.0;     // twist width
    double center = -1.0;   // twist center; negative means domain midpoint
    std::string path;       // snapshot file for from_file

    void validate() const;
};

InitialKind initial_kind_from_string(const std::string& s);
std::string initial_kind_to_string(InitialKind k);

/// Constructs the curve and renormalizes pointwise, so the result sits on the
/// sphere to round-off regardless of the perturbation.
DiscreteCurve make_initial(const InitialDataSpec& spec, const GridSpec& grid);

} // namespace dflow
