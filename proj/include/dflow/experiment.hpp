#pragma once

#include "dflow/gauge.hpp"
#include "dflow/initial.hpp"
#include "dflow/io.hpp"
#include "dflow/linear.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace dflow {

enum class ExperimentKind {
    flow,
    linear,
    energy_audit,
    epsilon_sweep,
    delta_sweep,
    twin,
    smoothing,
    commutator
};

ExperimentKind experiment_from_string(const std::string& s);
std::string experiment_to_string(ExperimentKind k);

/// Named profile shapes for the linear lab, sampled on the grid at run time.
struct LinearConfig {
    double a = 1.0;
    double beta_amp = 0.0;
    std::string gamma_kind = "none"; // none | real | match_phi | constant_imag
    double gamma_value = 0.0;
    std::string phi_kind = "sech2"; // none | sech2
    double phi_scale = 1.0;
    double phi_width = 1.0;
    double cutoff_radius = 0.0; // 0 picks the default
    double carrier = 32.0;
    double bandwidth = 2.0;
    double T = 0.01;
    double dt = 1e-5;
};

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::flow;
    GridSpec grid;
    PresetName preset = PresetName::custom;
    FlowParams flow_params;
    GaugeParams gauge_params;
    StepperConfig stepper;
    InitialDataSpec initial_data;
    LinearConfig linear;
    double T = 0.1;
    std::string output_dir = "out";
    uint64_t seed = 1;
};

/// Strict parse: unknown keys are errors, reported with their field path.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);

/// Dotted-path override, e.g. "flow_params.epsilon=0.05". The value is parsed
/// as JSON when possible, else taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

LinearSpec build_linear_spec(const LinearConfig& lc, const GridSpec& g);
CVec wave_packet(const GridSpec& g, double carrier, double rel_width = 0.05);

/// Runs the configured experiment, writes artifacts + manifest under
/// output_dir. Throws on validation or runtime failure.
void run_experiment(const ExperimentConfig& c);

} // namespace dflow
