#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fraclab/domain.hpp"
#include "fraclab/optimize.hpp"
#include "fraclab/variation.hpp"

namespace fraclab::lab {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key=value text with [section] headers; lists are comma separated.
struct ExperimentConfig {
    std::string experiment;  // sweep-s, sweep-eps, neumann-check, curvature-check,
                             // counterexample-classical, counterexample-fractional, minimize
    std::string name;        // output file stem, defaults to the experiment

    RegionSpec omega = interval(-1, 1);
    RegionSpec exterior = interval(0, kInf);
    std::string family = "half-line";
    double h = 0.01;
    double R = 4;
    double h_per_eps = 0;  // > 0: use h = eps / h_per_eps per sweep point

    double s = 0.25;
    std::vector<double> s_list;
    std::vector<double> eps_list;
    double m = 0;
    double M = 2;
    double H = 0;
    double mu_bracket = 10;

    SolverOptions solver;
    MassariOptions massari;

    double slope_min = -10;
    double slope_max = 10;
    double slope_step = 1e-3;
    int refinements = 3;
    double ode_step = 1e-3;
    double margin = 0.05;

    double profile_L = 80;
    double profile_h = 0.05;
    std::vector<double> eta_list{0.05, 0.2};
    std::uint64_t seed = 12345;

    std::vector<VectorFieldSpec> fields;

    int jobs = 1;
};

RegionSpec parse_region(const std::string& text);
std::vector<double> parse_list(const std::string& text);
// Splits on commas outside parentheses.
std::vector<std::string> split_top_level(const std::string& text);
VectorFieldSpec parse_field(const std::string& text);

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Checks the invariants required by the named experiment.
void validate(const ExperimentConfig& cfg);

}  // namespace fraclab::lab
