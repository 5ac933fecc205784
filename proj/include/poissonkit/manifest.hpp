#pragma once

#include "poissonkit/distr.hpp"

#include <nlohmann/json_fwd.hpp>

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace poissonkit {

inline constexpr const char* kToolVersion = "poissonkit 0.1.0";
/// Bumped whenever a pinned sign convention changes, so archived reports
/// stay interpretable.
inline constexpr int kConventionVersion = 1;

/// Parsed verification manifest: chart, bivector, volume forms, leaves,
/// distributions, vector fields and default bounds.
struct Manifest {
    ChartPtr chart;
    PoissonStructure structure{nullptr, KVector()};
    std::map<std::string, VolumeForm> volume_forms;
    std::map<std::string, LeafPtr> leaves;
    struct DistributionDecl {
        Distribution value;
        std::string leaf_name;  // for leaf-supported distributions
    };
    std::map<std::string, DistributionDecl> distributions;
    std::map<std::string, KVector> vector_fields;
    std::vector<std::pair<std::string, std::string>> annihilator_checks;  // (leaf, field)
    std::vector<Expr> separating_functions;
    int degree_bound = 4;
    double tolerance = 1e-8;
    int quadrature_order = 20;
    std::string digest;  // of the manifest bytes

    static Manifest load_file(const std::string& path);
    static Manifest load_string(const std::string& text);
};

struct RunOptions {
    std::optional<int> degree_bound;
    std::optional<double> tolerance;
    std::optional<int> quadrature_order;
    bool timings = false;  // off by default to keep reports byte-identical
};

struct RunResult {
    std::string report_json;  // serialized ordered report
    int exit_code = 0;        // 0 all pass, 1 some check failed
};

/// Runs one subcommand (jacobi, schouten-suite, delta-suite, modular,
/// casimirs, bott, genc, leafdelta, flatness, all) against a manifest and
/// assembles the deterministic JSON report.
RunResult run_suite(const std::string& subcommand, const Manifest& manifest,
                    const RunOptions& options);

std::vector<std::string> known_subcommands();

}  // namespace poissonkit
