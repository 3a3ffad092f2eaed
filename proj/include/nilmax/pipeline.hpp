#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "nilmax/cauchy.hpp"
#include "nilmax/singular.hpp"
#include "nilmax/surfaces.hpp"

namespace nilmax {

using json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

struct OutputConfig {
    bool obj = true;
    bool ply = false;
    bool csv = true;
    bool report = true;
    std::string surface = "nil";  // nil | cmc | both
};

struct RunConfig {
    int schema = kSchemaVersion;
    std::string name = "run";
    json potential;
    DomainGrid grid;
    NumericOptions numeric;
    ClassifyOptions classify;
    std::vector<double> lambda_angles{0.0};
    std::vector<cplx> points;  // explicit classification points; defaults to the basepoint
    bool trace = true;
    OutputConfig outputs;
    std::string source;  // config text as read
};

// Throws ParseError (with line and column) or SchemaError (with field path).
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
// Config with every default filled in.
json config_to_json(const RunConfig& c);

Potential build_potential(const json& block);
Potential build_potential(const RunConfig& c);
EquatorData equator_data(const json& block);
CauchyData cauchy_data(const json& block);

struct RunResult {
    json report;
    std::vector<std::string> lines;      // human-readable summary
    std::vector<std::string> artifacts;  // written file names
};

RunResult run_build(const RunConfig& c, const std::string& out_dir);
RunResult run_classify(const RunConfig& c, const std::string& out_dir);
RunResult run_cauchy(const RunConfig& c, const std::string& out_dir);
// Dispatches build | classify | cauchy | verify | report.
RunResult run_command(const std::string& command, const RunConfig* c, const std::string& out_dir);

// Export formats.
struct MeshOptions {
    bool ply = false;
    bool cmc = false;  // positions from f_cmc instead of f_nil
};
std::string mesh_text(const SurfaceRaster& r, const MeshOptions& opt);
std::string singular_csv(const std::vector<SingularCurve>& curves, const std::vector<SingularPoint>& extra);
std::string format_z(cplx z);
void write_atomic(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

// Curve points with the refined special points inserted in curve order.
SingularCurve with_special_points(const SingularAnalyzer& an, const SingularCurve& c);
json point_json(const SingularPoint& p);

}  // namespace nilmax
