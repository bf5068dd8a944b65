#pragma once

#include "mjpot/forest.hpp"
#include "mjpot/graph.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <variant>
#include <vector>

namespace mjpot::io {

using json = nlohmann::json;

using AnyGraph = std::variant<RateGraph, ParamRateGraph>;

/// Parses a graph document: states plus arcs, where every arc carries either
/// a rate or a prefactor-barrier pair. Mixing the two forms is an error.
AnyGraph parse_graph(const json& doc, const GraphOptions& opts = {});
AnyGraph load_graph(const std::string& path, const GraphOptions& opts = {});
RateGraph load_rate_graph(const std::string& path, const GraphOptions& opts = {});
ParamRateGraph load_param_graph(const std::string& path, const GraphOptions& opts = {});

/// Parses a state-to-number map aligned to the graph's state order. Every
/// state needs a value; unknown or non-numeric entries are rejected.
ScalarField parse_field(const json& doc, const RateGraph& g);
ScalarField load_field(const std::string& path, const RateGraph& g);

json graph_to_json(const RateGraph& g);
json field_to_json(const RateGraph& g, const Vector& values);
json matrix_to_json(const RateGraph& g, const Matrix& m);

/// One JSON object per enumerated member, for debugging enumeration sweeps:
/// {"descriptor", "arcs", "roots", "weight"}.
std::string ensemble_jsonl(const RateGraph& g, const forest::ForestEnsemble& ensemble);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

std::string field_csv(const RateGraph& g, const std::string& column, const Vector& values);
std::string matrix_csv(const RateGraph& g, const Matrix& m);

/// Aligned-column rendering for terminal output; the first row is a header.
std::string render_table(const std::vector<std::vector<std::string>>& rows);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace mjpot::io
