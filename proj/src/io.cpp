#include "mjpot/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace mjpot::io {

namespace {

double number_at(const json& value, const std::string& where) {
  if (!value.is_number()) throw NonNumeric(where);
  return value.get<double>();
}

std::vector<std::string> parse_states(const json& doc) {
  if (!doc.is_object()) throw FormatError("graph document must be a JSON object");
  if (!doc.contains("states") || !doc["states"].is_array())
    throw FormatError("graph document needs a \"states\" array");
  std::vector<std::string> states;
  for (const auto& s : doc["states"]) {
    if (!s.is_string()) throw FormatError("state names must be strings");
    states.push_back(s.get<std::string>());
  }
  return states;
}

}  // namespace

AnyGraph parse_graph(const json& doc, const GraphOptions& opts) {
  auto states = parse_states(doc);
  if (!doc.contains("arcs") || !doc["arcs"].is_array())
    throw FormatError("graph document needs an \"arcs\" array");

  bool any_rate = false;
  bool any_param = false;
  for (const auto& arc : doc["arcs"]) {
    if (!arc.is_object()) throw FormatError("each arc must be an object");
    if (!arc.contains("from") || !arc.contains("to") || !arc["from"].is_string() ||
        !arc["to"].is_string())
      throw FormatError("each arc needs string \"from\" and \"to\" fields");
    if (arc.contains("rate")) any_rate = true;
    if (arc.contains("prefactor") || arc.contains("barrier")) any_param = true;
  }
  if (any_rate && any_param)
    throw FormatError("arcs mix plain rates with prefactor-barrier pairs");
  if (!any_rate && !any_param && !doc["arcs"].empty())
    throw FormatError("arcs carry neither rates nor prefactor-barrier pairs");

  if (any_param) {
    std::vector<ParamArcSpec> arcs;
    for (const auto& arc : doc["arcs"]) {
      const std::string label = "arc (" + arc["from"].get<std::string>() + ", " +
                                arc["to"].get<std::string>() + ")";
      if (!arc.contains("prefactor") || !arc.contains("barrier"))
        throw FormatError(label + " needs both prefactor and barrier");
      arcs.push_back({arc["from"].get<std::string>(), arc["to"].get<std::string>(),
                      number_at(arc["prefactor"], label + " prefactor"),
                      number_at(arc["barrier"], label + " barrier")});
    }
    return ParamRateGraph::create(std::move(states), arcs, opts);
  }

  std::vector<ArcSpec> arcs;
  for (const auto& arc : doc["arcs"]) {
    const std::string label =
        "arc (" + arc["from"].get<std::string>() + ", " + arc["to"].get<std::string>() + ")";
    if (!arc.contains("rate")) throw FormatError(label + " has no rate");
    arcs.push_back({arc["from"].get<std::string>(), arc["to"].get<std::string>(),
                    number_at(arc["rate"], label + " rate")});
  }
  return RateGraph::create(std::move(states), arcs, opts);
}

AnyGraph load_graph(const std::string& path, const GraphOptions& opts) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
  return parse_graph(doc, opts);
}

RateGraph load_rate_graph(const std::string& path, const GraphOptions& opts) {
  AnyGraph any = load_graph(path, opts);
  if (auto* g = std::get_if<RateGraph>(&any)) return std::move(*g);
  throw FormatError(path + ": expected plain rates, found a parametric family");
}

ParamRateGraph load_param_graph(const std::string& path, const GraphOptions& opts) {
  AnyGraph any = load_graph(path, opts);
  if (auto* pg = std::get_if<ParamRateGraph>(&any)) return std::move(*pg);
  throw FormatError(path + ": expected a parametric family with prefactors and barriers");
}

ScalarField parse_field(const json& doc, const RateGraph& g) {
  if (!doc.is_object()) throw FormatError("field document must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    g.state_index(key);
    (void)value;
  }
  Vector values(g.size());
  for (int i = 0; i < g.size(); ++i) {
    const std::string& name = g.state_name(i);
    if (!doc.contains(name)) throw MissingState(name);
    values(i) = number_at(doc[name], "state " + name);
  }
  return ScalarField(std::move(values));
}

ScalarField load_field(const std::string& path, const RateGraph& g) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
  return parse_field(doc, g);
}

json graph_to_json(const RateGraph& g) {
  json doc;
  doc["states"] = g.states();
  json arcs = json::array();
  for (const auto& a : g.arcs())
    arcs.push_back({{"from", g.state_name(a.from)}, {"to", g.state_name(a.to)}, {"rate", a.rate}});
  doc["arcs"] = std::move(arcs);
  return doc;
}

json field_to_json(const RateGraph& g, const Vector& values) {
  json doc = json::object();
  for (int i = 0; i < g.size(); ++i) doc[g.state_name(i)] = values(i);
  return doc;
}

json matrix_to_json(const RateGraph& g, const Matrix& m) {
  json doc = json::object();
  for (int i = 0; i < g.size(); ++i) {
    json row = json::object();
    for (int j = 0; j < g.size(); ++j) row[g.state_name(j)] = m(i, j);
    doc[g.state_name(i)] = std::move(row);
  }
  return doc;
}

std::string ensemble_jsonl(const RateGraph& g, const forest::ForestEnsemble& ensemble) {
  std::ostringstream os;
  for (const auto& member : ensemble.members) {
    json line = json::object();
    line["descriptor"] = ensemble.descriptor;
    json arcs = json::array();
    for (int id : member.arc_ids) {
      const auto& a = g.arcs()[id];
      arcs.push_back({g.state_name(a.from), g.state_name(a.to)});
    }
    line["arcs"] = std::move(arcs);
    json roots = json::array();
    for (int r : member.roots()) roots.push_back(g.state_name(r));
    line["roots"] = std::move(roots);
    line["weight"] = member.weight;
    os << line.dump() << "\n";
  }
  return os.str();
}

std::string format_double(double v) {
  char buf[40];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

std::string field_csv(const RateGraph& g, const std::string& column, const Vector& values) {
  std::ostringstream os;
  os << "state," << column << "\n";
  for (int i = 0; i < g.size(); ++i) os << g.state_name(i) << "," << format_double(values(i)) << "\n";
  return os.str();
}

std::string matrix_csv(const RateGraph& g, const Matrix& m) {
  std::ostringstream os;
  os << "state";
  for (int j = 0; j < g.size(); ++j) os << "," << g.state_name(j);
  os << "\n";
  for (int i = 0; i < g.size(); ++i) {
    os << g.state_name(i);
    for (int j = 0; j < g.size(); ++j) os << "," << format_double(m(i, j));
    os << "\n";
  }
  return os.str();
}

std::string render_table(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& row : rows) {
    if (row.size() > width.size()) width.resize(row.size(), 0);
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream os;
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << "  ";
      os << row[c];
      if (c + 1 < row.size()) os << std::string(width[c] - row[c].size(), ' ');
    }
    os << "\n";
  }
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out << content;
  if (!out) throw FormatError("failed writing " + path);
}

}  // namespace mjpot::io
