#include "sdnr/case_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sdnr/error.hpp"

namespace sdnr {

namespace {

using json = nlohmann::ordered_json;

constexpr std::string_view kSchema = "sdnr-case/1";

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ":" + std::to_string(col);
}

/// Reader over one JSON object that remembers its pointer and rejects
/// fields nobody asked for.
class Fields {
 public:
  Fields(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw SchemaError(where_.empty() ? "/" : where_, "expected an object");
  }

  bool has(const std::string& key) const { return obj_.contains(key); }

  const json& at(const std::string& key) {
    used_.insert(key);
    if (!obj_.contains(key)) throw SchemaError(where_ + "/" + key, "required field is missing");
    return obj_.at(key);
  }

  double number(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) throw SchemaError(where_ + "/" + key, "expected a number");
    return v.get<double>();
  }
  double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

  int integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) throw SchemaError(where_ + "/" + key, "expected an integer");
    return v.get<int>();
  }

  std::string string(const std::string& key) {
    const json& v = at(key);
    if (!v.is_string()) throw SchemaError(where_ + "/" + key, "expected a string");
    return v.get<std::string>();
  }
  std::string string_or(const std::string& key, std::string fallback) {
    return has(key) ? string(key) : std::move(fallback);
  }

  bool boolean_or(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const json& v = at(key);
    if (!v.is_boolean()) throw SchemaError(where_ + "/" + key, "expected true or false");
    return v.get<bool>();
  }

  std::string path(const std::string& key) const { return where_ + "/" + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!used_.count(key)) throw SchemaError(where_ + "/" + key, "unknown field");
    }
  }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> used_;
};

void read_bus(const json& j, const std::string& where, CaseDocument& doc) {
  Fields f(j, where);
  Bus b;
  b.id = f.integer("id");
  const std::string kind = f.string_or("kind", "load");
  if (kind == "substation") {
    b.kind = BusKind::substation;
  } else if (kind != "load") {
    throw SchemaError(f.path("kind"), "expected \"substation\" or \"load\"");
  }
  b.v_min = f.number_or("v_min", b.v_min);
  b.v_max = f.number_or("v_max", b.v_max);
  if (b.is_substation()) {
    InjectionLimits lim;
    lim.p_min = f.number_or("p_min", lim.p_min);
    lim.p_max = f.number_or("p_max", lim.p_max);
    lim.q_min = f.number_or("q_min", lim.q_min);
    lim.q_max = f.number_or("q_max", lim.q_max);
    b.injection = lim;
    b.v_set = f.number_or("v_set", b.v_set);
  }
  if (f.has("profile")) {
    if (b.is_substation()) throw SchemaError(f.path("profile"), "a substation bus carries no profile");
    Fields p(f.at("profile"), f.path("profile"));
    BusProfile prof;
    prof.load_peak = p.number_or("load", 0.0);
    prof.wind_capacity = p.number_or("wind", 0.0);
    prof.solar_capacity = p.number_or("solar", 0.0);
    p.finish();
    if (prof.load_peak < 0.0 || prof.wind_capacity < 0.0 || prof.solar_capacity < 0.0) {
      throw SchemaError(f.path("profile"), "profile quantities must be non-negative");
    }
    doc.profiles[b.id] = prof;
  }
  f.finish();
  doc.buses.push_back(b);
}

void read_branch(const json& j, const std::string& where, CaseDocument& doc) {
  Fields f(j, where);
  Branch br;
  br.id = f.integer("id");
  br.from = f.integer("from");
  br.to = f.integer("to");
  br.r = f.number("r");
  br.x = f.number("x");
  br.s_max = f.number_or("s_max", br.s_max);
  br.p_max = f.number_or("p_max", br.p_max);
  br.q_max = f.number_or("q_max", br.q_max);
  br.i_max = f.number_or("i_max", br.i_max);
  br.switchable = f.boolean_or("switchable", true);
  const std::string status = f.string_or("status", "closed");
  if (status == "open") {
    doc.open_branches.insert(br.id);
  } else if (status != "closed") {
    throw SchemaError(f.path("status"), "expected \"open\" or \"closed\"");
  }
  f.finish();
  doc.branches.push_back(br);
}

void check_references(const CaseDocument& doc) {
  std::set<int> ids;
  for (const auto& b : doc.buses) ids.insert(b.id);
  for (std::size_t k = 0; k < doc.branches.size(); ++k) {
    const auto& br = doc.branches[k];
    for (int end : {br.from, br.to}) {
      if (!ids.count(end)) {
        throw ReferenceError("/branches/" + std::to_string(k) + ": branch " + std::to_string(br.id) +
                             " references unknown bus " + std::to_string(end));
      }
    }
  }
}

void put_if(json& j, const char* key, double value, double fallback) {
  if (value != fallback) j[key] = value;
}

void put_limit(json& j, const char* key, double value) {
  if (std::isfinite(value)) j[key] = value;
}

}  // namespace

Network CaseDocument::network() const {
  try {
    return Network(buses, branches, base_mva, base_kv);
  } catch (const ArgumentError& e) {
    throw SchemaError("case", e.what());
  }
}

SwitchConfiguration CaseDocument::initial_configuration(const Network& net) const {
  std::vector<int> open;
  for (int id : open_branches) {
    if (net.has_branch(id)) open.push_back(id);
  }
  return SwitchConfiguration::with_open(net, open);
}

CaseDocument parse_case(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (path.extension() == ".m") return parse_matpower(text);
  return parse_case_json(text);
}

CaseDocument parse_case_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError(line_col(text, e.byte == 0 ? 0 : e.byte - 1), "malformed JSON");
  }
  CaseDocument doc;
  Fields f(root, "");
  const std::string schema = f.string("schema");
  if (schema != kSchema) throw SchemaError("/schema", "unsupported schema \"" + schema + "\"");
  doc.name = f.string_or("name", "");
  doc.notes = f.string_or("notes", "");
  doc.base_mva = f.number_or("base_mva", 1.0);
  doc.base_kv = f.number_or("base_kv", 1.0);
  const json& buses = f.at("buses");
  if (!buses.is_array()) throw SchemaError("/buses", "expected an array");
  for (std::size_t k = 0; k < buses.size(); ++k) read_bus(buses[k], "/buses/" + std::to_string(k), doc);
  const json& branches = f.at("branches");
  if (!branches.is_array()) throw SchemaError("/branches", "expected an array");
  for (std::size_t k = 0; k < branches.size(); ++k) {
    read_branch(branches[k], "/branches/" + std::to_string(k), doc);
  }
  f.finish();
  check_references(doc);
  return doc;
}

std::string serialize_case(const CaseDocument& doc) {
  json root;
  root["schema"] = kSchema;
  if (!doc.name.empty()) root["name"] = doc.name;
  if (!doc.notes.empty()) root["notes"] = doc.notes;
  put_if(root, "base_mva", doc.base_mva, 1.0);
  put_if(root, "base_kv", doc.base_kv, 1.0);
  json buses = json::array();
  for (const auto& b : doc.buses) {
    json j;
    j["id"] = b.id;
    if (b.is_substation()) j["kind"] = "substation";
    put_if(j, "v_min", b.v_min, 0.9);
    put_if(j, "v_max", b.v_max, 1.1);
    if (b.is_substation()) {
      const InjectionLimits lim = b.injection.value_or(InjectionLimits{});
      put_limit(j, "p_min", lim.p_min);
      put_limit(j, "p_max", lim.p_max);
      put_limit(j, "q_min", lim.q_min);
      put_limit(j, "q_max", lim.q_max);
      put_if(j, "v_set", b.v_set, 1.0);
    }
    if (auto it = doc.profiles.find(b.id); it != doc.profiles.end()) {
      json p = json::object();
      put_if(p, "load", it->second.load_peak, 0.0);
      put_if(p, "wind", it->second.wind_capacity, 0.0);
      put_if(p, "solar", it->second.solar_capacity, 0.0);
      j["profile"] = p;
    }
    buses.push_back(j);
  }
  root["buses"] = buses;
  json branches = json::array();
  for (const auto& br : doc.branches) {
    json j;
    j["id"] = br.id;
    j["from"] = br.from;
    j["to"] = br.to;
    j["r"] = br.r;
    j["x"] = br.x;
    put_limit(j, "s_max", br.s_max);
    put_limit(j, "p_max", br.p_max);
    put_limit(j, "q_max", br.q_max);
    put_limit(j, "i_max", br.i_max);
    if (!br.switchable) j["switchable"] = false;
    if (doc.open_branches.count(br.id)) j["status"] = "open";
    branches.push_back(j);
  }
  root["branches"] = branches;
  return root.dump(2) + "\n";
}

// MATPOWER subset: `mpc.baseMVA = <n>;` and the `mpc.bus` / `mpc.branch`
// matrices. Columns follow the MATPOWER case format; branch status 0 marks a
// normally open tie.
namespace {

struct Matrix {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> lines;
};

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('%');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

double parse_number(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw SchemaError("line " + std::to_string(line), "not a number: \"" + tok + "\"");
  }
}

}  // namespace

CaseDocument parse_matpower(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  std::map<std::string, Matrix> matrices;
  Matrix* open_matrix = nullptr;
  std::string open_name;
  std::size_t open_line = 0;
  double base_mva = 100.0;
  std::vector<double> pending;

  auto flush_row = [&](std::size_t line) {
    if (!pending.empty()) {
      open_matrix->rows.push_back(pending);
      open_matrix->lines.push_back(line);
      pending.clear();
    }
  };

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = strip_comment(raw);
    if (!open_matrix) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string lhs = line.substr(0, eq);
      lhs.erase(std::remove_if(lhs.begin(), lhs.end(), ::isspace), lhs.end());
      std::string rhs = line.substr(eq + 1);
      if (lhs == "mpc.baseMVA") {
        rhs.erase(std::remove_if(rhs.begin(), rhs.end(), [](char c) { return std::isspace(c) || c == ';'; }),
                  rhs.end());
        base_mva = parse_number(rhs, line_no);
        continue;
      }
      if (lhs.rfind("mpc.", 0) != 0) continue;
      const auto lb = rhs.find('[');
      if (lb == std::string::npos) continue;
      open_name = lhs.substr(4);
      open_matrix = &matrices[open_name];
      open_line = line_no;
      line = rhs.substr(lb + 1);
    }
    std::string token;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      const char c = i < line.size() ? line[i] : ' ';
      if (c == ']' || c == ';' || std::isspace(static_cast<unsigned char>(c)) || c == ',') {
        if (!token.empty()) {
          pending.push_back(parse_number(token, line_no));
          token.clear();
        }
        if (c == ';') flush_row(line_no);
        if (c == ']') {
          flush_row(line_no);
          open_matrix = nullptr;
          break;
        }
      } else {
        token.push_back(c);
      }
    }
    if (open_matrix) flush_row(line_no);
  }
  if (open_matrix) throw SchemaError("line " + std::to_string(open_line), "unterminated matrix mpc." + open_name);
  if (!matrices.count("bus")) throw SchemaError("line 1", "missing mpc.bus");
  if (!matrices.count("branch")) throw SchemaError("line 1", "missing mpc.branch");

  CaseDocument doc;
  doc.source_format = "matpower";
  doc.base_mva = base_mva;
  const Matrix& bus = matrices.at("bus");
  for (std::size_t k = 0; k < bus.rows.size(); ++k) {
    const auto& row = bus.rows[k];
    const auto where = "line " + std::to_string(bus.lines[k]);
    if (row.size() < 13) throw SchemaError(where, "mpc.bus rows need 13 columns");
    Bus b;
    b.id = static_cast<int>(row[0]);
    if (row[1] == 3) {
      b.kind = BusKind::substation;
      b.injection = InjectionLimits{};
      b.v_set = row[7] > 0 ? row[7] : 1.0;
    }
    b.v_max = row[11];
    b.v_min = row[12];
    if (k == 0 && row[9] > 0) doc.base_kv = row[9];
    if (!b.is_substation()) doc.profiles[b.id] = BusProfile{row[2] / base_mva, 0.0, 0.0};
    doc.buses.push_back(b);
  }
  const Matrix& branch = matrices.at("branch");
  for (std::size_t k = 0; k < branch.rows.size(); ++k) {
    const auto& row = branch.rows[k];
    const auto where = "line " + std::to_string(branch.lines[k]);
    if (row.size() < 11) throw SchemaError(where, "mpc.branch rows need 11 columns");
    Branch br;
    br.id = static_cast<int>(k) + 1;
    br.from = static_cast<int>(row[0]);
    br.to = static_cast<int>(row[1]);
    br.r = row[2];
    br.x = row[3];
    if (row[5] > 0) br.s_max = row[5] / base_mva;
    if (row[10] == 0) doc.open_branches.insert(br.id);
    doc.branches.push_back(br);
  }
  check_references(doc);
  return doc;
}

}  // namespace sdnr
