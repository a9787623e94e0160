#include "nrsense/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nrsense/errors.hpp"

namespace nrsense {

using nlohmann::json;

namespace {

const std::set<std::string> kMethodLabels{"series", "quadrature", "monte_carlo"};

double parse_double(const std::string& text, const std::string& what) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) throw InputError("cannot parse " + what + " from '" + text + "'");
  return value;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) throw InputError("unknown key '" + key + "' in " + where);
  }
}

template <class T>
void read_if(const json& obj, const char* key, T& target) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("bad value for '") + key + "': " + e.what());
  }
}

} // namespace

GridSpec GridSpec::parse(const std::string& text) {
  const auto a = text.find(':');
  const auto b = a == std::string::npos ? std::string::npos : text.find(':', a + 1);
  if (b == std::string::npos || text.find(':', b + 1) != std::string::npos) {
    throw InputError("grid must look like min:max:count, got '" + text + "'");
  }
  GridSpec g;
  g.min = parse_double(text.substr(0, a), "grid min");
  g.max = parse_double(text.substr(a + 1, b - a - 1), "grid max");
  const double count = parse_double(text.substr(b + 1), "grid count");
  if (count != std::floor(count) || count < 1 || count > 1e6) throw InputError("grid count must be a positive integer");
  g.count = static_cast<int>(count);
  return g;
}

std::string GridSpec::str() const {
  std::ostringstream os;
  os.precision(17);
  os << min << ':' << max << ':' << count;
  return os.str();
}

std::vector<double> GridSpec::values() const {
  if (!(min > 0.0 && max <= 1.0 && min <= max)) throw DomainError("grid bounds must satisfy 0 < min <= max <= 1");
  if (count > 1 && !(min < max)) throw DomainError("grid with more than one point needs min < max");
  return log_grid(min, max, count);
}

void Scenario::validate() const {
  if (users.empty()) throw InputError("scenario needs at least one user");
  if (methods.empty()) throw InputError("scenario needs at least one method");
  std::set<std::string> seen;
  for (const auto& m : methods) {
    if (!kMethodLabels.contains(m)) throw InputError("unknown method '" + m + "'");
    if (!seen.insert(m).second) throw InputError("method '" + m + "' listed twice");
  }
  (void)pf_grid.values();
  (void)ApproxOrder{k};
  if (samples < 1000) throw DomainError("samples must be >= 1000");
  network(QuadratureMethod{}).validate();
}

AvgPdMethod Scenario::method(const std::string& label) const {
  if (label == "series") return SeriesMethod{ApproxOrder{k}};
  if (label == "quadrature") return QuadratureMethod{};
  if (label == "monte_carlo") return MonteCarloMethod{samples, seed, workers};
  throw InputError("unknown method '" + label + "'");
}

FusionNetwork Scenario::network(const AvgPdMethod& method) const {
  FusionNetwork net;
  for (const auto& u : users) {
    CRUserProfile profile;
    profile.channel = ChannelSpec::from_db(u.n, u.snr_db, u.L);
    profile.detector = {u.u, 0.0};
    profile.p_e = u.pe;
    profile.method = method;
    net.users.push_back(profile);
  }
  return net;
}

json Scenario::to_json() const {
  json doc;
  doc["users"] = json::array();
  for (const auto& u : users) {
    doc["users"].push_back({{"n", u.n}, {"snr_db", u.snr_db}, {"u", u.u}, {"pe", u.pe}, {"L", u.L}});
  }
  doc["pf_grid"] = pf_grid.str();
  doc["methods"] = methods;
  doc["k"] = k;
  doc["samples"] = samples;
  doc["seed"] = seed;
  doc["workers"] = workers;
  doc["out"] = out;
  return doc;
}

Scenario Scenario::from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("scenario must be a JSON object");
  check_keys(doc, {"users", "pf_grid", "methods", "k", "samples", "seed", "workers", "out"}, "scenario");
  Scenario s;
  if (doc.contains("users")) {
    const json& users = doc.at("users");
    if (!users.is_array()) throw InputError("'users' must be an array");
    s.users.clear();
    for (const auto& entry : users) {
      if (!entry.is_object()) throw InputError("each user must be an object");
      check_keys(entry, {"n", "snr_db", "u", "pe", "L"}, "user");
      UserConfig u;
      read_if(entry, "n", u.n);
      read_if(entry, "snr_db", u.snr_db);
      read_if(entry, "u", u.u);
      read_if(entry, "pe", u.pe);
      read_if(entry, "L", u.L);
      s.users.push_back(u);
    }
  }
  if (doc.contains("pf_grid")) {
    std::string grid;
    read_if(doc, "pf_grid", grid);
    s.pf_grid = GridSpec::parse(grid);
  }
  if (doc.contains("methods")) {
    const json& m = doc.at("methods");
    if (m.is_string()) {
      s.methods = split_list(m.get<std::string>());
    } else {
      read_if(doc, "methods", s.methods);
    }
  }
  read_if(doc, "k", s.k);
  read_if(doc, "samples", s.samples);
  read_if(doc, "seed", s.seed);
  read_if(doc, "workers", s.workers);
  read_if(doc, "out", s.out);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return Scenario::from_json(doc);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = item.find_last_not_of(" \t");
    items.push_back(item.substr(first, last - first + 1));
  }
  return items;
}

} // namespace nrsense
