#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "phicurv/harness.hpp"
#include "phicurv/catalog.hpp"
#include "phicurv/probes.hpp"

namespace phicurv {

namespace {

// ---- the file format is a small INI dialect ----------------------------------
//
//   [section]
//   key = value      value := number | "string" | true | false | [v, v, ...]
//
// '#' starts a comment outside quotes. Keys are unique per section.

struct Value {
  enum class Kind { Number, String, Bool, Array };
  Kind kind = Kind::Number;
  double number = 0.0;
  std::string text;
  bool boolean = false;
  std::vector<Value> items;
  int line = 0;
};

struct Section {
  std::string name;
  int line = 0;
  std::map<std::string, Value> entries;
};

class ValueParser {
 public:
  ValueParser(std::string s, int line) : s_(std::move(s)), line_(line) {}

  Value parse() {
    Value v = parse_value();
    skip_space();
    if (pos_ != s_.size())
      fail(ErrorKind::ParseError,
           "trailing characters in value on line " + std::to_string(line_));
    return v;
  }

 private:
  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }

  Value parse_value() {
    skip_space();
    Value v;
    v.line = line_;
    if (pos_ >= s_.size())
      fail(ErrorKind::ParseError, "missing value on line " + std::to_string(line_));
    const char c = s_[pos_];
    if (c == '"') {
      ++pos_;
      v.kind = Value::Kind::String;
      while (pos_ < s_.size() && s_[pos_] != '"') v.text += s_[pos_++];
      if (pos_ >= s_.size())
        fail(ErrorKind::ParseError,
             "unterminated string on line " + std::to_string(line_));
      ++pos_;
      return v;
    }
    if (c == '[') {
      ++pos_;
      v.kind = Value::Kind::Array;
      skip_space();
      if (pos_ < s_.size() && s_[pos_] == ']') {
        ++pos_;
        return v;
      }
      while (true) {
        v.items.push_back(parse_value());
        skip_space();
        if (pos_ < s_.size() && s_[pos_] == ',') {
          ++pos_;
          continue;
        }
        if (pos_ < s_.size() && s_[pos_] == ']') {
          ++pos_;
          return v;
        }
        fail(ErrorKind::ParseError,
             "expected ',' or ']' on line " + std::to_string(line_));
      }
    }
    if (s_.compare(pos_, 4, "true") == 0) {
      v.kind = Value::Kind::Bool;
      v.boolean = true;
      pos_ += 4;
      return v;
    }
    if (s_.compare(pos_, 5, "false") == 0) {
      v.kind = Value::Kind::Bool;
      v.boolean = false;
      pos_ += 5;
      return v;
    }
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    v.number = std::strtod(begin, &end);
    if (end == begin)
      fail(ErrorKind::ParseError,
           "malformed value on line " + std::to_string(line_));
    pos_ += static_cast<std::size_t>(end - begin);
    return v;
  }

  std::string s_;
  int line_;
  std::size_t pos_ = 0;
};

std::map<std::string, Section> parse_sections(const std::string& text) {
  std::map<std::string, Section> sections;
  Section* current = nullptr;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    // strip comments outside quotes
    bool quoted = false;
    std::string line;
    for (char c : raw) {
      if (c == '"') quoted = !quoted;
      if (c == '#' && !quoted) break;
      line += c;
    }
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t\r");
    line = line.substr(b, e - b + 1);
    if (line.front() == '[') {
      if (line.back() != ']')
        fail(ErrorKind::ParseError,
             "malformed section header on line " + std::to_string(line_no));
      std::string name = line.substr(1, line.size() - 2);
      auto [it, inserted] = sections.try_emplace(name);
      if (!inserted)
        fail(ErrorKind::ParseError,
             "duplicate section [" + name + "] on line " + std::to_string(line_no));
      it->second.name = name;
      it->second.line = line_no;
      current = &it->second;
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos || current == nullptr)
      fail(ErrorKind::ParseError,
           "expected 'key = value' on line " + std::to_string(line_no));
    std::string key = line.substr(0, eq);
    key.erase(key.find_last_not_of(" \t") + 1);
    if (current->entries.count(key))
      fail(ErrorKind::ParseError, "duplicate key '" + key + "' in [" +
                                      current->name + "] on line " +
                                      std::to_string(line_no));
    ValueParser vp(line.substr(eq + 1), line_no);
    current->entries.emplace(key, vp.parse());
  }
  return sections;
}

// ---- typed access -------------------------------------------------------------

const Value* find(const std::map<std::string, Section>& sections,
                  const std::string& section, const std::string& key) {
  auto s = sections.find(section);
  if (s == sections.end()) return nullptr;
  auto k = s->second.entries.find(key);
  return k == s->second.entries.end() ? nullptr : &k->second;
}

double need_number(const Value& v, const std::string& what) {
  if (v.kind != Value::Kind::Number)
    fail(ErrorKind::ValidationError,
         what + " must be a number (line " + std::to_string(v.line) + ")");
  return v.number;
}

std::string need_string(const Value& v, const std::string& what) {
  if (v.kind != Value::Kind::String)
    fail(ErrorKind::ValidationError,
         what + " must be a string (line " + std::to_string(v.line) + ")");
  return v.text;
}

std::vector<double> need_number_array(const Value& v, const std::string& what) {
  if (v.kind != Value::Kind::Array)
    fail(ErrorKind::ValidationError,
         what + " must be an array (line " + std::to_string(v.line) + ")");
  std::vector<double> out;
  for (const Value& item : v.items) out.push_back(need_number(item, what));
  return out;
}

Box need_box(const Value& v, int dim, const std::string& what) {
  if (v.kind != Value::Kind::Array || static_cast<int>(v.items.size()) != dim)
    fail(ErrorKind::ValidationError,
         what + " must be an array of [lo, hi] pairs, one per coordinate (line " +
             std::to_string(v.line) + ")");
  Box box;
  for (const Value& item : v.items) {
    auto pair = need_number_array(item, what);
    if (pair.size() != 2 || !(pair[0] < pair[1]))
      fail(ErrorKind::ValidationError,
           what + " entries must be [lo, hi] with lo < hi (line " +
               std::to_string(v.line) + ")");
    box.lo.push_back(pair[0]);
    box.hi.push_back(pair[1]);
  }
  return box;
}

std::string metric_key(const char* prefix, int i, int j) {
  return std::string(prefix) + std::to_string(i + 1) + std::to_string(j + 1);
}

// Parse the metric entries of a section (upper triangle required, the lower
// one optional but then structurally equal).
std::vector<ExprPtr> load_metric(const std::map<std::string, Section>& sections,
                                 const std::string& section, const char* prefix,
                                 int dim, const FieldEnv& env, VarFamily family) {
  std::vector<ExprPtr> metric(static_cast<std::size_t>(dim) * dim);
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      const Value* upper = find(sections, section, metric_key(prefix, i, j));
      if (!upper)
        fail(ErrorKind::ValidationError, "[" + section + "] is missing " +
                                             metric_key(prefix, i, j));
      ExprPtr e = parse(need_string(*upper, metric_key(prefix, i, j)), env, family);
      if (i != j) {
        const Value* lower = find(sections, section, metric_key(prefix, j, i));
        if (lower) {
          ExprPtr other =
              parse(need_string(*lower, metric_key(prefix, j, i)), env, family);
          if (!structurally_equal(*e, *other))
            fail(ErrorKind::ValidationError,
                 metric_key(prefix, j, i) + " disagrees with its symmetry partner " +
                     metric_key(prefix, i, j));
        }
      }
      metric[i * dim + j] = e;
      metric[j * dim + i] = e;
    }
  return metric;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Manifold load_manifold_text(const std::string& text, const std::string& name) {
  auto sections = parse_sections(text);
  Manifold out;
  out.source_path = name;
  out.file_hash = fnv1a_hex(text);

  // [chart]
  const Value* dim_v = find(sections, "chart", "dimension");
  if (!dim_v) fail(ErrorKind::ValidationError, "[chart] dimension is required");
  const int m = static_cast<int>(need_number(*dim_v, "chart dimension"));
  if (m < 1 || m > 6)
    fail(ErrorKind::ValidationError, "chart dimension must be in [1, 6]");
  GeometryData geo;
  geo.dim = m;
  if (const Value* v = find(sections, "chart", "box"))
    geo.box = need_box(*v, m, "[chart] box");
  else {
    geo.box.lo.assign(m, -1.0);
    geo.box.hi.assign(m, 1.0);
  }
  if (const Value* v = find(sections, "chart", "singular_margin"))
    geo.singular_margin = need_number(*v, "singular_margin");
  if (const Value* v = find(sections, "chart", "oracle"))
    geo.oracle = parse_oracle_tag(need_string(*v, "oracle"));

  // [constants]
  std::map<std::string, double> constants;
  std::map<std::string, std::vector<double>> vector_constants;
  if (auto s = sections.find("constants"); s != sections.end()) {
    for (const auto& [key, value] : s->second.entries) {
      if (value.kind == Value::Kind::Array) {
        auto items = need_number_array(value, key);
        vector_constants[key] = items;
        for (std::size_t i = 0; i < items.size(); ++i)
          constants[key + std::to_string(i + 1)] = items[i];
      } else {
        constants[key] = need_number(value, key);
      }
    }
  }
  double alpha = 1.0, lambda = 0.0;
  if (auto it = constants.find("alpha"); it != constants.end()) alpha = it->second;
  if (auto it = constants.find("lambda"); it != constants.end())
    lambda = it->second;
  if (!(alpha > 0.0))
    fail(ErrorKind::ValidationError, "the coupling constant alpha must be positive");

  geo.env.chart_dim = m;
  geo.env.constants = constants;

  // [family]
  std::optional<FamilySpec> family;
  if (auto s = sections.find("family"); s != sections.end()) {
    FamilySpec fs;
    const Value* params = find(sections, "family", "parameters");
    if (!params || params->kind != Value::Kind::Array)
      fail(ErrorKind::ValidationError, "[family] parameters must be an array");
    for (const Value& p : params->items)
      fs.parameters.push_back(need_string(p, "parameter name"));
    const Value* lo = find(sections, "family", "lower");
    const Value* hi = find(sections, "family", "upper");
    if (!lo || !hi)
      fail(ErrorKind::ValidationError, "[family] requires lower and upper");
    fs.lower = need_number_array(*lo, "lower");
    fs.upper = need_number_array(*hi, "upper");
    if (fs.lower.size() != fs.parameters.size() ||
        fs.upper.size() != fs.parameters.size())
      fail(ErrorKind::ValidationError,
           "[family] lower/upper must match the parameter list");
    for (const std::string& p : fs.parameters) geo.env.parameters.insert(p);
    family = std::move(fs);
  }

  // [target] dimension feeds the env before metric parsing
  int n = 0;
  const bool has_target = sections.count("target") > 0;
  const bool has_map = sections.count("map") > 0;
  if (has_map && !has_target)
    fail(ErrorKind::ValidationError,
         "a [map] section requires a [target] section");
  if (has_target && !has_map)
    fail(ErrorKind::ValidationError,
         "a [target] section requires a [map] section");
  if (has_target) {
    const Value* nd = find(sections, "target", "dimension");
    if (!nd) fail(ErrorKind::ValidationError, "[target] dimension is required");
    n = static_cast<int>(need_number(*nd, "target dimension"));
    if (n < 1 || n > 6)
      fail(ErrorKind::ValidationError, "target dimension must be in [1, 6]");
  }
  geo.env.target_dim = n;

  // [metric]
  if (!sections.count("metric"))
    fail(ErrorKind::ValidationError, "a [metric] section is required");
  geo.metric = load_metric(sections, "metric", "g", m, geo.env, VarFamily::Chart);

  SolitonData data;
  data.geo = std::move(geo);
  data.alpha = alpha;
  data.lambda = lambda;

  // [target] + [map]
  if (has_target) {
    MapData map;
    map.target.dim = n;
    map.target.family = VarFamily::Target;
    map.target.env.chart_dim = 0;
    map.target.env.target_dim = n;
    map.target.env.constants = constants;
    for (const std::string& p :
         family ? family->parameters : std::vector<std::string>{})
      map.target.env.parameters.insert(p);
    if (const Value* v = find(sections, "target", "flat"))
      map.flat_target = v->kind == Value::Kind::Bool
                            ? v->boolean
                            : need_number(*v, "flat") != 0.0;
    if (const Value* v = find(sections, "target", "box"))
      map.target.box = need_box(*v, n, "[target] box");
    else {
      map.target.box.lo.assign(n, -1e12);
      map.target.box.hi.assign(n, 1e12);
    }
    map.target.metric =
        load_metric(sections, "target", "h", n, map.target.env, VarFamily::Target);
    if (map.flat_target)
      for (const auto& h : map.target.metric)
        if (!is_coordinate_free(*h))
          fail(ErrorKind::ValidationError,
               "a flat target requires constant metric coefficients");
    for (int a = 0; a < n; ++a) {
      const Value* comp = find(sections, "map", "phi" + std::to_string(a + 1));
      if (!comp)
        fail(ErrorKind::ValidationError,
             "[map] is missing phi" + std::to_string(a + 1));
      map.components.push_back(parse(need_string(*comp, "map component"),
                                     data.geo.env, VarFamily::Chart));
    }
    data.map = std::move(map);
  }

  // [potential]
  if (auto s = sections.find("potential"); s != sections.end()) {
    const Value* f = find(sections, "potential", "f");
    bool has_x = false;
    for (int i = 0; i < m; ++i)
      has_x |= find(sections, "potential", "X" + std::to_string(i + 1)) != nullptr;
    if (f && has_x)
      fail(ErrorKind::ValidationError,
           "[potential] must declare either f or X components, not both");
    if (f) data.potential.f = parse(need_string(*f, "f"), data.geo.env);
    if (has_x) {
      for (int i = 0; i < m; ++i) {
        const Value* xi = find(sections, "potential", "X" + std::to_string(i + 1));
        if (!xi)
          fail(ErrorKind::ValidationError,
               "[potential] is missing X" + std::to_string(i + 1));
        data.potential.X.push_back(
            parse(need_string(*xi, "X component"), data.geo.env));
      }
    }
    if (const Value* lf = find(sections, "potential", "lambda_field"))
      data.lambda_field =
          parse(need_string(*lf, "lambda_field"), data.geo.env);
  }

  // [rigid]
  if (sections.count("rigid")) {
    const Value* l = find(sections, "rigid", "l_dim");
    const Value* k = find(sections, "rigid", "k");
    if (!l || !k)
      fail(ErrorKind::ValidationError, "[rigid] requires l_dim and k");
    data.rigid = RigidMeta{static_cast<int>(need_number(*l, "l_dim")),
                           static_cast<int>(need_number(*k, "k"))};
  }

  // [probes]
  if (const Value* pts = find(sections, "probes", "points")) {
    if (pts->kind != Value::Kind::Array)
      fail(ErrorKind::ValidationError, "[probes] points must be an array");
    for (const Value& p : pts->items)
      data.probes.push_back(need_number_array(p, "probe point"));
    validate_probes(data.probes, data.geo.box, data.geo.singular_margin);
    out.explicit_probes = true;
    out.probe_count = static_cast<int>(data.probes.size());
  } else {
    out.probe_count = 8;
    out.probe_seed = 1;
    if (const Value* v = find(sections, "probes", "count"))
      out.probe_count = static_cast<int>(need_number(*v, "count"));
    if (const Value* v = find(sections, "probes", "seed"))
      out.probe_seed = static_cast<std::uint64_t>(need_number(*v, "seed"));
    data.probes = generate_probes(data.geo.box, data.geo.singular_margin,
                                  out.probe_count, out.probe_seed);
  }

  out.data = std::move(data);
  out.family = std::move(family);
  // Free parameters are bound to the box centre so that every subcommand can
  // evaluate a family file; the ansatz solver overrides them per iteration.
  if (out.family) {
    for (std::size_t i = 0; i < out.family->parameters.size(); ++i) {
      const double center =
          0.5 * (out.family->lower[i] + out.family->upper[i]);
      out.data.geo.env.constants[out.family->parameters[i]] = center;
      if (out.data.map)
        out.data.map->target.env.constants[out.family->parameters[i]] = center;
    }
  }
  return out;
}

Manifold load_manifold(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::ParseError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_manifold_text(buf.str(), path);
}

void regenerate_probes(Manifold& manifold, int count, std::uint64_t seed) {
  manifold.probe_count = count;
  manifold.probe_seed = seed;
  manifold.explicit_probes = false;
  manifold.data.probes =
      generate_probes(manifold.data.geo.box, manifold.data.geo.singular_margin,
                      count, seed);
}

std::string write_manifold(const Manifold& manifold) {
  const SolitonData& data = manifold.data;
  const int m = data.geo.dim;
  std::ostringstream out;
  out << "[chart]\n";
  out << "dimension = " << m << "\n";
  out << "box = [";
  for (int i = 0; i < m; ++i)
    out << (i ? ", [" : "[") << fmt(data.geo.box.lo[i]) << ", "
        << fmt(data.geo.box.hi[i]) << "]";
  out << "]\n";
  if (data.geo.singular_margin != 0.0)
    out << "singular_margin = " << fmt(data.geo.singular_margin) << "\n";

  out << "\n[metric]\n";
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j)
      out << "g" << (i + 1) << (j + 1) << " = \"" << print(data.geo.g(i, j))
          << "\"\n";

  if (data.map) {
    const MapData& map = *data.map;
    const int n = map.target.dim;
    out << "\n[target]\n";
    out << "dimension = " << n << "\n";
    out << "flat = " << (map.flat_target ? "true" : "false") << "\n";
    out << "box = [";
    for (int a = 0; a < n; ++a)
      out << (a ? ", [" : "[") << fmt(map.target.box.lo[a]) << ", "
          << fmt(map.target.box.hi[a]) << "]";
    out << "]\n";
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b)
        out << "h" << (a + 1) << (b + 1) << " = \""
            << print(*map.target.metric[a * n + b]) << "\"\n";
    out << "\n[map]\n";
    for (int a = 0; a < n; ++a)
      out << "phi" << (a + 1) << " = \"" << print(*map.components[a]) << "\"\n";
  }

  if (data.potential.has_f() || data.potential.has_X() || data.lambda_field) {
    out << "\n[potential]\n";
    if (data.potential.has_f())
      out << "f = \"" << print(*data.potential.f) << "\"\n";
    for (std::size_t i = 0; i < data.potential.X.size(); ++i)
      out << "X" << (i + 1) << " = \"" << print(*data.potential.X[i]) << "\"\n";
    if (data.lambda_field)
      out << "lambda_field = \"" << print(*data.lambda_field) << "\"\n";
  }

  out << "\n[constants]\n";
  for (const auto& [key, value] : data.geo.env.constants)
    out << key << " = " << fmt(value) << "\n";
  if (!data.geo.env.constants.count("alpha"))
    out << "alpha = " << fmt(data.alpha) << "\n";
  if (!data.geo.env.constants.count("lambda"))
    out << "lambda = " << fmt(data.lambda) << "\n";

  if (data.rigid) {
    out << "\n[rigid]\n";
    out << "l_dim = " << data.rigid->l_dim << "\n";
    out << "k = " << data.rigid->k << "\n";
  }

  out << "\n[probes]\n";
  if (manifold.explicit_probes) {
    out << "points = [";
    for (std::size_t i = 0; i < data.probes.size(); ++i) {
      out << (i ? ", [" : "[");
      for (std::size_t v = 0; v < data.probes[i].size(); ++v)
        out << (v ? ", " : "") << fmt(data.probes[i][v]);
      out << "]";
    }
    out << "]\n";
  } else {
    out << "count = " << manifold.probe_count << "\n";
    out << "seed = " << manifold.probe_seed << "\n";
  }
  return out.str();
}

ResidualReport verify_manifold(const Manifold& manifold,
                               const std::vector<std::string>& ids, int order,
                               double tol_scale) {
  ResidualReport report = run_checks(manifold.data, ids, order, tol_scale);
  report.source = manifold.source_path;
  report.file_hash = manifold.file_hash;
  report.seed = manifold.probe_seed;
  report.jet_order = order;
  report.tol_scale = tol_scale;
  return report;
}

AnsatzFamily family_from(const Manifold& manifold) {
  if (!manifold.family)
    fail(ErrorKind::ValidationError,
         "'" + manifold.source_path + "' declares no [family] block");
  AnsatzFamily family;
  family.data = manifold.data;
  family.parameters = manifold.family->parameters;
  family.lower = manifold.family->lower;
  family.upper = manifold.family->upper;
  return family;
}

}  // namespace phicurv
