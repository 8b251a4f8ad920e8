#include "reconkit/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace reconkit {

using ordered_json = nlohmann::ordered_json;

void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Errc::IoError, "cannot open for writing: " + tmp);
    out.write(content.data(), std::streamsize(content.size()));
    if (!out) fail(Errc::IoError, "short write: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) fail(Errc::IoError, "rename failed: " + path + ": " + ec.message());
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open: " + path);
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) fail(Errc::IoError, "read failed: " + path);
  return content;
}

/* --- structure JSON ------------------------------------------------------ */

namespace {

const char* kind_tag(SymbolKind k) {
  switch (k) {
    case SymbolKind::Unit: return "unit";
    case SymbolKind::Noise: return "noise";
    case SymbolKind::BPoly: return "bpoly";
    case SymbolKind::Integrated: return "integrated";
    case SymbolKind::Coordinate: return "coordinate";
    case SymbolKind::IntegratedPlus: return "iplus";
    case SymbolKind::Product: return "product";
  }
  return "?";
}

SymbolKind kind_from_tag(const std::string& t) {
  if (t == "unit") return SymbolKind::Unit;
  if (t == "noise") return SymbolKind::Noise;
  if (t == "bpoly") return SymbolKind::BPoly;
  if (t == "integrated") return SymbolKind::Integrated;
  if (t == "coordinate") return SymbolKind::Coordinate;
  if (t == "iplus") return SymbolKind::IntegratedPlus;
  if (t == "product") return SymbolKind::Product;
  fail(Errc::ParseError, "unknown symbol kind tag: " + t);
}

ordered_json exponent_json(int dim, const MultiIndex& k) {
  ordered_json a = ordered_json::array();
  for (int i = 0; i < dim; ++i) a.push_back(int(k.k[i]));
  return a;
}

MultiIndex exponent_from_json(int dim, const ordered_json& a) {
  if (!a.is_array() || int(a.size()) != dim) fail(Errc::ParseError, "bad exponent array");
  MultiIndex k;
  for (int i = 0; i < dim; ++i) {
    int v = a[i].get<int>();
    if (v < 0 || v > 255) fail(Errc::ParseError, "exponent out of range");
    k.k[i] = uint8_t(v);
  }
  return k;
}

}  // namespace

std::string structure_to_json(const ConcreteStructure& s) {
  const StructureData& d = s.data();
  const size_t n = d.base_basis.size() + d.plus_basis.size();
  for (size_t i = 0; i < d.base_basis.size(); ++i)
    if (size_t(d.base_basis[i]) >= n) fail(Errc::InvalidArgument, "non-canonical id layout");
  for (size_t i = 0; i < d.plus_basis.size(); ++i)
    if (size_t(d.plus_basis[i]) >= n) fail(Errc::InvalidArgument, "non-canonical id layout");

  ordered_json j;
  j["format"] = "reconkit-structure";
  j["version"] = 1;
  j["dim"] = d.dim;
  j["theta"] = to_string(d.theta);
  ordered_json charts = ordered_json::array();
  for (const auto& ch : d.charts) {
    ordered_json c = ordered_json::array();
    for (const auto& v : ch) c.push_back(to_string(v));
    charts.push_back(std::move(c));
  }
  j["charts"] = std::move(charts);
  j["noises"] = d.noise_names;

  ordered_json symbols = ordered_json::array();
  for (size_t id = 0; id < n; ++id) {
    const SymbolData& sym = d.symbols[id];
    ordered_json e;
    e["id"] = int(id);
    e["space"] = sym.space == Space::Base ? "base" : "plus";
    e["kind"] = kind_tag(sym.kind);
    e["name"] = sym.name;
    e["hom"] = to_string(sym.hom);
    switch (sym.kind) {
      case SymbolKind::Noise:
        e["noise"] = sym.noise;
        break;
      case SymbolKind::BPoly:
        e["chart"] = sym.chart;
        e["exponent"] = exponent_json(d.dim, sym.mindex);
        break;
      case SymbolKind::Coordinate:
        e["chart"] = sym.chart;
        e["axis"] = sym.axis;
        break;
      case SymbolKind::Integrated:
        e["inner"] = int(sym.inner);
        break;
      case SymbolKind::IntegratedPlus:
        e["chart"] = sym.chart;
        e["deriv"] = exponent_json(d.dim, sym.mindex);
        e["inner"] = int(sym.inner);
        break;
      case SymbolKind::Product: {
        ordered_json fs = ordered_json::array();
        for (const auto& [fid, m] : sym.factors) fs.push_back(ordered_json::array({int(fid), m}));
        e["factors"] = std::move(fs);
        break;
      }
      default:
        break;
    }
    symbols.push_back(std::move(e));
  }
  j["symbols"] = std::move(symbols);

  ordered_json rows = ordered_json::array();
  for (size_t id = 0; id < n; ++id) {
    const auto& row = d.symbols[id].space == Space::Base ? d.delta[id] : d.delta_plus[id];
    ordered_json terms = ordered_json::array();
    for (const auto& t : row)
      terms.push_back(ordered_json::array({int(t.left), int(t.right), to_string(t.coeff)}));
    ordered_json e;
    e["of"] = int(id);
    e["terms"] = std::move(terms);
    rows.push_back(std::move(e));
  }
  j["rows"] = std::move(rows);

  return j.dump(1) + "\n";
}

ConcreteStructure structure_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    fail(Errc::ParseError, std::string("structure JSON: ") + e.what());
  }
  try {
    if (j.value("format", "") != "reconkit-structure")
      fail(Errc::ParseError, "not a structure file");
    if (j.value("version", 0) != 1) fail(Errc::ParseError, "unsupported structure version");

    StructureData sd;
    sd.dim = j.at("dim").get<int>();
    if (sd.dim != 1 && sd.dim != 2) fail(Errc::ParseError, "dim must be 1 or 2");
    sd.theta = parse_rational(j.at("theta").get<std::string>());
    for (const auto& ch : j.at("charts")) {
      std::vector<Rational> offs;
      for (const auto& v : ch) offs.push_back(parse_rational(v.get<std::string>()));
      if (int(offs.size()) != sd.dim) fail(Errc::ParseError, "chart arity mismatch");
      sd.charts.push_back(std::move(offs));
    }
    sd.noise_names = j.at("noises").get<std::vector<std::string>>();

    const auto& symbols = j.at("symbols");
    const int n = int(symbols.size());
    for (int id = 0; id < n; ++id) {
      const auto& e = symbols[id];
      if (e.at("id").get<int>() != id) fail(Errc::ParseError, "symbol ids must be contiguous");
      SymbolData sym;
      sym.space = e.at("space").get<std::string>() == "base" ? Space::Base : Space::Plus;
      sym.kind = kind_from_tag(e.at("kind").get<std::string>());
      sym.name = e.at("name").get<std::string>();
      sym.hom = parse_rational(e.at("hom").get<std::string>());
      auto ref = [&](const ordered_json& v) {
        int r = v.get<int>();
        if (r < 0 || r >= n) fail(Errc::ParseError, "symbol reference out of range");
        return SymbolId(r);
      };
      switch (sym.kind) {
        case SymbolKind::Noise:
          sym.noise = e.at("noise").get<int>();
          break;
        case SymbolKind::BPoly:
          sym.chart = e.at("chart").get<int>();
          sym.mindex = exponent_from_json(sd.dim, e.at("exponent"));
          break;
        case SymbolKind::Coordinate:
          sym.chart = e.at("chart").get<int>();
          sym.axis = e.at("axis").get<int>();
          break;
        case SymbolKind::Integrated:
          sym.inner = ref(e.at("inner"));
          break;
        case SymbolKind::IntegratedPlus:
          sym.chart = e.at("chart").get<int>();
          sym.mindex = exponent_from_json(sd.dim, e.at("deriv"));
          sym.inner = ref(e.at("inner"));
          break;
        case SymbolKind::Product:
          for (const auto& f : e.at("factors")) {
            if (!f.is_array() || f.size() != 2) fail(Errc::ParseError, "bad factor entry");
            int m = f[1].get<int>();
            if (m < 1) fail(Errc::ParseError, "bad factor multiplicity");
            sym.factors.emplace_back(ref(f[0]), m);
          }
          break;
        default:
          break;
      }
      sd.symbols.push_back(std::move(sym));
      sd.delta.emplace_back();
      sd.delta_plus.emplace_back();
    }

    for (const auto& r : j.at("rows")) {
      int of = r.at("of").get<int>();
      if (of < 0 || of >= n) fail(Errc::ParseError, "row of unknown symbol");
      std::vector<CoTerm> row;
      for (const auto& t : r.at("terms")) {
        if (!t.is_array() || t.size() != 3) fail(Errc::ParseError, "bad row term");
        int l = t[0].get<int>(), rr = t[1].get<int>();
        if (l < 0 || l >= n || rr < 0 || rr >= n) fail(Errc::ParseError, "row term out of range");
        row.push_back({SymbolId(l), SymbolId(rr), parse_rational(t[2].get<std::string>())});
      }
      (sd.symbols[of].space == Space::Base ? sd.delta : sd.delta_plus)[of] = std::move(row);
    }

    for (SymbolId id = 0; id < n; ++id) {
      if (sd.symbols[id].space == Space::Base)
        sd.base_basis.push_back(id);
      else
        sd.plus_basis.push_back(id);
      if (sd.symbols[id].is_plus_generator()) sd.plus_generators.push_back(id);
    }
    sd.rebuild_index();
    if (sd.index.size() != size_t(n)) fail(Errc::ParseError, "duplicate symbol names");

    return ConcreteStructure(std::move(sd));
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(Errc::ParseError, std::string("structure JSON: ") + e.what());
  }
}

void save_structure(const ConcreteStructure& s, const std::string& path) {
  atomic_write(path, structure_to_json(s));
}

ConcreteStructure load_structure(const std::string& path) {
  return structure_from_json(read_file(path));
}

/* --- tree build recipes -------------------------------------------------- */

TreeStructureSpec tree_spec_from_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    fail(Errc::ParseError, std::string("structure recipe JSON: ") + e.what());
  }
  try {
    TreeStructureSpec spec;
    spec.dim = j.value("dim", 1);
    spec.theta = parse_rational(j.value("theta", "1"));
    if (!j.contains("cutoff")) fail(Errc::ParseError, "recipe needs a cutoff");
    spec.cutoff = parse_rational(j.at("cutoff").get<std::string>());
    for (const auto& nj : j.at("noises"))
      spec.noises.emplace_back(nj.at("name").get<std::string>(),
                               parse_rational(nj.at("hom").get<std::string>()));
    if (j.contains("products"))
      for (const auto& rule : j.at("products"))
        spec.products.push_back(rule.get<std::vector<std::string>>());
    spec.poly_degree = j.value("poly_degree", 0);
    if (j.contains("max_deriv") && !j.at("max_deriv").is_null())
      spec.max_deriv = j.at("max_deriv").get<int>();
    return spec;
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    fail(Errc::ParseError, std::string("structure recipe JSON: ") + e.what());
  }
}

std::string tree_spec_to_json(const TreeStructureSpec& spec) {
  ordered_json j;
  j["dim"] = spec.dim;
  j["theta"] = to_string(spec.theta);
  j["cutoff"] = to_string(spec.cutoff);
  ordered_json noises = ordered_json::array();
  for (const auto& [name, hom] : spec.noises) {
    ordered_json e;
    e["name"] = name;
    e["hom"] = to_string(hom);
    noises.push_back(std::move(e));
  }
  j["noises"] = std::move(noises);
  j["products"] = spec.products;
  j["poly_degree"] = spec.poly_degree;
  if (spec.max_deriv >= 0)
    j["max_deriv"] = spec.max_deriv;
  else
    j["max_deriv"] = nullptr;
  return j.dump(1) + "\n";
}

/* --- sampled field collections ------------------------------------------ */

namespace {
void put_u32(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(char((v >> (8 * i)) & 0xff));
}
uint32_t get_u32(const std::string& s, size_t& p) {
  if (p + 4 > s.size()) fail(Errc::ParseError, "truncated field file");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= uint32_t(uint8_t(s[p + i])) << (8 * i);
  p += 4;
  return v;
}
}  // namespace

void save_fields(const std::string& path, const Grid& g, const std::vector<Field>& fields) {
  std::string buf;
  buf += "RKF1";
  buf.push_back(char(g.dim));
  buf.push_back(char(g.L));
  put_u32(buf, uint32_t(fields.size()));
  for (const auto& f : fields) {
    if (f.grid() != g) fail(Errc::InvalidArgument, "field grid mismatch in container");
    const auto& v = f.values();
    size_t at = buf.size();
    buf.resize(at + v.size() * sizeof(double));
    std::memcpy(buf.data() + at, v.data(), v.size() * sizeof(double));
  }
  atomic_write(path, buf);
}

std::vector<Field> load_fields(const std::string& path, Grid* g_out) {
  const std::string buf = read_file(path);
  if (buf.size() < 10 || buf.compare(0, 4, "RKF1") != 0)
    fail(Errc::ParseError, "not a field container: " + path);
  size_t p = 4;
  Grid g(int(uint8_t(buf[p])), int(uint8_t(buf[p + 1])));
  p += 2;
  uint32_t count = get_u32(buf, p);
  std::vector<Field> out;
  for (uint32_t i = 0; i < count; ++i) {
    const size_t bytes = g.size() * sizeof(double);
    if (p + bytes > buf.size()) fail(Errc::ParseError, "truncated field file");
    std::vector<double> v(g.size());
    std::memcpy(v.data(), buf.data() + p, bytes);
    p += bytes;
    out.emplace_back(Field(g, std::move(v)));
  }
  if (p != buf.size()) fail(Errc::ParseError, "trailing bytes in field file");
  if (g_out) *g_out = g;
  return out;
}

/* --- block spectra -------------------------------------------------------- */

std::string spectrum_to_csv(const std::vector<double>& block_magnitudes) {
  std::string out = "block,magnitude\n";
  char line[64];
  for (size_t i = 0; i < block_magnitudes.size(); ++i) {
    std::snprintf(line, sizeof line, "%d,%.17g\n", int(i) - 1, block_magnitudes[i]);
    out += line;
  }
  return out;
}

std::vector<double> spectrum_from_csv(const std::string& text) {
  std::vector<double> out;
  size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    size_t eol = text.find('\n', pos);
    if (eol == std::string::npos) eol = text.size();
    std::string line = text.substr(pos, eol - pos);
    pos = eol + 1;
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    size_t comma = line.find(',');
    if (comma == std::string::npos) fail(Errc::ParseError, "bad spectrum row: " + line);
    int block = std::stoi(line.substr(0, comma));
    if (block != int(out.size()) - 1) fail(Errc::ParseError, "non-contiguous block numbering");
    out.push_back(std::stod(line.substr(comma + 1)));
  }
  return out;
}

}  // namespace reconkit
