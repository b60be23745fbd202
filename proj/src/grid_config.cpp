#include "metaboot/grid_config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

namespace metaboot {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& s) {
  std::size_t pos = s.find_first_of("#;");
  return pos == std::string::npos ? s : s.substr(0, pos);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!item.empty()) out.push_back(std::move(item));
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  if (!item.empty()) out.push_back(std::move(item));
  return out;
}

double parse_num(const std::string& where, const std::string& key,
                 const std::string& value) {
  const char* begin = value.c_str();
  char* end = nullptr;
  double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    fail(errc::bad_config,
         where + ": key '" + key + "': cannot parse '" + value + "'");
  return v;
}

std::size_t parse_count(const std::string& where, const std::string& key,
                        const std::string& value) {
  double v = parse_num(where, key, value);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v)))
    fail(errc::bad_config,
         where + ": key '" + key + "' wants a whole number, got '" + value + "'");
  return static_cast<std::size_t>(v);
}

EffectKind parse_effect(const std::string& where, const std::string& value) {
  if (value == "smd") return EffectKind::smd;
  if (value == "fcor") return EffectKind::fisher_z;
  if (value == "lnor") return EffectKind::log_or;
  fail(errc::bad_config, where + ": unknown effect family '" + value + "'");
}

void apply_key(SimulationConfig& cfg, const std::string& where,
               const std::string& key, const std::string& value) {
  if (key == "effect") {
    cfg.kind = parse_effect(where, value);
  } else if (key == "k") {
    cfg.k_studies = parse_count(where, key, value);
  } else if (key == "sizes") {
    cfg.size_pool.clear();
    for (const std::string& item : split_list(value))
      cfg.size_pool.push_back(parse_num(where, key, item));
  } else if (key == "mu") {
    cfg.mu_delta = parse_num(where, key, value);
  } else if (key == "tau2") {
    cfg.tau2_true = parse_num(where, key, value);
  } else if (key == "covariates") {
    cfg.n_covariates = parse_count(where, key, value);
  } else if (key == "beta") {
    cfg.beta_value = parse_num(where, key, value);
  } else if (key == "lambda") {
    cfg.lambda_null = parse_num(where, key, value);
  } else if (key == "tests") {
    cfg.stat_kinds.clear();
    for (const std::string& item : split_list(value))
      cfg.stat_kinds.push_back(test_select_from_name(item));
    if (cfg.stat_kinds.empty())
      fail(errc::bad_config, where + ": key 'tests' lists no tests");
  } else if (key == "reps") {
    cfg.n_replications = parse_count(where, key, value);
  } else if (key == "nrep") {
    cfg.bootstrap.n_rep = parse_count(where, key, value);
  } else if (key == "alpha") {
    cfg.bootstrap.alpha = parse_num(where, key, value);
  } else if (key == "seed") {
    cfg.seed = static_cast<std::uint64_t>(parse_num(where, key, value));
  } else {
    fail(errc::bad_config, where + ": unknown key '" + key + "'");
  }
}

}  // namespace

std::vector<GridCell> parse_grid_text(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;

  using KeyValue = std::pair<std::string, std::string>;
  std::vector<KeyValue> defaults;
  std::vector<GridCell> cells;
  std::vector<std::vector<KeyValue>> cell_keys;

  while (std::getline(in, line)) {
    ++line_no;
    std::string s = trim(strip_comment(line));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']')
        fail(errc::bad_config,
             "grid line " + std::to_string(line_no) + ": unterminated section");
      std::string label = trim(s.substr(1, s.size() - 2));
      if (label.empty())
        fail(errc::bad_config,
             "grid line " + std::to_string(line_no) + ": empty cell label");
      for (const GridCell& c : cells)
        if (c.label == label)
          fail(errc::bad_config, "duplicate cell label '" + label + "'");
      cells.push_back(GridCell{label, SimulationConfig{}});
      cell_keys.emplace_back();
      continue;
    }
    std::size_t eq = s.find('=');
    if (eq == std::string::npos)
      fail(errc::bad_config,
           "grid line " + std::to_string(line_no) + ": expected key = value");
    std::string key = trim(s.substr(0, eq));
    std::string value = trim(s.substr(eq + 1));
    if (key.empty())
      fail(errc::bad_config,
           "grid line " + std::to_string(line_no) + ": empty key");
    if (cells.empty())
      defaults.emplace_back(key, value);
    else
      cell_keys.back().emplace_back(key, value);
  }
  if (cells.empty()) fail(errc::bad_config, "grid defines no cells");

  for (std::size_t i = 0; i < cells.size(); ++i) {
    std::string where = "cell [" + cells[i].label + "]";
    for (const KeyValue& kv : defaults)
      apply_key(cells[i].config, where, kv.first, kv.second);
    for (const KeyValue& kv : cell_keys[i])
      apply_key(cells[i].config, where, kv.first, kv.second);
    try {
      cells[i].config.validate();
    } catch (const error& e) {
      fail(errc::bad_config, where + ": " + e.what());
    }
  }
  return cells;
}

std::vector<GridCell> parse_grid(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::bad_config, "cannot open grid '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_grid_text(buf.str());
}

}  // namespace metaboot
