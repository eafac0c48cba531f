#include "stnoma/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

namespace stnoma {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const auto v = trim(text);
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), value);
  if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(value))
      throw ConfigError("non-finite value '" + std::string(text) + "' for " + std::string(key));
  return value;
}

Antennas parse_triple(std::string_view text) {
  // M1xM2xN
  Antennas a;
  const auto x1 = text.find('x');
  const auto x2 = text.find('x', x1 == std::string_view::npos ? x1 : x1 + 1);
  if (x1 == std::string_view::npos || x2 == std::string_view::npos)
    throw ConfigError("antenna triple must look like M1xM2xN, got '" + std::string(text) + "'");
  a.m1 = parse_number<int>("convergence_configs", text.substr(0, x1));
  a.m2 = parse_number<int>("convergence_configs", text.substr(x1 + 1, x2 - x1 - 1));
  a.n_bs = parse_number<int>("convergence_configs", text.substr(x2 + 1));
  return a;
}

std::vector<Antennas> parse_triples(std::string_view text) {
  std::vector<Antennas> out;
  std::string buf(text);
  std::replace(buf.begin(), buf.end(), ',', ' ');
  std::istringstream in(buf);
  std::string item;
  while (in >> item) out.push_back(parse_triple(item));
  if (out.empty()) throw ConfigError("convergence_configs must list at least one triple");
  return out;
}

}  // namespace

SystemConfig Scenario::system_config() const {
  auto cfg = config_from_scenario(antennas, d1, d2, pathloss_exponent, pt_dbm, sigma2_dbm);
  cfg.seed = seed;
  validate(cfg);
  try {
    validate(solver);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

const std::vector<std::string>& scenario_keys() {
  static const std::vector<std::string> keys{
      "n_bs", "m1", "m2", "d1", "d2", "pathloss_exponent", "pt_dbm", "sigma2_dbm",
      "trials", "mu_steps", "tau_steps", "seed", "ccp_max_iters", "ccp_tol", "inner_tol",
      "inner_max_iters", "linearization", "convergence_configs"};
  return keys;
}

void set_scenario_key(Scenario& s, std::string_view key, std::string_view value) {
  if (key == "n_bs") s.antennas.n_bs = parse_number<int>(key, value);
  else if (key == "m1") s.antennas.m1 = parse_number<int>(key, value);
  else if (key == "m2") s.antennas.m2 = parse_number<int>(key, value);
  else if (key == "d1") s.d1 = parse_number<double>(key, value);
  else if (key == "d2") s.d2 = parse_number<double>(key, value);
  else if (key == "pathloss_exponent") s.pathloss_exponent = parse_number<double>(key, value);
  else if (key == "pt_dbm") s.pt_dbm = parse_number<double>(key, value);
  else if (key == "sigma2_dbm") s.sigma2_dbm = parse_number<double>(key, value);
  else if (key == "trials") s.trials = parse_number<int>(key, value);
  else if (key == "mu_steps") s.mu_steps = parse_number<int>(key, value);
  else if (key == "tau_steps") s.tau_steps = parse_number<int>(key, value);
  else if (key == "seed") s.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "ccp_max_iters") s.solver.ccp_max_iters = parse_number<int>(key, value);
  else if (key == "ccp_tol") s.solver.ccp_tol = parse_number<double>(key, value);
  else if (key == "inner_tol") s.solver.inner_tol = parse_number<double>(key, value);
  else if (key == "inner_max_iters") s.solver.inner_max_iters = parse_number<int>(key, value);
  else if (key == "linearization") {
    const auto v = trim(value);
    if (v == "full") s.solver.linearization = Linearization::kFullGradient;
    else if (v == "own") s.solver.linearization = Linearization::kOwnCoordinate;
    else throw ConfigError("linearization must be 'full' or 'own'");
  } else if (key == "convergence_configs") s.convergence_configs = parse_triples(value);
  else throw ConfigError("unknown scenario key '" + std::string(key) + "'");

  if (s.trials < 1 || s.mu_steps < 1 || s.tau_steps < 1)
    throw ConfigError("trials and grid sizes must be positive");
}

Scenario parse_scenario(std::string_view text, Scenario base) {
  std::set<std::string, std::less<>> seen;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    auto line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (!seen.insert(std::string(key)).second)
      throw ConfigError("line " + std::to_string(line_no) + ": repeated key '" +
                        std::string(key) + "'");
    set_scenario_key(base, key, line.substr(eq + 1));
  }
  return base;
}

Scenario load_scenario(const std::filesystem::path& path, Scenario base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), std::move(base));
}

void apply_env_overrides(Scenario& s, const EnvLookup& lookup) {
  for (const auto& key : scenario_keys()) {
    std::string name = "STNOMA_";
    for (char c : key) name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (const char* v = lookup(name.c_str())) set_scenario_key(s, key, v);
  }
}

std::string antenna_label(const Antennas& a) {
  return std::to_string(a.m1) + "x" + std::to_string(a.m2) + "x" + std::to_string(a.n_bs);
}

}  // namespace stnoma
