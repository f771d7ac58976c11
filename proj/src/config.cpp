#include "tsbench/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "tsbench/errors.hpp"

namespace tsbench {

namespace {

template <typename T>
std::vector<T> as_list(const YAML::Node& node) {
  if (node.IsSequence()) return node.as<std::vector<T>>();
  return {node.as<T>()};
}

const std::set<std::string> kKnownKeys = {
    "d",      "M",     "sigma", "depth",       "scheme",     "epsilon",   "epsilon_overrides",
    "trials", "n0",    "n_cap", "n_list",      "seed",       "parallelism", "out",
    "n_mc",   "max_epochs",     "batch_size"};

}  // namespace

SweepConfig parse_sweep_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (!root.IsMap()) throw ConfigError("config must be a mapping of keys to values");

  SweepConfig c;
  c.out_dir.clear();  // unset unless the file names it; the CLI fills it in
  try {
    for (const auto& kv : root) {
      const auto key = kv.first.as<std::string>();
      if (!kKnownKeys.contains(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    if (root["d"]) c.d_list = as_list<std::size_t>(root["d"]);
    if (root["M"]) c.m_list = as_list<std::size_t>(root["M"]);
    if (root["sigma"]) c.sigmas = as_list<double>(root["sigma"]);
    if (root["depth"]) c.depths = as_list<int>(root["depth"]);
    if (root["scheme"]) {
      c.schemes.clear();
      for (const auto& s : as_list<std::string>(root["scheme"])) c.schemes.push_back(parse_width_variant(s));
    }
    if (root["epsilon"]) c.epsilons = as_list<double>(root["epsilon"]);
    if (const auto& ov = root["epsilon_overrides"]) {
      for (const auto& item : ov) {
        c.epsilon_overrides.push_back({item["d"].as<std::size_t>(), item["M"].as<std::size_t>(),
                                       as_list<double>(item["epsilon"])});
      }
    }
    if (root["trials"]) c.trials = root["trials"].as<std::size_t>();
    if (root["n0"]) c.n0 = root["n0"].as<std::size_t>();
    if (root["n_cap"]) c.n_cap = root["n_cap"].as<std::size_t>();
    if (root["n_list"]) c.n_list = as_list<std::size_t>(root["n_list"]);
    if (root["seed"]) c.seed = root["seed"].as<std::uint64_t>();
    if (root["parallelism"]) c.parallelism = root["parallelism"].as<int>();
    if (root["out"]) c.out_dir = root["out"].as<std::string>();
    if (root["n_mc"]) c.n_mc = root["n_mc"].as<std::size_t>();
    if (root["max_epochs"]) c.train.max_epochs = root["max_epochs"].as<int>();
    if (root["batch_size"]) c.train.batch_size = root["batch_size"].as<std::size_t>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config value error: ") + e.what());
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  try {
    c.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return c;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_sweep_config(ss.str());
}

}  // namespace tsbench
