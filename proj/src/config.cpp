#include "rwprior/config.hpp"

#include <concepts>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include "json.hpp"

namespace rwprior {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) { throw ConfigError(path + ": " + why); }

void check_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok |= key == a;
    if (!ok) fail(path.empty() ? key : path + "." + key, "unknown key");
  }
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

void read(const json& obj, const std::string& path, const char* key, double& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_number()) fail(join(path, key), "expected a number");
  out = v.get<double>();
}

template <class Int>
void read_uint(const json& v, const std::string& where, Int& out) {
  if (v.is_number_unsigned()) {
    out = static_cast<Int>(v.get<std::uint64_t>());
    return;
  }
  if (v.is_number_integer()) fail(where, "must be non-negative");
  fail(where, "expected a non-negative integer");
}

template <std::unsigned_integral Int>
void read(const json& obj, const std::string& path, const char* key, Int& out) {
  if (obj.contains(key)) read_uint(obj.at(key), join(path, key), out);
}

void read(const json& obj, const std::string& path, const char* key, std::string& out) {
  if (!obj.contains(key)) return;
  const json& v = obj.at(key);
  if (!v.is_string()) fail(join(path, key), "expected a string");
  out = v.get<std::string>();
}

template <class Enum, class Parse>
void read_enum(const json& obj, const std::string& path, const char* key, Enum& out, Parse parse) {
  if (!obj.contains(key)) return;
  std::string s;
  read(obj, path, key, s);
  try {
    out = parse(s);
  } catch (const std::invalid_argument& e) {
    fail(join(path, key), e.what());
  }
}

RandomNetConfig parse_net(const json& obj, const std::string& path) {
  check_keys(obj, path, {"kind", "depth", "channels", "kernel", "theta", "order_n", "iterations_k", "sigmas", "init",
                         "reinit", "seed"});
  RandomNetConfig n;
  read_enum(obj, path, "kind", n.kind, parse_manifold_kind);
  read(obj, path, "depth", n.depth);
  read(obj, path, "channels", n.channels);
  read(obj, path, "kernel", n.kernel);
  read(obj, path, "theta", n.theta);
  read(obj, path, "order_n", n.order_n);
  read(obj, path, "iterations_k", n.iterations_k);
  if (obj.contains("sigmas")) {
    const json& s = obj.at("sigmas");
    if (!s.is_array()) fail(path + ".sigmas", "expected an array of numbers");
    n.sigmas.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!s[i].is_number()) fail(path + ".sigmas[" + std::to_string(i) + "]", "expected a number");
      n.sigmas.push_back(s[i].get<double>());
    }
  }
  read_enum(obj, path, "init", n.init, parse_init_scheme);
  read_enum(obj, path, "reinit", n.reinit, parse_reinit_policy);
  read(obj, path, "seed", n.seed);
  return n;
}

json net_to_json(const RandomNetConfig& n) {
  return json{{"kind", to_string(n.kind)},       {"depth", n.depth},
              {"channels", n.channels},          {"kernel", n.kernel},
              {"theta", n.theta},                {"order_n", n.order_n},
              {"iterations_k", n.iterations_k},  {"sigmas", n.sigmas},
              {"init", to_string(n.init)},       {"reinit", to_string(n.reinit)},
              {"seed", n.seed}};
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("<root>: malformed JSON: ") + e.what());
  }
  check_keys(root, "", {"dataset", "model", "loss", "optimizer", "seeds", "cells", "output_dir"});
  ExperimentConfig cfg;

  if (root.contains("dataset")) {
    const json& d = root.at("dataset");
    check_keys(d, "dataset", {"count", "val_count", "size", "noise_sigma", "seed"});
    read(d, "dataset", "count", cfg.dataset.count);
    read(d, "dataset", "val_count", cfg.dataset.val_count);
    read(d, "dataset", "size", cfg.dataset.size);
    read(d, "dataset", "noise_sigma", cfg.dataset.noise_sigma);
    read(d, "dataset", "seed", cfg.dataset.seed);
  }
  if (root.contains("model")) {
    const json& m = root.at("model");
    check_keys(m, "model", {"layers", "channels", "kernel"});
    read(m, "model", "layers", cfg.model.layers);
    read(m, "model", "channels", cfg.model.channels);
    read(m, "model", "kernel", cfg.model.kernel);
  }
  if (root.contains("loss")) {
    const json& l = root.at("loss");
    check_keys(l, "loss", {"base_norm", "lambda", "nets", "ensemble_reduce"});
    read_enum(l, "loss", "base_norm", cfg.loss.base_norm, parse_norm);
    read(l, "loss", "lambda", cfg.loss.lambda);
    read_enum(l, "loss", "ensemble_reduce", cfg.loss.ensemble_reduce, [](const std::string& s) {
      if (s != "mean") throw std::invalid_argument("unknown ensemble reduction '" + s + "' (expected mean)");
      return EnsembleReduce::Mean;
    });
    if (l.contains("nets")) {
      const json& nets = l.at("nets");
      if (!nets.is_array()) fail("loss.nets", "expected an array");
      for (std::size_t i = 0; i < nets.size(); ++i)
        cfg.loss.nets.push_back(parse_net(nets[i], "loss.nets[" + std::to_string(i) + "]"));
    }
  }
  if (root.contains("optimizer")) {
    const json& o = root.at("optimizer");
    check_keys(o, "optimizer", {"lr", "epochs", "batch"});
    read(o, "optimizer", "lr", cfg.optimizer.lr);
    read(o, "optimizer", "epochs", cfg.optimizer.epochs);
    read(o, "optimizer", "batch", cfg.optimizer.batch);
  }
  if (root.contains("seeds")) {
    const json& s = root.at("seeds");
    if (!s.is_array()) fail("seeds", "expected an array of non-negative integers");
    cfg.seeds.clear();
    for (std::size_t i = 0; i < s.size(); ++i) {
      std::uint64_t v = 0;
      read_uint(s[i], "seeds[" + std::to_string(i) + "]", v);
      cfg.seeds.push_back(v);
    }
  }
  if (root.contains("cells")) {
    const json& c = root.at("cells");
    if (!c.is_array()) fail("cells", "expected an array of strings");
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (!c[i].is_string()) fail("cells[" + std::to_string(i) + "]", "expected a string");
      cfg.cells.push_back(c[i].get<std::string>());
    }
  }
  read(root, "", "output_dir", cfg.output_dir);

  try {
    cfg.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_net(const RandomNetConfig& net) { return net_to_json(net).dump(); }

std::string serialize_config(const ExperimentConfig& cfg) {
  json nets = json::array();
  for (const RandomNetConfig& n : cfg.loss.nets) nets.push_back(net_to_json(n));
  json root{
      {"dataset",
       {{"count", cfg.dataset.count},
        {"val_count", cfg.dataset.val_count},
        {"size", cfg.dataset.size},
        {"noise_sigma", cfg.dataset.noise_sigma},
        {"seed", cfg.dataset.seed}}},
      {"model", {{"layers", cfg.model.layers}, {"channels", cfg.model.channels}, {"kernel", cfg.model.kernel}}},
      {"loss",
       {{"base_norm", to_string(cfg.loss.base_norm)},
        {"lambda", cfg.loss.lambda},
        {"nets", nets},
        {"ensemble_reduce", "mean"}}},
      {"optimizer", {{"lr", cfg.optimizer.lr}, {"epochs", cfg.optimizer.epochs}, {"batch", cfg.optimizer.batch}}},
      {"seeds", cfg.seeds},
      {"cells", cfg.cells},
      {"output_dir", cfg.output_dir}};
  return root.dump(2);
}

}  // namespace rwprior
