#include "mixsaem/params_io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace mixsaem {

namespace {

using nlohmann::json;

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

Eigen::VectorXd vector_from(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  return v;
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

}  // namespace

DiscreteEncoding parse_encoding(const std::string& name) {
  if (name == "level") return DiscreteEncoding::LevelCode;
  if (name == "onehot") return DiscreteEncoding::OneHot;
  throw DataError("unknown discrete encoding '" + name + "' (expected level or onehot)");
}

std::string encoding_name(DiscreteEncoding e) {
  return e == DiscreteEncoding::LevelCode ? "level" : "onehot";
}

std::string params_to_json(const ModelParams& params) {
  json j;
  j["encoding"] = encoding_name(params.encoding);
  j["beta"] = vector_json(params.beta);
  j["mu"] = vector_json(params.gaussian.mean);
  json sigma = json::array();
  for (Eigen::Index r = 0; r < params.gaussian.cov.rows(); ++r)
    sigma.push_back(vector_json(params.gaussian.cov.row(r).transpose()));
  j["sigma"] = sigma;
  json discretes = json::array();
  for (const auto& d : params.discretes) discretes.push_back(vector_json(d.probs));
  j["discrete"] = discretes;
  return j.dump(2);
}

ModelParams params_from_json(const std::string& text) {
  const json j = parse(text, "params");
  ModelParams p;
  try {
    p.encoding = parse_encoding(j.value("encoding", std::string("level")));
    p.beta = vector_from(j.at("beta"));
    p.gaussian.mean = vector_from(j.at("mu"));
    const auto& sigma = j.at("sigma");
    const auto h = p.gaussian.mean.size();
    if (static_cast<Eigen::Index>(sigma.size()) != h)
      throw DataError("params: sigma has the wrong number of rows");
    p.gaussian.cov.resize(h, h);
    for (Eigen::Index r = 0; r < h; ++r) {
      const auto row = vector_from(sigma[static_cast<std::size_t>(r)]);
      if (row.size() != h) throw DataError("params: sigma row has the wrong length");
      p.gaussian.cov.row(r) = row.transpose();
    }
    for (const auto& d : j.at("discrete")) p.discretes.push_back(CategoricalParams{vector_from(d)});
  } catch (const json::exception& e) {
    throw DataError(std::string("params: ") + e.what());
  }
  p.validate();
  return p;
}

void save_params(const ModelParams& params, const std::string& path) {
  write_text_file(path, params_to_json(params) + "\n");
}

ModelParams load_params(const std::string& path) { return params_from_json(read_text_file(path)); }

void apply_saem_config(SaemConfig& cfg, const std::string& json_text) {
  const json j = parse(json_text, "saem config");
  if (!j.is_object()) throw DataError("saem config: expected a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& key = it.key();
      const auto& v = it.value();
      if (key == "iterations") cfg.iterations = v.get<int>();
      else if (key == "burn_in") cfg.burn_in = v.get<int>();
      else if (key == "tau") cfg.tau = v.get<double>();
      else if (key == "step_rule") {
        const auto s = v.get<std::string>();
        if (s == "shifted") cfg.step_rule = StepRule::Shifted;
        else if (s == "literal") cfg.step_rule = StepRule::Literal;
        else throw DataError("saem config: step_rule must be shifted or literal");
      } else if (key == "mh_chain_length") cfg.mh.chain_length = v.get<int>();
      else if (key == "beta_max_iterations") cfg.beta_optimizer.max_iterations = v.get<int>();
      else if (key == "beta_gradient_tolerance") cfg.beta_optimizer.gradient_tolerance = v.get<double>();
      else if (key == "beta_ridge") cfg.beta_optimizer.ridge = v.get<double>();
      else if (key == "beta_objective") {
        const auto s = v.get<std::string>();
        if (s == "smoothed") cfg.beta_objective = BetaObjective::SmoothedWeights;
        else if (s == "replay") cfg.beta_objective = BetaObjective::Replay;
        else throw DataError("saem config: beta_objective must be smoothed or replay");
      } else if (key == "replay_window") cfg.replay_window = v.get<int>();
      else if (key == "encoding") cfg.encoding = parse_encoding(v.get<std::string>());
      else if (key == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (key == "prediction_samples") cfg.prediction_samples = v.get<int>();
      else if (key == "trajectory_loglik_samples") cfg.trajectory_loglik_samples = v.get<int>();
      else if (key == "keep_param_history") cfg.keep_param_history = v.get<bool>();
      else if (key == "threads") cfg.threads = v.get<unsigned>();
      else throw DataError("saem config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("saem config: ") + e.what());
  }
}

std::string saem_config_to_json(const SaemConfig& cfg) {
  json j;
  j["iterations"] = cfg.iterations;
  j["burn_in"] = cfg.burn_in;
  j["tau"] = cfg.tau;
  j["step_rule"] = cfg.step_rule == StepRule::Shifted ? "shifted" : "literal";
  j["mh_chain_length"] = cfg.mh.chain_length;
  j["beta_max_iterations"] = cfg.beta_optimizer.max_iterations;
  j["beta_gradient_tolerance"] = cfg.beta_optimizer.gradient_tolerance;
  j["beta_ridge"] = cfg.beta_optimizer.ridge;
  j["beta_objective"] = cfg.beta_objective == BetaObjective::SmoothedWeights ? "smoothed" : "replay";
  j["replay_window"] = cfg.replay_window;
  j["encoding"] = encoding_name(cfg.encoding);
  j["seed"] = cfg.seed;
  j["prediction_samples"] = cfg.prediction_samples;
  j["trajectory_loglik_samples"] = cfg.trajectory_loglik_samples;
  j["keep_param_history"] = cfg.keep_param_history;
  j["threads"] = cfg.threads;
  return j.dump(2);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << text;
  if (!out) throw DataError("failed writing '" + path + "'");
}

}  // namespace mixsaem
