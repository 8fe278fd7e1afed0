// Copyright 2026 The sketchsaddle Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sketchsaddle/serialize.hpp"

#include <stdexcept>

#include <json.hpp>

namespace sketchsaddle {

namespace {

using nlohmann::json;

template <typename T>
void put(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
void get(const json& j, const char* key, std::optional<T>& v) {
  if (j.contains(key)) v = j.at(key).get<T>();
}

}  // namespace

std::string to_json(const SolveReport& report, int indent) {
  json j = {
      {"residuals",
       {{"w_inf", report.final_residuals.w_inf},
        {"lambda_inf", report.final_residuals.lambda_inf},
        {"exact_w_inf", report.pair.kkt_w_inf},
        {"exact_lambda_inf", report.pair.kkt_l_inf}}},
      {"iterations", report.pair.iterations},
      {"converged", report.converged},
      {"wall_time_ms", report.wall_time_ms},
      {"operator_norm_estimate", report.operator_norm_estimate},
  };
  return j.dump(indent);
}

std::string to_json(const RegPrescription& p, int indent) {
  const PrescriptionInputs& in = p.inputs_used;
  json inputs = {{"c", in.c}, {"delta", in.delta}, {"m", in.m}};
  put(inputs, "n", in.n);
  put(inputs, "d", in.d);
  put(inputs, "s_w", in.s_w);
  put(inputs, "s_lambda", in.s_lambda);
  put(inputs, "alpha", in.alpha);
  put(inputs, "beta", in.beta);
  put(inputs, "norm_ATw", in.norm_ATw);
  put(inputs, "norm_Al", in.norm_Al);
  put(inputs, "norm_w", in.norm_w);
  put(inputs, "norm_l", in.norm_l);
  put(inputs, "varsigma", in.varsigma);
  put(inputs, "tau", in.tau);
  put(inputs, "mu", in.mu);
  put(inputs, "zeta", in.zeta);
  json j = {
      {"rule", std::string(to_string(p.rule))},
      {"gamma_w", p.gamma_w},
      {"gamma_lambda", p.gamma_lambda},
      {"scale_factor", p.scale_factor},
      {"inputs_used", inputs},
  };
  return j.dump(indent);
}

RegPrescription prescription_from_json(const std::string& text) {
  RegPrescription p;
  try {
    const json j = json::parse(text);
    p.rule = parse_prescription(j.at("rule").get<std::string>());
    p.scale_factor = j.at("scale_factor").get<double>();
    const json& in = j.at("inputs_used");
    PrescriptionInputs& out = p.inputs_used;
    out.c = in.at("c").get<double>();
    out.delta = in.at("delta").get<double>();
    out.m = in.at("m").get<Index>();
    get(in, "n", out.n);
    get(in, "d", out.d);
    get(in, "s_w", out.s_w);
    get(in, "s_lambda", out.s_lambda);
    get(in, "alpha", out.alpha);
    get(in, "beta", out.beta);
    get(in, "norm_ATw", out.norm_ATw);
    get(in, "norm_Al", out.norm_Al);
    get(in, "norm_w", out.norm_w);
    get(in, "norm_l", out.norm_l);
    get(in, "varsigma", out.varsigma);
    get(in, "tau", out.tau);
    get(in, "mu", out.mu);
    get(in, "zeta", out.zeta);
    std::tie(p.gamma_w, p.gamma_lambda) = evaluate_prescription(p.rule, out, p.scale_factor);
    if (p.gamma_w != j.at("gamma_w").get<double>() || p.gamma_lambda != j.at("gamma_lambda").get<double>()) {
      throw std::invalid_argument("prescription JSON: stored gammas disagree with their inputs");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("prescription JSON: ") + e.what());
  }
  return p;
}

}  // namespace sketchsaddle
