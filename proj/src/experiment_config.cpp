#include <cmath>
#include <fstream>
#include <sstream>

#include "expkant/error.hpp"
#include "expkant/experiments.hpp"
#include "expkant/signals.hpp"

namespace expkant {

namespace {

void check_object(const Json& obj, const std::string& where) {
  if (!obj.is_object()) throw ValidationError(where + " must be a JSON object");
}

void check_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& where) {
  check_object(obj, where);
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ValidationError("unknown key '" + key + "' in " + where);
  }
}

double number(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_number()) throw ValidationError(where + "." + key + " must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ValidationError(where + "." + key + " must be finite");
  return x;
}

int integer(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_number_integer()) throw ValidationError(where + "." + key + " must be an integer");
  return v.get<int>();
}

std::string text(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_string()) throw ValidationError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

std::vector<double> numbers(const Json& obj, const std::string& key, const std::string& where) {
  const Json& v = obj.at(key);
  if (!v.is_array()) throw ValidationError(where + "." + key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number() || !std::isfinite(e.get<double>()))
      throw ValidationError(where + "." + key + " must contain finite numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

PhiSpec parse_phi(const Json& obj, const std::string& where) {
  check_keys(obj, {"name", "p"}, where);
  PhiSpec s;
  if (obj.contains("name")) s.name = text(obj, "name", where);
  if (obj.contains("p")) s.p = number(obj, "p", where);
  make_phi(s.name, s.p, false);  // validates
  return s;
}

KernelSpec parse_kernel(const Json& obj) {
  check_keys(obj, {"profile", "response"}, "kernel");
  KernelSpec k;
  if (obj.contains("profile")) {
    const Json& p = obj.at("profile");
    check_keys(p, {"name", "order"}, "kernel.profile");
    if (p.contains("name")) k.profile.name = text(p, "name", "kernel.profile");
    if (p.contains("order")) k.profile.order = integer(p, "order", "kernel.profile");
  }
  if (obj.contains("response")) {
    const Json& r = obj.at("response");
    check_keys(r, {"name", "alpha", "r"}, "kernel.response");
    if (r.contains("name")) k.response.name = text(r, "name", "kernel.response");
    if (r.contains("alpha")) k.response.alpha = number(r, "alpha", "kernel.response");
    if (r.contains("r")) k.response.r = number(r, "r", "kernel.response");
  }
  return k;
}

SchemeSpec parse_scheme(const Json& obj) {
  check_keys(obj, {"kind", "step", "offset", "nodes"}, "scheme");
  SchemeSpec s;
  if (obj.contains("kind")) s.kind = text(obj, "kind", "scheme");
  if (s.kind == "uniform") {
    if (obj.contains("nodes")) throw ValidationError("scheme.nodes needs kind 'tabulated'");
    if (obj.contains("step")) s.step = number(obj, "step", "scheme");
    if (obj.contains("offset")) s.offset = number(obj, "offset", "scheme");
  } else if (s.kind == "tabulated") {
    if (obj.contains("step") || obj.contains("offset"))
      throw ValidationError("scheme.step/offset need kind 'uniform'");
    if (!obj.contains("nodes")) throw ValidationError("tabulated scheme needs nodes");
    s.nodes = numbers(obj, "nodes", "scheme");
  } else {
    throw ValidationError("unknown scheme kind '" + s.kind + "'");
  }
  return s;
}

SignalSpec parse_signal(const Json& obj) {
  check_object(obj, "signal");
  if (!obj.contains("name")) throw ValidationError("signal needs a name");
  SignalSpec s;
  s.name = text(obj, "name", "signal");
  for (const auto& [key, value] : obj.items()) {
    if (key == "name") continue;
    s.params[key] = number(obj, key, "signal");
  }
  build_signal(s);  // validates name and parameters
  return s;
}

QuadratureSpec parse_quadrature(const Json& obj) {
  check_keys(obj, {"rule", "nodes", "tolerance", "max_nodes", "use_antiderivative"}, "quadrature");
  QuadratureSpec q;
  if (obj.contains("rule")) {
    const std::string r = text(obj, "rule", "quadrature");
    if (r == "gauss_legendre") q.rule = QuadratureSpec::Rule::gauss_legendre;
    else if (r == "midpoint") q.rule = QuadratureSpec::Rule::midpoint;
    else throw ValidationError("unknown quadrature rule '" + r + "'");
  }
  if (obj.contains("nodes")) q.nodes = integer(obj, "nodes", "quadrature");
  if (obj.contains("tolerance")) q.tolerance = number(obj, "tolerance", "quadrature");
  if (obj.contains("max_nodes")) q.max_nodes = integer(obj, "max_nodes", "quadrature");
  if (obj.contains("use_antiderivative")) {
    if (!obj.at("use_antiderivative").is_boolean())
      throw ValidationError("quadrature.use_antiderivative must be a boolean");
    q.use_antiderivative = obj.at("use_antiderivative").get<bool>();
  }
  if (q.nodes < 1 || q.max_nodes < q.nodes || !(q.tolerance > 0.0))
    throw ValidationError("quadrature needs 1 <= nodes <= max_nodes and tolerance > 0");
  return q;
}

TruncationPolicy parse_truncation(const Json& obj) {
  check_keys(obj, {"mode", "gamma", "epsilon", "beta", "max_terms"}, "truncation");
  TruncationPolicy t;
  if (obj.contains("mode")) {
    const std::string m = text(obj, "mode", "truncation");
    if (m == "automatic") t.mode = TruncationPolicy::Mode::automatic;
    else if (m == "window") t.mode = TruncationPolicy::Mode::window;
    else if (m == "tolerance") t.mode = TruncationPolicy::Mode::tolerance;
    else throw ValidationError("unknown truncation mode '" + m + "'");
  }
  if (obj.contains("gamma")) t.gamma = number(obj, "gamma", "truncation");
  if (obj.contains("epsilon")) t.epsilon = number(obj, "epsilon", "truncation");
  if (obj.contains("beta")) t.beta = number(obj, "beta", "truncation");
  if (obj.contains("max_terms")) {
    if (!obj.at("max_terms").is_number_integer())
      throw ValidationError("truncation.max_terms must be an integer");
    t.max_terms = obj.at("max_terms").get<Index>();
  }
  if (t.mode == TruncationPolicy::Mode::window && !(t.gamma > 0.0))
    throw ValidationError("window truncation needs gamma > 0");
  if (!(t.epsilon > 0.0) || t.beta < 0.0 || t.max_terms < 1)
    throw ValidationError("truncation needs epsilon > 0, beta >= 0, max_terms >= 1");
  return t;
}

void validate_w_list(const std::vector<double>& ws) {
  if (ws.size() < 4) throw ValidationError("w_list needs at least 4 values");
  for (std::size_t i = 0; i < ws.size(); ++i) {
    if (!(ws[i] > 0.0)) throw ValidationError("w_list values must be positive");
    if (i && !(ws[i] > ws[i - 1])) throw ValidationError("w_list must be strictly increasing");
  }
}

}  // namespace

ExperimentConfig parse_config(const Json& doc) {
  static const std::set<std::string> allowed{
      "experiment", "kernel", "scheme", "signal", "w_list", "grid", "points", "x", "r",
      "beta", "j", "gamma", "lambda", "lambda0", "lambda_sweep", "seed", "pairs", "betas",
      "phi", "eta", "quadrature", "truncation", "output"};
  check_keys(doc, allowed, "config");
  ExperimentConfig c;
  c.source = doc;
  if (!doc.contains("experiment")) throw ValidationError("config needs 'experiment'");
  c.experiment = text(doc, "experiment", "config");
  if (!experiment_names().count(c.experiment))
    throw ValidationError("unknown experiment '" + c.experiment + "'");

  if (doc.contains("kernel")) c.kernel = parse_kernel(doc.at("kernel"));
  if (doc.contains("scheme")) c.scheme = parse_scheme(doc.at("scheme"));
  build_kernel(c.kernel);
  build_scheme(c.scheme);
  if (doc.contains("signal")) c.signal = parse_signal(doc.at("signal"));
  if (doc.contains("w_list")) c.w_list = numbers(doc, "w_list", "config");
  if (doc.contains("grid")) {
    const Json& g = doc.at("grid");
    check_keys(g, {"log_min", "log_max", "points"}, "grid");
    GridSpec s;
    if (!g.contains("log_min") || !g.contains("log_max"))
      throw ValidationError("grid needs log_min and log_max");
    s.log_min = number(g, "log_min", "grid");
    s.log_max = number(g, "log_max", "grid");
    if (g.contains("points")) s.points = integer(g, "points", "grid");
    if (!(s.log_max > s.log_min) || s.points < 2)
      throw ValidationError("grid needs log_max > log_min and >= 2 points");
    c.grid = s;
  }
  if (doc.contains("points")) c.points = integer(doc, "points", "config");
  if (doc.contains("x")) c.x = number(doc, "x", "config");
  if (doc.contains("r")) c.r = number(doc, "r", "config");
  if (doc.contains("beta")) c.beta = number(doc, "beta", "config");
  if (doc.contains("j")) c.j = integer(doc, "j", "config");
  if (doc.contains("gamma")) c.gamma = number(doc, "gamma", "config");
  if (doc.contains("lambda")) c.lambda = number(doc, "lambda", "config");
  if (doc.contains("lambda0")) c.lambda0 = number(doc, "lambda0", "config");
  if (doc.contains("lambda_sweep")) {
    if (!doc.at("lambda_sweep").is_boolean()) throw ValidationError("lambda_sweep must be a boolean");
    c.lambda_sweep = doc.at("lambda_sweep").get<bool>();
  }
  if (doc.contains("seed")) {
    const Json& s = doc.at("seed");
    if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<std::int64_t>() < 0))
      throw ValidationError("seed must be a non-negative integer");
    c.seed = doc.at("seed").get<std::uint64_t>();
  }
  if (doc.contains("pairs")) c.pairs = integer(doc, "pairs", "config");
  if (doc.contains("betas")) c.betas = numbers(doc, "betas", "config");
  if (doc.contains("phi")) c.phi = parse_phi(doc.at("phi"), "phi");
  if (doc.contains("eta")) c.eta = parse_phi(doc.at("eta"), "eta");
  if (doc.contains("quadrature")) c.quadrature = parse_quadrature(doc.at("quadrature"));
  if (doc.contains("truncation")) c.truncation = parse_truncation(doc.at("truncation"));
  if (doc.contains("output")) {
    const Json& o = doc.at("output");
    check_keys(o, {"dir", "stem"}, "output");
    if (o.contains("dir")) c.output.dir = text(o, "dir", "output");
    if (o.contains("stem")) c.output.stem = text(o, "stem", "output");
  }
  if (c.output.stem.empty()) c.output.stem = c.experiment;

  if (c.points < 16) throw ValidationError("points must be >= 16");
  if (c.j < 1) throw ValidationError("j must be >= 1");
  if (c.pairs < 1) throw ValidationError("pairs must be >= 1");
  if (!(c.lambda0 > 0.0)) throw ValidationError("lambda0 must be > 0");
  if (c.lambda && !(*c.lambda > 0.0)) throw ValidationError("lambda must be > 0");
  for (double b : c.betas)
    if (b < 0.0) throw ValidationError("betas must be >= 0");

  if (c.experiment != "moments") validate_w_list(c.w_list);
  const bool needs_signal = c.experiment != "moments" && c.experiment != "audit_kernel" &&
                            c.experiment != "modular_inequality";
  if (needs_signal && !c.signal) throw ValidationError(c.experiment + " needs a signal");
  if (c.experiment == "voronovskaja" && !c.x) throw ValidationError("voronovskaja needs x");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path.string());
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ValidationError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

NonlinearKernel build_kernel(const KernelSpec& spec) {
  return NonlinearKernel{make_builtin_profile(spec.profile.name, spec.profile.order),
                         make_response(spec.response.name, spec.response.alpha, spec.response.r)};
}

SamplingScheme build_scheme(const SchemeSpec& spec) {
  if (spec.kind == "uniform") return SamplingScheme::uniform(spec.step, spec.offset);
  if (spec.kind == "tabulated") return SamplingScheme::tabulated(spec.nodes);
  throw ValidationError("unknown scheme kind '" + spec.kind + "'");
}

SchemeSpec parse_scheme_string(const std::string& text) {
  const auto colon = text.find(':');
  SchemeSpec s;
  s.kind = text.substr(0, colon);
  std::vector<double> values;
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    const char sep = s.kind == "uniform" ? ':' : ',';
    std::stringstream ss(rest);
    std::string item;
    while (std::getline(ss, item, sep)) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(item, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != item.size() || item.empty())
        throw ValidationError("bad number '" + item + "' in scheme '" + text + "'");
      values.push_back(v);
    }
  }
  if (s.kind == "uniform") {
    if (values.size() > 2) throw ValidationError("uniform scheme takes STEP[:OFFSET]");
    if (!values.empty()) s.step = values[0];
    if (values.size() == 2) s.offset = values[1];
  } else if (s.kind == "tabulated") {
    s.nodes = values;
  } else {
    throw ValidationError("unknown scheme kind '" + s.kind + "'");
  }
  build_scheme(s);
  return s;
}

Signal build_signal(const SignalSpec& spec) { return make_builtin_signal(spec.name, spec.params); }

}  // namespace expkant
