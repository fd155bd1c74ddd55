#include "expkant/report_io.hpp"

#include <cmath>
#include <fstream>
#include <locale>
#include <sstream>

#include "expkant/error.hpp"

namespace expkant {

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << x;
  return os.str();
}

Json optional_number(const std::optional<double>& x) {
  return x ? json_number(*x) : Json(nullptr);
}

}  // namespace

Json json_number(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

Json json_numbers(const std::vector<double>& xs) {
  Json a = Json::array();
  for (double x : xs) a.push_back(json_number(x));
  return a;
}

Json to_json(const RateFit& fit) {
  Json j;
  j["exact"] = fit.exact;
  j["points_used"] = fit.points_used;
  if (!fit.exact) {
    j["slope"] = json_number(fit.slope);
    j["intercept"] = json_number(fit.intercept);
    j["r_squared"] = json_number(fit.r_squared);
  }
  return j;
}

Json to_json(const MomentReport& m) {
  return {{"beta", json_number(m.beta)},
          {"value", json_number(m.value)},
          {"upper", json_number(m.upper)},
          {"at_phase", json_number(m.at_phase)},
          {"probe_grid", m.probe_grid},
          {"diverged", m.diverged},
          {"window_values", json_numbers(m.window_values)}};
}

Json to_json(const ConditionReport& c) {
  Json j{{"condition", c.condition},
         {"w_values", json_numbers(c.w_values)},
         {"sup_values", json_numbers(c.sup_values)},
         {"fit", to_json(c.fit)},
         {"passed", c.passed},
         {"diverged", c.diverged},
         {"declared_rate", optional_number(c.declared_rate)},
         {"detail", c.detail}};
  if (c.gamma0) j["gamma0"] = json_number(*c.gamma0);
  if (c.m3) j["m3"] = json_number(*c.m3);
  return j;
}

Json to_json(const HolderFit& h) {
  Json j{{"order", json_number(h.order)}, {"zero_modulus", h.zero_modulus}};
  if (!h.zero_modulus) {
    j["raw_slope"] = json_number(h.raw_slope);
    j["fit"] = to_json(h.fit);
  }
  return j;
}

Json to_json(const VoronovskajaReport& v) {
  return {{"x", json_number(v.x)},
          {"r", json_number(v.r)},
          {"w_values", json_numbers(v.w_values)},
          {"lhs_values", json_numbers(v.lhs_values)},
          {"theta_f", json_number(v.theta_f)},
          {"m0", json_number(v.m0)},
          {"mr", json_number(v.mr)},
          {"upper_gap", json_number(v.upper_gap)},
          {"slope_scale", json_number(v.slope_scale)},
          {"rhs_bound", json_number(v.rhs_bound)},
          {"tail_max", json_number(v.tail_max)},
          {"passed", v.passed},
          {"moment_r", to_json(v.moment_r)},
          {"L3", to_json(v.l3)}};
}

std::string format_csv(const Table& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw ValidationError("CSV row width does not match the header");
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
  return os.str();
}

void write_csv(const std::filesystem::path& path, const Table& table) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << format_csv(table);
}

void write_json(const std::filesystem::path& path, const Json& doc) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << doc.dump(2) << '\n';
}

}  // namespace expkant
