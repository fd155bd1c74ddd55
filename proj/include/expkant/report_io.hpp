#pragma once

// JSON and CSV serialization of reports.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "expkant/mellin.hpp"
#include "expkant/moments.hpp"
#include "expkant/moduli.hpp"
#include "expkant/rate_fit.hpp"

namespace expkant {

using Json = nlohmann::json;

// Non-finite values become the strings "inf", "-inf" and "nan".
Json json_number(double x);
Json json_numbers(const std::vector<double>& xs);

Json to_json(const RateFit& fit);
Json to_json(const MomentReport& m);
Json to_json(const ConditionReport& c);
Json to_json(const HolderFit& h);
Json to_json(const VoronovskajaReport& v);

struct Table {
  std::string name;  // file suffix; empty for the main table
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

// Header row, '.' decimal point, 17 significant digits.
std::string format_csv(const Table& table);
void write_csv(const std::filesystem::path& path, const Table& table);
void write_json(const std::filesystem::path& path, const Json& doc);

}  // namespace expkant
