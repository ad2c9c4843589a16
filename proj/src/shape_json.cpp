#include "biphoton/shape_json.hpp"

#include <string>

#include "biphoton/errors.hpp"

namespace biphoton {
namespace {

using nlohmann::json;

double number(const json& j, const char* key) {
  if (!j.contains(key)) throw InvalidArgument(std::string("shape spec: missing field '") + key + "'");
  const json& v = j.at(key);
  if (!v.is_number()) throw InvalidArgument(std::string("shape spec: field '") + key + "' must be a number");
  return v.get<double>();
}

double number_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

}  // namespace

json grid_to_json(const TimeGrid& grid) {
  return json{{"t_min", grid.t_min()}, {"t_max", grid.t_max()}, {"n_points", grid.size()}};
}

TimeGrid grid_from_json(const json& j) {
  if (!j.is_object()) throw InvalidArgument("grid spec must be an object");
  const double n = number(j, "n_points");
  if (n < 2 || n != static_cast<double>(static_cast<std::size_t>(n)))
    throw InvalidArgument("grid spec: n_points must be an integer >= 2");
  return TimeGrid(number(j, "t_min"), number(j, "t_max"), static_cast<std::size_t>(n));
}

json shape_to_json(const TemporalShape& shape) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, ExpDecay>) {
          return {{"kind", "exp_decay"}, {"gamma", p.gamma}, {"detuning", p.detuning}, {"start", p.start}};
        } else if constexpr (std::is_same_v<T, ExpDecaySine>) {
          return {{"kind", "exp_decay_sine"}, {"gamma", p.gamma}, {"omega", p.omega}, {"start", p.start}};
        } else if constexpr (std::is_same_v<T, Gaussian>) {
          return {{"kind", "gaussian"}, {"width", p.width}, {"delay", p.delay}};
        } else {
          json values = json::array();
          for (const cplx& v : p.values) values.push_back({v.real(), v.imag()});
          return {{"kind", "sampled"}, {"grid", grid_to_json(p.grid)}, {"values", std::move(values)}};
        }
      },
      shape.params());
}

TemporalShape shape_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw InvalidArgument("shape spec must be an object with a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "exp_decay")
    return TemporalShape::exp_decay(number(j, "gamma"), number_or(j, "detuning", 0.0), number_or(j, "start", 0.0));
  if (kind == "exp_decay_sine")
    return TemporalShape::exp_decay_sine(number(j, "gamma"), number(j, "omega"), number_or(j, "start", 0.0));
  if (kind == "gaussian") return TemporalShape::gaussian(number(j, "width"), number_or(j, "delay", 0.0));
  if (kind == "sampled") {
    if (!j.contains("grid") || !j.contains("values") || !j.at("values").is_array())
      throw InvalidArgument("sampled shape spec needs 'grid' and 'values'");
    TimeGrid grid = grid_from_json(j.at("grid"));
    std::vector<cplx> values;
    values.reserve(j.at("values").size());
    for (const json& v : j.at("values")) {
      if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
        throw InvalidArgument("sampled shape values must be [re, im] pairs");
      values.emplace_back(v[0].get<double>(), v[1].get<double>());
    }
    return TemporalShape::from_samples(grid, std::move(values));
  }
  throw InvalidArgument("unknown shape kind '" + kind + "'");
}

}  // namespace biphoton
