#include "srblab/observables.hpp"

#include <cmath>
#include <numbers>

#include "srblab/errors.hpp"

namespace srb {

namespace {

using ode::State3;

DictionaryEntry make(std::string name, std::function<double(const State3&)> fn, double sup_norm,
                     double lip_y_ambient, double lip_y_section) {
  DictionaryEntry e;
  e.name = name;
  e.ambient = {name, fn, sup_norm, lip_y_ambient};
  e.section = {name, [fn](double x, double y) { return fn({x, y, 1.0}); }, lip_y_section};
  return e;
}

std::vector<DictionaryEntry> build() {
  constexpr double pi = std::numbers::pi;
  // sup norms and |d/dy| bounds over [-1,1] x [-1/2,1/2] x [0,1]; the
  // section versions only see |x| <= 1/2.
  return {
      make("1", [](const State3&) { return 1.0; }, 1.0, 0.0, 0.0),
      make("x", [](const State3& p) { return p.x; }, 1.0, 0.0, 0.0),
      make("y", [](const State3& p) { return p.y; }, 0.5, 1.0, 1.0),
      make("z", [](const State3& p) { return p.z; }, 1.0, 0.0, 0.0),
      make("sin(pi x)", [](const State3& p) { return std::sin(pi * p.x); }, 1.0, 0.0, 0.0),
      make("cos(pi x)", [](const State3& p) { return std::cos(pi * p.x); }, 1.0, 0.0, 0.0),
      make("x^2", [](const State3& p) { return p.x * p.x; }, 1.0, 0.0, 0.0),
      make("x*y", [](const State3& p) { return p.x * p.y; }, 0.5, 1.0, 0.5),
      make("exp(-z)", [](const State3& p) { return std::exp(-p.z); }, 1.0, 0.0, 0.0),
  };
}

}  // namespace

const std::vector<DictionaryEntry>& standard_dictionary() {
  static const std::vector<DictionaryEntry> dict = build();
  return dict;
}

const DictionaryEntry& dictionary_entry(std::string_view name) {
  for (const auto& e : standard_dictionary())
    if (e.name == name) return e;
  throw ConfigError("unknown observable '" + std::string(name) + "'");
}

std::vector<DictionaryEntry> select_dictionary(const std::vector<std::string>& names) {
  std::vector<DictionaryEntry> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(dictionary_entry(n));
  return out;
}

}  // namespace srb
