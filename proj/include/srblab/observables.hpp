#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "srblab/section_map.hpp"
#include "srblab/suspension.hpp"

namespace srb {

/// One test function in two guises: the ambient version on R^3 (flow level)
/// and its restriction to the section plane z = 1 (section level).
struct DictionaryEntry {
  std::string name;
  SectionObservable section;
  AmbientObservable ambient;
};

/// {1, x, y, z, sin(pi x), cos(pi x), x^2, x*y, exp(-z)}.
const std::vector<DictionaryEntry>& standard_dictionary();

/// Throws ConfigError for unknown names.
const DictionaryEntry& dictionary_entry(std::string_view name);

std::vector<DictionaryEntry> select_dictionary(const std::vector<std::string>& names);

}  // namespace srb
