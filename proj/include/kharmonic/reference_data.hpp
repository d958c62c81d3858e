#pragma once

// Access to the hand-transcribed reference displays (data/reference_displays.txt),
// which are compiled into the library.

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "kharmonic/diffpoly.hpp"

namespace kharmonic {

struct ReferenceSection {
  std::string name;
  std::string kind;  // field | system | conditions
  int dim = 0;
  int k = 0;
  /// e1..e_dim or eq1..eq_dim, in order.
  std::vector<DiffPoly> components;
  /// Every key = value pair as written (trailing comments stripped).
  std::map<std::string, std::string> attributes;
};

/// Parses the reference file format. Throws ParseError with the line number on malformed input.
std::map<std::string, ReferenceSection> parse_reference_data(std::string_view text);

/// The embedded transcriptions, parsed once.
const std::map<std::string, ReferenceSection>& reference_data();
const ReferenceSection& reference_section(const std::string& name);
std::string_view reference_text();

}  // namespace kharmonic
