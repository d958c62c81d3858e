#include "kharmonic/reference_data.hpp"

#include <sstream>

namespace kharmonic {

namespace detail {
extern const std::string_view kReferenceText;
}

namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

void finish(ReferenceSection& sec, std::map<std::string, ReferenceSection>& out, int line) {
  if (sec.name.empty()) return;
  if (sec.kind != "conditions") {
    const auto& a = sec.attributes;
    if (!a.count("dim")) throw ParseError("section [" + sec.name + "] lacks dim (line " + std::to_string(line) + ")");
    sec.dim = std::stoi(a.at("dim"));
    if (a.count("k")) sec.k = std::stoi(a.at("k"));
    const std::string prefix = sec.kind == "field" ? "e" : "eq";
    for (int i = 1; i <= sec.dim; ++i) {
      const std::string key = prefix + std::to_string(i);
      if (!a.count(key)) throw ParseError("section [" + sec.name + "] lacks " + key);
      sec.components.push_back(parse_diffpoly(a.at(key)));
    }
  }
  if (!out.emplace(sec.name, sec).second) throw ParseError("duplicate section [" + sec.name + "]");
}

}  // namespace

std::map<std::string, ReferenceSection> parse_reference_data(std::string_view text) {
  std::map<std::string, ReferenceSection> out;
  ReferenceSection current;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError("malformed section header at line " + std::to_string(line));
      finish(current, out, line);
      current = ReferenceSection{};
      current.name = s.substr(1, s.size() - 2);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos || current.name.empty()) {
      throw ParseError("expected key = value inside a section at line " + std::to_string(line));
    }
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key == "kind") current.kind = value;
    current.attributes[key] = value;
  }
  finish(current, out, line);
  return out;
}

std::string_view reference_text() { return detail::kReferenceText; }

const std::map<std::string, ReferenceSection>& reference_data() {
  static const std::map<std::string, ReferenceSection> data = parse_reference_data(detail::kReferenceText);
  return data;
}

const ReferenceSection& reference_section(const std::string& name) {
  const auto& data = reference_data();
  auto it = data.find(name);
  if (it == data.end()) throw std::invalid_argument("no reference section named " + name);
  return it->second;
}

}  // namespace kharmonic
