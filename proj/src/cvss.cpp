#include "cvsstext/cvss.hpp"

#include <algorithm>
#include <cmath>

namespace cvsstext::cvss {

namespace {

constexpr std::array<std::string_view, 8> kNames = {"AV", "AC", "PR", "UI",
                                                    "S",  "C",  "I",  "A"};
constexpr std::array<std::string_view, 8> kValues = {"NALP", "LH",  "NLH", "NR",
                                                     "UC",   "NLH", "NLH", "NLH"};

// Keys of the temporal and environmental groups; recognized only to give a
// precise error message.
constexpr std::array<std::string_view, 14> kNonBaseKeys = {
    "E",  "RL", "RC", "CR", "IR", "AR", "MAV",
    "MAC", "MPR", "MUI", "MS", "MC", "MI", "MA"};

constexpr std::size_t idx(Component c) { return static_cast<std::size_t>(c); }

}  // namespace

std::string_view component_name(Component c) noexcept { return kNames[idx(c)]; }

std::optional<Component> component_from_name(std::string_view name) noexcept {
  for (std::size_t k = 0; k < kNames.size(); ++k) {
    if (kNames[k] == name) return static_cast<Component>(k);
  }
  return std::nullopt;
}

std::string_view component_values(Component c) noexcept { return kValues[idx(c)]; }

std::string_view severity_name(Severity s) noexcept {
  switch (s) {
    case Severity::None: return "None";
    case Severity::Low: return "Low";
    case Severity::Medium: return "Medium";
    case Severity::High: return "High";
    case Severity::Critical: return "Critical";
  }
  return "None";
}

std::size_t CvssVector::index(Component comp) const noexcept {
  switch (comp) {
    case Component::AV: return static_cast<std::size_t>(av);
    case Component::AC: return static_cast<std::size_t>(ac);
    case Component::PR: return static_cast<std::size_t>(pr);
    case Component::UI: return static_cast<std::size_t>(ui);
    case Component::S: return static_cast<std::size_t>(s);
    case Component::C: return static_cast<std::size_t>(c);
    case Component::I: return static_cast<std::size_t>(i);
    case Component::A: return static_cast<std::size_t>(a);
  }
  return 0;
}

void CvssVector::set_index(Component comp, std::size_t value) {
  if (value >= component_cardinality(comp)) {
    throw std::out_of_range("value index out of range for " +
                            std::string(component_name(comp)));
  }
  const auto u = static_cast<std::uint8_t>(value);
  switch (comp) {
    case Component::AV: av = static_cast<AttackVector>(u); break;
    case Component::AC: ac = static_cast<AttackComplexity>(u); break;
    case Component::PR: pr = static_cast<PrivilegesRequired>(u); break;
    case Component::UI: ui = static_cast<UserInteraction>(u); break;
    case Component::S: s = static_cast<Scope>(u); break;
    case Component::C: c = static_cast<Impact>(u); break;
    case Component::I: i = static_cast<Impact>(u); break;
    case Component::A: a = static_cast<Impact>(u); break;
  }
}

void CvssVector::set_letter(Component comp, char value) {
  const auto pos = component_values(comp).find(value);
  if (pos == std::string_view::npos) {
    throw VectorError(VectorErrc::UnknownValue,
                      "unknown value '" + std::string(1, value) + "' for " +
                          std::string(component_name(comp)),
                      comp, std::string(1, value));
  }
  set_index(comp, pos);
}

std::string_view to_string(VectorErrc e) noexcept {
  switch (e) {
    case VectorErrc::MissingComponent: return "MissingComponent";
    case VectorErrc::UnknownValue: return "UnknownValue";
    case VectorErrc::DuplicateComponent: return "DuplicateComponent";
    case VectorErrc::MalformedSyntax: return "MalformedSyntax";
  }
  return "MalformedSyntax";
}

VectorError::VectorError(VectorErrc code, std::string message,
                         std::optional<Component> component, std::string value)
    : std::runtime_error(std::move(message)),
      code_(code),
      component_(component),
      value_(std::move(value)) {}

CvssVector parse_vector(std::string_view text) {
  auto malformed = [&](const std::string& why) {
    return VectorError(VectorErrc::MalformedSyntax,
                       "malformed vector '" + std::string(text) + "': " + why);
  };

  std::string_view body = text;
  if (body.starts_with("CVSS:")) {
    if (body.starts_with("CVSS:3.1/") || body.starts_with("CVSS:3.0/")) {
      body.remove_prefix(9);
    } else {
      throw malformed("unsupported version prefix");
    }
  }
  if (body.empty()) throw malformed("empty vector");

  CvssVector out;
  std::array<bool, 8> seen{};
  int last = -1;
  while (true) {
    const auto slash = body.find('/');
    const std::string_view token = body.substr(0, slash);
    const auto colon = token.find(':');
    if (token.empty() || colon == std::string_view::npos || colon == 0 ||
        token.find(':', colon + 1) != std::string_view::npos) {
      throw malformed("bad token '" + std::string(token) + "'");
    }
    const std::string_view key = token.substr(0, colon);
    const std::string_view value = token.substr(colon + 1);

    const auto comp = component_from_name(key);
    if (!comp) {
      if (std::find(kNonBaseKeys.begin(), kNonBaseKeys.end(), key) !=
          kNonBaseKeys.end()) {
        throw malformed("non-base metric '" + std::string(key) + "' not supported");
      }
      throw malformed("unknown metric '" + std::string(key) + "'");
    }
    const auto k = static_cast<int>(*comp);
    if (seen[idx(*comp)]) {
      throw VectorError(VectorErrc::DuplicateComponent,
                        "duplicate component " + std::string(key), *comp);
    }
    if (k < last) throw malformed("component " + std::string(key) + " out of order");
    if (value.size() != 1 || component_values(*comp).find(value[0]) ==
                                 std::string_view::npos) {
      throw VectorError(VectorErrc::UnknownValue,
                        "unknown value '" + std::string(value) + "' for " +
                            std::string(key),
                        *comp, std::string(value));
    }
    out.set_letter(*comp, value[0]);
    seen[idx(*comp)] = true;
    last = k;

    if (slash == std::string_view::npos) break;
    body.remove_prefix(slash + 1);
  }

  for (Component c : kComponents) {
    if (!seen[idx(c)]) {
      throw VectorError(VectorErrc::MissingComponent,
                        "missing component " + std::string(component_name(c)), c);
    }
  }
  return out;
}

std::string to_string(const CvssVector& v) {
  std::string out = "CVSS:3.1";
  for (Component c : kComponents) {
    out += '/';
    out += component_name(c);
    out += ':';
    out += v.letter(c);
  }
  return out;
}

namespace weights {

double attack_vector(AttackVector v) noexcept {
  switch (v) {
    case AttackVector::Network: return 0.85;
    case AttackVector::Adjacent: return 0.62;
    case AttackVector::Local: return 0.55;
    case AttackVector::Physical: return 0.2;
  }
  return 0.0;
}

double attack_complexity(AttackComplexity v) noexcept {
  return v == AttackComplexity::Low ? 0.77 : 0.44;
}

double privileges_required(PrivilegesRequired v, Scope s) noexcept {
  const bool changed = s == Scope::Changed;
  switch (v) {
    case PrivilegesRequired::None: return 0.85;
    case PrivilegesRequired::Low: return changed ? 0.68 : 0.62;
    case PrivilegesRequired::High: return changed ? 0.5 : 0.27;
  }
  return 0.0;
}

double user_interaction(UserInteraction v) noexcept {
  return v == UserInteraction::None ? 0.85 : 0.62;
}

double impact(Impact v) noexcept {
  switch (v) {
    case Impact::None: return 0.0;
    case Impact::Low: return 0.22;
    case Impact::High: return 0.56;
  }
  return 0.0;
}

}  // namespace weights

double roundup(double x) {
  if (!(x >= 0.0 && x <= 10.0)) {
    throw OutOfRange("roundup input outside [0, 10]: " + std::to_string(x));
  }
  // Integer roundup at 1e-9 resolution. The published pseudocode works at
  // 1e-5, which maps 4.000001 to 4.0; both agree on every base vector.
  const auto n = static_cast<std::int64_t>(std::llround(x * 1e9));
  if (n % 100000000 == 0) return static_cast<double>(n) / 1e9;
  return static_cast<double>(n / 100000000 + 1) / 10.0;
}

Severity severity_for(double base_score) noexcept {
  const int t = score_tenths(base_score);
  if (t == 0) return Severity::None;
  if (t < 40) return Severity::Low;
  if (t < 70) return Severity::Medium;
  if (t < 90) return Severity::High;
  return Severity::Critical;
}

ScoreBreakdown compute_base_score(const CvssVector& v) noexcept {
  using namespace weights;
  ScoreBreakdown r;
  r.iss = 1.0 - (1.0 - impact(v.c)) * (1.0 - impact(v.i)) * (1.0 - impact(v.a));
  const bool changed = v.s == Scope::Changed;
  r.impact = changed ? 7.52 * (r.iss - 0.029) - 3.25 * std::pow(r.iss - 0.02, 15)
                     : 6.42 * r.iss;
  r.exploitability = 8.22 * attack_vector(v.av) * attack_complexity(v.ac) *
                     privileges_required(v.pr, v.s) * user_interaction(v.ui);
  if (r.impact <= 0.0) {
    r.base_score = 0.0;
  } else if (changed) {
    r.base_score = roundup(std::min(1.08 * (r.impact + r.exploitability), 10.0));
  } else {
    r.base_score = roundup(std::min(r.impact + r.exploitability, 10.0));
  }
  r.severity = severity_for(r.base_score);
  return r;
}

std::vector<CvssVector> all_vectors() {
  std::vector<CvssVector> out;
  CvssVector v;
  auto recurse = [&](auto&& self, std::size_t depth) -> void {
    if (depth == kComponents.size()) {
      out.push_back(v);
      return;
    }
    const Component c = kComponents[depth];
    for (std::size_t k = 0; k < component_cardinality(c); ++k) {
      v.set_index(c, k);
      self(self, depth + 1);
    }
  };
  recurse(recurse, 0);
  return out;
}

}  // namespace cvsstext::cvss
