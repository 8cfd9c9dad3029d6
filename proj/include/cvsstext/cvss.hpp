#pragma once

// CVSS v3.1 base vectors: grammar, canonical form and base-score arithmetic.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace cvsstext::cvss {

/// The eight base metrics, in canonical vector order.
enum class Component : std::uint8_t { AV, AC, PR, UI, S, C, I, A };

inline constexpr std::array<Component, 8> kComponents = {
    Component::AV, Component::AC, Component::PR, Component::UI,
    Component::S,  Component::C,  Component::I,  Component::A};

enum class AttackVector : std::uint8_t { Network, Adjacent, Local, Physical };
enum class AttackComplexity : std::uint8_t { Low, High };
enum class PrivilegesRequired : std::uint8_t { None, Low, High };
enum class UserInteraction : std::uint8_t { None, Required };
enum class Scope : std::uint8_t { Unchanged, Changed };
enum class Impact : std::uint8_t { None, Low, High };

enum class Severity : std::uint8_t { None, Low, Medium, High, Critical };

/// Metric abbreviation as it appears in a vector string ("AV", "PR", ...).
std::string_view component_name(Component c) noexcept;
std::optional<Component> component_from_name(std::string_view name) noexcept;

/// Value letters of a component in declaration order; this order is also the
/// tie-break order used by classifiers (e.g. AV: N A L P).
std::string_view component_values(Component c) noexcept;
inline std::size_t component_cardinality(Component c) noexcept {
  return component_values(c).size();
}

std::string_view severity_name(Severity s) noexcept;

/// One fully-specified CVSS v3.x base vector. Every field always holds a value.
struct CvssVector {
  AttackVector av = AttackVector::Network;
  AttackComplexity ac = AttackComplexity::Low;
  PrivilegesRequired pr = PrivilegesRequired::None;
  UserInteraction ui = UserInteraction::None;
  Scope s = Scope::Unchanged;
  Impact c = Impact::None;
  Impact i = Impact::None;
  Impact a = Impact::None;

  /// Index of the component's value within component_values().
  std::size_t index(Component comp) const noexcept;
  char letter(Component comp) const noexcept {
    return component_values(comp)[index(comp)];
  }
  /// Throws std::out_of_range when idx exceeds the component's cardinality.
  void set_index(Component comp, std::size_t idx);
  /// Throws VectorError(UnknownValue) for letters outside the enumeration.
  void set_letter(Component comp, char value);

  friend bool operator==(const CvssVector&, const CvssVector&) = default;
};

enum class VectorErrc {
  MissingComponent,
  UnknownValue,
  DuplicateComponent,
  MalformedSyntax,
};

std::string_view to_string(VectorErrc e) noexcept;

class VectorError : public std::runtime_error {
 public:
  VectorError(VectorErrc code, std::string message,
              std::optional<Component> component = std::nullopt,
              std::string value = {});

  VectorErrc code() const noexcept { return code_; }
  std::optional<Component> component() const noexcept { return component_; }
  const std::string& value() const noexcept { return value_; }

 private:
  VectorErrc code_;
  std::optional<Component> component_;
  std::string value_;
};

/// Accepts `[CVSS:3.0/|CVSS:3.1/]AV:x/AC:x/PR:x/UI:x/S:x/C:x/I:x/A:x`.
/// Components must be in canonical order; temporal and environmental metrics
/// are rejected as MalformedSyntax.
CvssVector parse_vector(std::string_view text);

/// Canonical form, always with the "CVSS:3.1/" prefix.
std::string to_string(const CvssVector& v);

struct ScoreBreakdown {
  double iss = 0.0;
  double impact = 0.0;
  double exploitability = 0.0;
  double base_score = 0.0;
  Severity severity = Severity::None;
};

class OutOfRange : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Smallest one-decimal value >= x, computed in integer arithmetic so that
/// binary error such as 4.000000000000001 does not round up to 4.1.
/// Throws OutOfRange outside [0, 10].
double roundup(double x);

/// Base score with all intermediates. Intermediates are never rounded.
ScoreBreakdown compute_base_score(const CvssVector& v) noexcept;

Severity severity_for(double base_score) noexcept;

/// Weight tables (read-only).
namespace weights {
double attack_vector(AttackVector v) noexcept;
double attack_complexity(AttackComplexity v) noexcept;
double privileges_required(PrivilegesRequired v, Scope s) noexcept;
double user_interaction(UserInteraction v) noexcept;
double impact(Impact v) noexcept;
}  // namespace weights

/// All base vectors in lexicographic order of component value indices.
std::vector<CvssVector> all_vectors();

/// Base score converted to an integer count of tenths (9.8 -> 98).
inline int score_tenths(double base_score) noexcept {
  return static_cast<int>(base_score * 10.0 + 0.5);
}

}  // namespace cvsstext::cvss
