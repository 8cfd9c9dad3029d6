#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cvsstext {

class InvalidUrl : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Minimal absolute-URL view: enough for host extraction, robots matching and
/// rewrite rules. Not a general RFC 3986 implementation.
struct Url {
  std::string scheme;  // lowercased
  std::string host;    // lowercased, no port, IPv6 literals keep brackets
  std::optional<int> port;
  std::string path;    // always starts with '/'
  std::string query;   // without '?'
  std::string fragment;

  /// Path plus "?query" when present; what robots rules are matched against.
  std::string path_and_query() const {
    return query.empty() ? path : path + "?" + query;
  }
  /// scheme://host[:port]
  std::string origin() const;
  std::string str() const;

  /// Throws InvalidUrl unless `text` is an absolute URL with a host.
  static Url parse(std::string_view text);
  static std::optional<Url> try_parse(std::string_view text) noexcept;
};

inline bool is_http_scheme(const Url& u) noexcept {
  return u.scheme == "http" || u.scheme == "https";
}

}  // namespace cvsstext
