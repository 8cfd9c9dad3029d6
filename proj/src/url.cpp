#include "cvsstext/url.hpp"

#include <algorithm>
#include <cctype>

#include "cvsstext/text.hpp"

namespace cvsstext {

std::string Url::origin() const {
  std::string out = scheme + "://" + host;
  if (port) out += ":" + std::to_string(*port);
  return out;
}

std::string Url::str() const {
  std::string out = origin() + path;
  if (!query.empty()) out += "?" + query;
  if (!fragment.empty()) out += "#" + fragment;
  return out;
}

Url Url::parse(std::string_view text) {
  auto fail = [&](std::string_view why) {
    return InvalidUrl("invalid URL '" + std::string(text) + "': " + std::string(why));
  };

  const std::string_view trimmed = [&] {
    auto b = text.find_first_not_of(" \t\r\n");
    auto e = text.find_last_not_of(" \t\r\n");
    return b == std::string_view::npos ? std::string_view{} : text.substr(b, e - b + 1);
  }();

  const auto sep = trimmed.find("://");
  if (sep == std::string_view::npos || sep == 0) throw fail("missing scheme");
  Url u;
  u.scheme = text::to_lower_ascii(trimmed.substr(0, sep));
  if (!std::isalpha(static_cast<unsigned char>(u.scheme[0])) ||
      !std::all_of(u.scheme.begin(), u.scheme.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' ||
               c == '.';
      })) {
    throw fail("bad scheme");
  }

  std::string_view rest = trimmed.substr(sep + 3);
  const auto auth_end = rest.find_first_of("/?#");
  std::string_view authority = rest.substr(0, auth_end);
  rest = auth_end == std::string_view::npos ? std::string_view{} : rest.substr(auth_end);

  if (const auto at = authority.rfind('@'); at != std::string_view::npos) {
    authority.remove_prefix(at + 1);
  }
  std::string_view host = authority;
  std::string_view port;
  if (!authority.empty() && authority.front() == '[') {
    const auto close = authority.find(']');
    if (close == std::string_view::npos) throw fail("unterminated IPv6 literal");
    host = authority.substr(0, close + 1);
    if (close + 1 < authority.size()) {
      if (authority[close + 1] != ':') throw fail("garbage after IPv6 literal");
      port = authority.substr(close + 2);
    }
  } else if (const auto colon = authority.rfind(':'); colon != std::string_view::npos) {
    host = authority.substr(0, colon);
    port = authority.substr(colon + 1);
  }
  if (host.empty()) throw fail("missing host");
  for (char c : host) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '\\' || c == '"' ||
        c == '<' || c == '>') {
      throw fail("bad host character");
    }
  }
  u.host = text::to_lower_ascii(host);
  while (!u.host.empty() && u.host.back() == '.') u.host.pop_back();
  if (u.host.empty()) throw fail("missing host");
  if (!port.empty()) {
    int p = 0;
    for (char c : port) {
      if (!std::isdigit(static_cast<unsigned char>(c))) throw fail("bad port");
      p = p * 10 + (c - '0');
      if (p > 65535) throw fail("port out of range");
    }
    u.port = p;
  }

  if (const auto hash = rest.find('#'); hash != std::string_view::npos) {
    u.fragment = std::string(rest.substr(hash + 1));
    rest = rest.substr(0, hash);
  }
  if (const auto q = rest.find('?'); q != std::string_view::npos) {
    u.query = std::string(rest.substr(q + 1));
    rest = rest.substr(0, q);
  }
  u.path = rest.empty() ? "/" : std::string(rest);
  return u;
}

std::optional<Url> Url::try_parse(std::string_view text) noexcept {
  try {
    return parse(text);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

}  // namespace cvsstext
