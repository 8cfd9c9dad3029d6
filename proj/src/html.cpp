#include "cvsstext/html.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>

#include "cvsstext/text.hpp"

namespace cvsstext::html {

// ---------------------------------------------------------------------------
// Entities

namespace {

const std::unordered_map<std::string_view, char32_t>& named_entities() {
  static const std::unordered_map<std::string_view, char32_t> table = {
      {"amp", '&'},       {"lt", '<'},          {"gt", '>'},        {"quot", '"'},
      {"apos", '\''},     {"nbsp", 0xA0},       {"copy", 0xA9},     {"reg", 0xAE},
      {"trade", 0x2122},  {"hellip", 0x2026},   {"mdash", 0x2014},  {"ndash", 0x2013},
      {"lsquo", 0x2018},  {"rsquo", 0x2019},    {"ldquo", 0x201C},  {"rdquo", 0x201D},
      {"bull", 0x2022},   {"middot", 0xB7},     {"laquo", 0xAB},    {"raquo", 0xBB},
      {"sect", 0xA7},     {"para", 0xB6},       {"deg", 0xB0},      {"times", 0xD7},
      {"shy", 0xAD},      {"zwj", 0x200D},      {"zwnj", 0x200C},   {"ensp", 0x2002},
      {"emsp", 0x2003},   {"thinsp", 0x2009},   {"eacute", 0xE9},   {"egrave", 0xE8},
      {"aacute", 0xE1},   {"agrave", 0xE0},     {"auml", 0xE4},     {"ouml", 0xF6},
      {"uuml", 0xFC},     {"Auml", 0xC4},       {"Ouml", 0xD6},     {"Uuml", 0xDC},
      {"szlig", 0xDF},    {"ccedil", 0xE7},     {"ntilde", 0xF1},   {"euro", 0x20AC},
      {"larr", 0x2190},   {"rarr", 0x2192},     {"check", 0x2713},  {"lowast", 0x2217},
  };
  return table;
}

}  // namespace

std::string decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto amp = s.find('&', i);
    if (amp == std::string_view::npos) {
      out.append(s.substr(i));
      break;
    }
    out.append(s.substr(i, amp - i));
    i = amp + 1;
    if (i < s.size() && s[i] == '#') {
      std::size_t j = i + 1;
      const bool hex = j < s.size() && (s[j] == 'x' || s[j] == 'X');
      if (hex) ++j;
      char32_t cp = 0;
      const std::size_t digits_start = j;
      while (j < s.size() && (hex ? std::isxdigit(static_cast<unsigned char>(s[j]))
                                  : std::isdigit(static_cast<unsigned char>(s[j])))) {
        const char c = s[j];
        const unsigned d = std::isdigit(static_cast<unsigned char>(c))
                               ? static_cast<unsigned>(c - '0')
                               : static_cast<unsigned>(std::tolower(c) - 'a' + 10);
        if (cp < 0x110000) cp = cp * (hex ? 16 : 10) + d;
        ++j;
      }
      if (j == digits_start) {
        out += '&';
        continue;
      }
      if (j < s.size() && s[j] == ';') ++j;
      if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
      text::append_utf8(out, cp);
      i = j;
      continue;
    }
    std::size_t j = i;
    while (j < s.size() && j - i < 32 && std::isalnum(static_cast<unsigned char>(s[j]))) ++j;
    const std::string_view name = s.substr(i, j - i);
    const auto& table = named_entities();
    const auto it = table.find(name);
    const bool terminated = j < s.size() && s[j] == ';';
    if (it != table.end() &&
        (terminated || name == "amp" || name == "lt" || name == "gt" || name == "nbsp" ||
         name == "quot")) {
      text::append_utf8(out, it->second);
      i = terminated ? j + 1 : j;
    } else {
      out += '&';
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tree building

namespace {

bool in(std::string_view tag, std::initializer_list<std::string_view> set) {
  return std::find(set.begin(), set.end(), tag) != set.end();
}

bool is_void(std::string_view t) {
  return in(t, {"area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta",
                "param", "source", "track", "wbr"});
}

bool closes_p(std::string_view t) {
  return in(t, {"address", "article", "aside", "blockquote", "details", "div", "dl",
                "fieldset", "figcaption", "figure", "footer", "form", "h1", "h2", "h3",
                "h4", "h5", "h6", "header", "hr", "main", "nav", "ol", "p", "pre",
                "section", "table", "ul"});
}

bool is_block(std::string_view t) {
  return closes_p(t) || in(t, {"li", "dt", "dd", "tr", "br", "caption", "tbody", "thead",
                               "tfoot", "body", "html", "summary", "legend", "option"});
}

bool skip_text(std::string_view t) {
  return in(t, {"script", "style", "noscript", "template", "head", "title", "svg"});
}

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == ':' || c == '_';
}

std::size_t ifind(std::string_view hay, std::string_view needle, std::size_t from) {
  auto it = std::search(hay.begin() + static_cast<std::ptrdiff_t>(from), hay.end(),
                        needle.begin(), needle.end(), [](char a, char b) {
                          return std::tolower(static_cast<unsigned char>(a)) ==
                                 std::tolower(static_cast<unsigned char>(b));
                        });
  return it == hay.end() ? std::string_view::npos
                         : static_cast<std::size_t>(it - hay.begin());
}

}  // namespace

struct Builder {
  std::vector<Node>& nodes;
  std::vector<NodeId> stack{0};

  NodeId current() const { return stack.back(); }

  void append_text(std::string text) {
    if (text.empty()) return;
    auto& kids = nodes[current()].children;
    if (!kids.empty() && nodes[kids.back()].kind == Node::Kind::Text) {
      nodes[kids.back()].text += text;
      return;
    }
    Node n;
    n.kind = Node::Kind::Text;
    n.text = std::move(text);
    n.parent = current();
    nodes.push_back(std::move(n));
    nodes[current()].children.push_back(static_cast<NodeId>(nodes.size() - 1));
  }

  void close_if_open(std::initializer_list<std::string_view> targets,
                     std::initializer_list<std::string_view> boundaries) {
    for (std::size_t k = stack.size() - 1; k > 0; --k) {
      const std::string& t = nodes[stack[k]].tag;
      if (in(t, targets)) {
        stack.resize(k);
        return;
      }
      if (in(t, boundaries)) return;
    }
  }

  void implied_closes(std::string_view tag) {
    if (closes_p(tag)) close_if_open({"p"}, {"table", "td", "th", "button", "caption", "object"});
    if (tag == "li") close_if_open({"li"}, {"ul", "ol", "table"});
    if (tag == "dt" || tag == "dd") close_if_open({"dt", "dd"}, {"dl", "table"});
    if (tag == "tr") close_if_open({"tr"}, {"table", "tbody", "thead", "tfoot"});
    if (tag == "td" || tag == "th") close_if_open({"td", "th"}, {"tr", "table"});
    if (in(tag, {"thead", "tbody", "tfoot"})) close_if_open({"thead", "tbody", "tfoot"}, {"table"});
    if (tag == "option") close_if_open({"option"}, {"select", "datalist"});
  }

  NodeId open_element(std::string tag, std::vector<std::pair<std::string, std::string>> attrs,
                      bool self_closing) {
    implied_closes(tag);
    Node n;
    n.tag = std::move(tag);
    n.attrs = std::move(attrs);
    n.parent = current();
    nodes.push_back(std::move(n));
    const auto id = static_cast<NodeId>(nodes.size() - 1);
    nodes[current()].children.push_back(id);
    if (!self_closing && !is_void(nodes[id].tag)) stack.push_back(id);
    return id;
  }

  void close_element(std::string_view tag) {
    for (std::size_t k = stack.size() - 1; k > 0; --k) {
      if (nodes[stack[k]].tag == tag) {
        stack.resize(k);
        return;
      }
    }
  }
};

Document Document::parse(std::string_view html) {
  Document doc;
  Node root;
  root.tag = "#document";
  doc.nodes_.push_back(std::move(root));
  Builder b{doc.nodes_};

  std::size_t i = 0;
  const std::size_t n = html.size();
  while (i < n) {
    const auto lt = html.find('<', i);
    if (lt == std::string_view::npos) {
      b.append_text(decode_entities(html.substr(i)));
      break;
    }
    if (lt > i) b.append_text(decode_entities(html.substr(i, lt - i)));
    i = lt;

    if (html.compare(i, 4, "<!--") == 0) {
      const auto end = html.find("-->", i + 4);
      i = end == std::string_view::npos ? n : end + 3;
      continue;
    }
    if (i + 1 < n && (html[i + 1] == '!' || html[i + 1] == '?')) {
      const auto end = html.find('>', i);
      i = end == std::string_view::npos ? n : end + 1;
      continue;
    }
    if (i + 1 < n && html[i + 1] == '/') {
      std::size_t j = i + 2;
      while (j < n && is_name_char(html[j])) ++j;
      const std::string name = text::to_lower_ascii(html.substr(i + 2, j - i - 2));
      const auto end = html.find('>', j);
      i = end == std::string_view::npos ? n : end + 1;
      if (!name.empty()) b.close_element(name);
      continue;
    }
    if (i + 1 >= n || !std::isalpha(static_cast<unsigned char>(html[i + 1]))) {
      b.append_text("<");
      ++i;
      continue;
    }

    // Start tag.
    std::size_t j = i + 1;
    while (j < n && is_name_char(html[j])) ++j;
    std::string tag = text::to_lower_ascii(html.substr(i + 1, j - i - 1));
    std::vector<std::pair<std::string, std::string>> attrs;
    bool self_closing = false;
    while (j < n) {
      while (j < n && (std::isspace(static_cast<unsigned char>(html[j])) || html[j] == '/')) {
        if (html[j] == '/' && j + 1 < n && html[j + 1] == '>') self_closing = true;
        ++j;
      }
      if (j >= n || html[j] == '>') break;
      std::size_t k = j;
      while (k < n && !std::isspace(static_cast<unsigned char>(html[k])) && html[k] != '=' &&
             html[k] != '>' && !(html[k] == '/' && k + 1 < n && html[k + 1] == '>')) {
        ++k;
      }
      std::string name = text::to_lower_ascii(html.substr(j, k - j));
      j = k;
      while (j < n && std::isspace(static_cast<unsigned char>(html[j]))) ++j;
      std::string value;
      if (j < n && html[j] == '=') {
        ++j;
        while (j < n && std::isspace(static_cast<unsigned char>(html[j]))) ++j;
        if (j < n && (html[j] == '"' || html[j] == '\'')) {
          const char q = html[j];
          const auto close = html.find(q, j + 1);
          const std::size_t stop = close == std::string_view::npos ? n : close;
          value = decode_entities(html.substr(j + 1, stop - j - 1));
          j = close == std::string_view::npos ? n : close + 1;
        } else {
          std::size_t v = j;
          while (v < n && !std::isspace(static_cast<unsigned char>(html[v])) && html[v] != '>') ++v;
          value = decode_entities(html.substr(j, v - j));
          j = v;
        }
      }
      if (!name.empty() &&
          std::none_of(attrs.begin(), attrs.end(), [&](const auto& a) { return a.first == name; })) {
        attrs.emplace_back(std::move(name), std::move(value));
      }
    }
    i = j < n ? j + 1 : n;

    const bool raw = tag == "script" || tag == "style";
    const bool rcdata = tag == "textarea" || tag == "title";
    const std::string tag_copy = tag;
    b.open_element(std::move(tag), std::move(attrs), self_closing);
    if ((raw || rcdata) && !self_closing) {
      const auto end = ifind(html, "</" + tag_copy, i);
      const std::size_t stop = end == std::string_view::npos ? n : end;
      if (rcdata) b.append_text(decode_entities(html.substr(i, stop - i)));
      i = stop;
    }
  }
  return doc;
}

// ---------------------------------------------------------------------------
// Selectors

namespace {

enum class AttrOp { Exists, Equals, Word, Prefix, Suffix, Substring, Dash };

struct AttrCond {
  std::string name;
  AttrOp op = AttrOp::Exists;
  std::string value;
};

struct Compound {
  std::string tag;  // empty: any element
  std::vector<std::string> ids;
  std::vector<std::string> classes;
  std::vector<AttrCond> attrs;
  std::vector<std::string> contains;
  bool first_child = false;
  bool last_child = false;
};

struct Complex {
  std::vector<Compound> parts;
  std::vector<char> combinators;  // between parts[k] and parts[k+1]
};

class SelectorParser {
 public:
  explicit SelectorParser(std::string_view s) : s_(s) {}

  std::vector<Complex> parse() {
    std::vector<Complex> out;
    while (true) {
      out.push_back(complex());
      skip_ws();
      if (pos_ >= s_.size()) break;
      if (s_[pos_] != ',') fail("expected ','");
      ++pos_;
    }
    return out;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(const std::string& why) const {
    throw SelectorError("selector '" + std::string(s_) + "' at " + std::to_string(pos_) +
                        ": " + why);
  }

  bool skip_ws() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    return pos_ > start;
  }

  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' ||
           static_cast<unsigned char>(c) >= 0x80;
  }

  std::string ident() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    if (pos_ == start) fail("expected identifier");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string string_or_ident(char terminator) {
    if (pos_ < s_.size() && (s_[pos_] == '"' || s_[pos_] == '\'')) {
      const char q = s_[pos_++];
      const auto close = s_.find(q, pos_);
      if (close == std::string_view::npos) fail("unterminated string");
      std::string v(s_.substr(pos_, close - pos_));
      pos_ = close + 1;
      return v;
    }
    const auto close = s_.find(terminator, pos_);
    if (close == std::string_view::npos) fail("unterminated argument");
    std::string v = text::trim(s_.substr(pos_, close - pos_));
    pos_ = close;
    return v;
  }

  Compound compound() {
    Compound c;
    bool any = false;
    if (pos_ < s_.size() && s_[pos_] == '*') {
      ++pos_;
      any = true;
    } else if (pos_ < s_.size() && ident_char(s_[pos_])) {
      c.tag = text::to_lower_ascii(ident());
      any = true;
    }
    while (pos_ < s_.size()) {
      const char ch = s_[pos_];
      if (ch == '#') {
        ++pos_;
        c.ids.push_back(ident());
      } else if (ch == '.') {
        ++pos_;
        c.classes.push_back(ident());
      } else if (ch == '[') {
        ++pos_;
        skip_ws();
        AttrCond a;
        a.name = text::to_lower_ascii(ident());
        skip_ws();
        if (pos_ < s_.size() && s_[pos_] != ']') {
          const char op = s_[pos_];
          if (op == '=') {
            a.op = AttrOp::Equals;
            ++pos_;
          } else {
            if (pos_ + 1 >= s_.size() || s_[pos_ + 1] != '=') fail("bad attribute operator");
            switch (op) {
              case '~': a.op = AttrOp::Word; break;
              case '^': a.op = AttrOp::Prefix; break;
              case '$': a.op = AttrOp::Suffix; break;
              case '*': a.op = AttrOp::Substring; break;
              case '|': a.op = AttrOp::Dash; break;
              default: fail("bad attribute operator");
            }
            pos_ += 2;
          }
          skip_ws();
          a.value = string_or_ident(']');
          skip_ws();
        }
        if (pos_ >= s_.size() || s_[pos_] != ']') fail("expected ']'");
        ++pos_;
        c.attrs.push_back(std::move(a));
      } else if (ch == ':') {
        ++pos_;
        const std::string name = text::to_lower_ascii(ident());
        if (name == "contains") {
          if (pos_ >= s_.size() || s_[pos_] != '(') fail("expected '('");
          ++pos_;
          skip_ws();
          c.contains.push_back(string_or_ident(')'));
          skip_ws();
          if (pos_ >= s_.size() || s_[pos_] != ')') fail("expected ')'");
          ++pos_;
        } else if (name == "first-child") {
          c.first_child = true;
        } else if (name == "last-child") {
          c.last_child = true;
        } else {
          fail("unsupported pseudo-class :" + name);
        }
      } else {
        break;
      }
      any = true;
    }
    if (!any) fail("empty compound selector");
    return c;
  }

  Complex complex() {
    Complex cx;
    skip_ws();
    cx.parts.push_back(compound());
    while (true) {
      const bool ws = skip_ws();
      if (pos_ >= s_.size() || s_[pos_] == ',') break;
      char comb = ' ';
      if (s_[pos_] == '>' || s_[pos_] == '+' || s_[pos_] == '~') {
        comb = s_[pos_++];
        skip_ws();
      } else if (!ws) {
        fail("unexpected character");
      }
      cx.combinators.push_back(comb);
      cx.parts.push_back(compound());
    }
    return cx;
  }
};

}  // namespace

struct Selector::Impl {
  std::vector<Complex> alternatives;
};

Selector Selector::parse(std::string_view text) {
  Selector s;
  s.source_ = std::string(text);
  auto impl = std::make_shared<Impl>();
  impl->alternatives = SelectorParser(text).parse();
  s.impl_ = std::move(impl);
  return s;
}

// ---------------------------------------------------------------------------
// Document queries

std::optional<std::string_view> Document::attr(NodeId id, std::string_view name) const {
  for (const auto& [k, v] : nodes_.at(id).attrs) {
    if (k == name) return std::string_view(v);
  }
  return std::nullopt;
}

namespace {

bool has_word(std::string_view list, std::string_view word) {
  std::size_t i = 0;
  while (i < list.size()) {
    while (i < list.size() && std::isspace(static_cast<unsigned char>(list[i]))) ++i;
    std::size_t j = i;
    while (j < list.size() && !std::isspace(static_cast<unsigned char>(list[j]))) ++j;
    if (j > i && list.substr(i, j - i) == word) return true;
    i = j;
  }
  return false;
}

}  // namespace

bool Document::has_class(NodeId id, std::string_view cls) const {
  const auto c = attr(id, "class");
  return c && has_word(*c, cls);
}

std::vector<NodeId> Document::element_children(NodeId id) const {
  std::vector<NodeId> out;
  for (NodeId c : nodes_.at(id).children) {
    if (nodes_[c].kind == Node::Kind::Element) out.push_back(c);
  }
  return out;
}

bool Document::is_ancestor(NodeId ancestor, NodeId id) const {
  auto p = nodes_.at(id).parent;
  while (p) {
    if (*p == ancestor) return true;
    p = nodes_[*p].parent;
  }
  return false;
}

struct Matcher {
  const Document& doc;
  const std::vector<Node>& nodes;

  bool is_element(NodeId id) const {
    return nodes[id].kind == Node::Kind::Element && id != 0;
  }

  std::optional<NodeId> prev_element(NodeId id) const {
    const auto parent = nodes[id].parent;
    if (!parent) return std::nullopt;
    const auto& sib = nodes[*parent].children;
    auto it = std::find(sib.begin(), sib.end(), id);
    while (it != sib.begin()) {
      --it;
      if (nodes[*it].kind == Node::Kind::Element) return *it;
    }
    return std::nullopt;
  }

  bool compound(NodeId id, const Compound& c) const {
    if (!is_element(id)) return false;
    const Node& n = nodes[id];
    if (!c.tag.empty() && n.tag != c.tag) return false;
    for (const auto& want : c.ids) {
      const auto v = doc.attr(id, "id");
      if (!v || *v != want) return false;
    }
    for (const auto& cls : c.classes) {
      if (!doc.has_class(id, cls)) return false;
    }
    for (const auto& a : c.attrs) {
      const auto v = doc.attr(id, a.name);
      if (!v) return false;
      switch (a.op) {
        case AttrOp::Exists: break;
        case AttrOp::Equals: if (*v != a.value) return false; break;
        case AttrOp::Word: if (!has_word(*v, a.value)) return false; break;
        case AttrOp::Prefix: if (!v->starts_with(a.value)) return false; break;
        case AttrOp::Suffix: if (!v->ends_with(a.value)) return false; break;
        case AttrOp::Substring: if (v->find(a.value) == std::string_view::npos) return false; break;
        case AttrOp::Dash:
          if (*v != a.value && !v->starts_with(a.value + "-")) return false;
          break;
      }
    }
    if (c.first_child || c.last_child) {
      const auto parent = n.parent;
      if (!parent) return false;
      const auto kids = doc.element_children(*parent);
      if (c.first_child && (kids.empty() || kids.front() != id)) return false;
      if (c.last_child && (kids.empty() || kids.back() != id)) return false;
    }
    if (!c.contains.empty()) {
      const std::string t = doc.inline_text(id);
      for (const auto& needle : c.contains) {
        if (t.find(needle) == std::string::npos) return false;
      }
    }
    return true;
  }

  bool complex(NodeId id, const Complex& cx, std::size_t k) const {
    if (!compound(id, cx.parts[k])) return false;
    if (k == 0) return true;
    switch (cx.combinators[k - 1]) {
      case '>': {
        const auto p = nodes[id].parent;
        return p && complex(*p, cx, k - 1);
      }
      case ' ': {
        for (auto p = nodes[id].parent; p; p = nodes[*p].parent) {
          if (complex(*p, cx, k - 1)) return true;
        }
        return false;
      }
      case '+': {
        const auto s = prev_element(id);
        return s && complex(*s, cx, k - 1);
      }
      case '~': {
        for (auto s = prev_element(id); s; s = prev_element(*s)) {
          if (complex(*s, cx, k - 1)) return true;
        }
        return false;
      }
    }
    return false;
  }

  bool any(NodeId id, const Selector& sel) const {
    for (const auto& cx : sel.impl().alternatives) {
      if (complex(id, cx, cx.parts.size() - 1)) return true;
    }
    return false;
  }
};

bool Document::matches(NodeId id, const Selector& sel) const {
  return Matcher{*this, nodes_}.any(id, sel);
}

std::vector<NodeId> Document::select(const Selector& sel, NodeId scope) const {
  std::vector<NodeId> out;
  const Matcher m{*this, nodes_};
  std::vector<NodeId> todo(nodes_.at(scope).children.rbegin(), nodes_.at(scope).children.rend());
  while (!todo.empty()) {
    const NodeId id = todo.back();
    todo.pop_back();
    if (nodes_[id].kind != Node::Kind::Element) continue;
    if (m.any(id, sel)) out.push_back(id);
    const auto& kids = nodes_[id].children;
    todo.insert(todo.end(), kids.rbegin(), kids.rend());
  }
  return out;
}

std::optional<NodeId> Document::select_first(const Selector& sel, NodeId scope) const {
  auto all = select(sel, scope);
  if (all.empty()) return std::nullopt;
  return all.front();
}

void Document::remove(NodeId id) {
  if (id == 0) return;
  auto& n = nodes_.at(id);
  if (!n.parent) return;
  auto& sib = nodes_[*n.parent].children;
  sib.erase(std::remove(sib.begin(), sib.end(), id), sib.end());
  n.parent.reset();
}

std::vector<std::string> Document::text_blocks(NodeId id) const {
  std::vector<std::string> lines;
  std::string line;
  auto flush = [&] {
    std::string collapsed = text::collapse_whitespace(line);
    if (!collapsed.empty()) lines.push_back(std::move(collapsed));
    line.clear();
  };
  auto walk = [&](auto&& self, NodeId cur) -> void {
    const Node& n = nodes_[cur];
    if (n.kind == Node::Kind::Text) {
      line += n.text;
      return;
    }
    if (cur != id && skip_text(n.tag)) return;
    const bool block = is_block(n.tag);
    const bool cell = n.tag == "td" || n.tag == "th";
    if (block) flush();
    if (cell) line += ' ';
    for (NodeId c : n.children) self(self, c);
    if (cell) line += ' ';
    if (block) flush();
  };
  walk(walk, id);
  flush();
  return lines;
}

std::string Document::text_content(NodeId id) const {
  std::string out;
  for (const auto& l : text_blocks(id)) {
    if (!out.empty()) out += '\n';
    out += l;
  }
  return out;
}

std::string Document::inline_text(NodeId id) const {
  std::string out;
  for (const auto& l : text_blocks(id)) {
    if (!out.empty()) out += ' ';
    out += l;
  }
  return out;
}

}  // namespace cvsstext::html
