#pragma once

// Lenient HTML parsing and a small CSS selector engine, sufficient for the
// declarative page extractors. Not a conforming HTML5 tree builder: it
// implements the implicit-close rules that matter for advisory pages
// (p, li, dt/dd, table rows and cells, option) and ignores stray end tags.

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cvsstext::html {

using NodeId = std::uint32_t;

struct Node {
  enum class Kind : std::uint8_t { Element, Text };
  Kind kind = Kind::Element;
  std::string tag;  // lowercased; "#document" for the root
  std::vector<std::pair<std::string, std::string>> attrs;
  std::string text;  // decoded character data for Text nodes
  std::optional<NodeId> parent;
  std::vector<NodeId> children;
};

class SelectorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Compiled selector list. Supported: type, '*', #id, .class, [attr],
/// [attr=v] with = ~= ^= $= *= |=, :contains(text), :first-child,
/// :last-child, and the combinators ' ', '>', '+', '~'. Comma separates
/// alternatives.
class Selector {
 public:
  static Selector parse(std::string_view text);
  const std::string& source() const noexcept { return source_; }

  struct Impl;
  const Impl& impl() const noexcept { return *impl_; }

 private:
  std::string source_;
  std::shared_ptr<const Impl> impl_;
};

std::string decode_entities(std::string_view s);

class Document {
 public:
  static Document parse(std::string_view html);

  NodeId root() const noexcept { return 0; }
  const Node& node(NodeId id) const { return nodes_.at(id); }
  std::size_t size() const noexcept { return nodes_.size(); }

  std::optional<std::string_view> attr(NodeId id, std::string_view name) const;
  bool has_class(NodeId id, std::string_view cls) const;

  /// Matching elements that are descendants of `scope`, in document order.
  std::vector<NodeId> select(const Selector& sel, NodeId scope = 0) const;
  std::vector<NodeId> select(std::string_view sel, NodeId scope = 0) const {
    return select(Selector::parse(sel), scope);
  }
  std::optional<NodeId> select_first(const Selector& sel, NodeId scope = 0) const;
  bool matches(NodeId id, const Selector& sel) const;

  /// Element children only.
  std::vector<NodeId> element_children(NodeId id) const;

  /// True when `ancestor` is a proper ancestor of `id`.
  bool is_ancestor(NodeId ancestor, NodeId id) const;

  /// Detaches the subtree from its parent; it no longer contributes text or
  /// selector matches.
  void remove(NodeId id);

  /// Visible text split into block-level lines; whitespace collapsed inside
  /// lines, empty lines dropped.
  std::vector<std::string> text_blocks(NodeId id) const;
  std::string text_content(NodeId id) const;  // text_blocks joined by '\n'

  /// Inline text of a subtree as a single collapsed line.
  std::string inline_text(NodeId id) const;

 private:
  std::vector<Node> nodes_;

  friend struct Builder;
};

}  // namespace cvsstext::html
