#include "cvsstext/extractor.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "cvsstext/nvd.hpp"
#include "cvsstext/text.hpp"

namespace cvsstext::scrape {

using nlohmann::json;

namespace {

std::vector<std::string> string_list(const json& j, const char* key) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  const json& v = j.at(key);
  if (v.is_string()) {
    out.push_back(v.get<std::string>());
  } else if (v.is_array()) {
    for (const auto& s : v) {
      if (!s.is_string()) throw ExtractorConfigError(std::string(key) + ": expected strings");
      out.push_back(s.get<std::string>());
    }
  } else {
    throw ExtractorConfigError(std::string(key) + ": expected string or array");
  }
  return out;
}

bool contains_ci(std::string_view hay, std::string_view needle) {
  if (needle.empty()) return false;
  const std::string h = text::to_lower_ascii(hay);
  const std::string n = text::to_lower_ascii(needle);
  return h.find(n) != std::string::npos;
}

}  // namespace

std::string_view to_string(MissReason r) noexcept {
  switch (r) {
    case MissReason::NoContent: return "no_content";
    case MissReason::CveNotFound: return "cve_not_found";
    case MissReason::MultipleCves: return "multiple_cves";
    case MissReason::TooShort: return "too_short";
  }
  return "?";
}

bool mentions_cvss_vector(std::string_view line) {
  static const std::regex re(R"((CVSS:3\.[01]/)?AV:[NALP]/AC:[LH]/)", std::regex::icase);
  return std::regex_search(line.begin(), line.end(), re);
}

ExtractorSpec ExtractorSpec::from_json(const json& j) {
  if (!j.is_object()) throw ExtractorConfigError("extractor config must be an object");
  ExtractorSpec s;
  try {
    s.id = j.at("id").get<std::string>();
    s.site = j.value("site", s.id);
    s.hosts = string_list(j, "hosts");
    const std::string render = j.value("render", "browser");
    if (render == "http") {
      s.render = RenderMode::Http;
    } else if (render == "browser") {
      s.render = RenderMode::Browser;
    } else {
      throw ExtractorConfigError(s.id + ": unknown render mode '" + render + "'");
    }
    const std::string mode = j.value("mode", "page");
    if (mode == "page") {
      s.mode = ExtractMode::Page;
    } else if (mode == "section") {
      s.mode = ExtractMode::Section;
    } else if (mode == "sequence") {
      s.mode = ExtractMode::Sequence;
    } else {
      throw ExtractorConfigError(s.id + ": unknown mode '" + mode + "'");
    }
    s.remove = string_list(j, "remove");
    s.root = j.value("root", "");
    s.cve_scope = j.value("cve_scope", "");
    s.section = j.value("section", "");
    s.section_cve = j.value("section_cve", "");
    s.container = j.value("container", "");
    s.anchor = j.value("anchor", "");
    s.include_anchor = j.value("include_anchor", false);
    s.text = string_list(j, "text");
    s.strip_prefixes = string_list(j, "strip_prefixes");
    s.drop_lines = string_list(j, "drop_lines");
    s.denylist = string_list(j, "denylist");
    s.min_length = j.value("min_length", std::size_t{32});
  } catch (const json::exception& e) {
    throw ExtractorConfigError(std::string("extractor config: ") + e.what());
  }
  if (s.id.empty()) throw ExtractorConfigError("extractor id is empty");
  if (s.hosts.empty()) throw ExtractorConfigError(s.id + ": no hosts");
  if (s.mode == ExtractMode::Section && s.section.empty()) {
    throw ExtractorConfigError(s.id + ": section mode needs 'section'");
  }
  if (s.mode == ExtractMode::Sequence && s.anchor.empty()) {
    throw ExtractorConfigError(s.id + ": sequence mode needs 'anchor'");
  }
  for (auto& h : s.hosts) h = text::to_lower_ascii(h);
  return s;
}

struct Extractor::Compiled {
  std::vector<html::Selector> remove;
  std::optional<html::Selector> root, cve_scope, section, section_cve, container, anchor;
  std::vector<html::Selector> text;
  std::vector<std::regex> drop_lines;
};

namespace {

std::optional<html::Selector> opt_selector(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return html::Selector::parse(s);
}

}  // namespace

Extractor::Extractor(ExtractorSpec spec) : spec_(std::move(spec)) {
  auto c = std::make_shared<Compiled>();
  try {
    for (const auto& s : spec_.remove) c->remove.push_back(html::Selector::parse(s));
    c->root = opt_selector(spec_.root);
    c->cve_scope = opt_selector(spec_.cve_scope);
    c->section = opt_selector(spec_.section);
    c->section_cve = opt_selector(spec_.section_cve);
    c->container = opt_selector(spec_.container);
    c->anchor = opt_selector(spec_.anchor);
    for (const auto& s : spec_.text) c->text.push_back(html::Selector::parse(s));
  } catch (const html::SelectorError& e) {
    throw ExtractorConfigError(spec_.id + ": " + e.what());
  }
  for (const auto& r : spec_.drop_lines) {
    try {
      c->drop_lines.emplace_back(r, std::regex::ECMAScript | std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw ExtractorConfigError(spec_.id + ": bad drop_lines regex '" + r + "'");
    }
  }
  c_ = std::move(c);
}

namespace {

struct Context {
  const html::Document& doc;
  const std::vector<html::Selector>& text;
};

bool matches_any(const html::Document& doc, html::NodeId id,
                 const std::vector<html::Selector>& sels) {
  return std::any_of(sels.begin(), sels.end(),
                     [&](const auto& s) { return doc.matches(id, s); });
}

// Text-bearing nodes inside `scope`, outermost first, in document order.
// `scope` itself counts when it matches.
void collect_text_nodes(const Context& cx, html::NodeId scope, std::vector<html::NodeId>& out) {
  if (cx.text.empty() || matches_any(cx.doc, scope, cx.text)) {
    out.push_back(scope);
    return;
  }
  std::vector<html::NodeId> found;
  for (const auto& sel : cx.text) {
    const auto hits = cx.doc.select(sel, scope);
    found.insert(found.end(), hits.begin(), hits.end());
  }
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  for (auto id : found) {
    const bool nested = std::any_of(found.begin(), found.end(), [&](html::NodeId other) {
      return other != id && cx.doc.is_ancestor(other, id);
    });
    if (!nested) out.push_back(id);
  }
}

std::string anchor_line(const html::Document& doc, html::NodeId scope, std::string_view cve) {
  for (const auto& line : doc.text_blocks(scope)) {
    const auto ids = nvd::find_cve_ids(line);
    if (std::find(ids.begin(), ids.end(), cve) != ids.end()) return line;
  }
  return {};
}

std::vector<std::string> ids_in(const html::Document& doc, const std::vector<html::NodeId>& nodes) {
  std::vector<std::string> out;
  for (auto n : nodes) {
    for (auto& id : nvd::find_cve_ids(doc.text_content(n))) {
      if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(std::move(id));
    }
  }
  return out;
}

bool is_only(const std::vector<std::string>& ids, std::string_view cve) {
  return ids.size() == 1 && ids.front() == cve;
}

bool has(const std::vector<std::string>& ids, std::string_view cve) {
  return std::find(ids.begin(), ids.end(), cve) != ids.end();
}

}  // namespace

ExtractResult Extractor::extract(std::string_view page, std::string_view cve_id) const {
  html::Document doc = html::Document::parse(page);
  for (const auto& sel : c_->remove) {
    for (auto id : doc.select(sel)) doc.remove(id);
  }

  html::NodeId root = doc.root();
  if (c_->root) {
    const auto r = doc.select_first(*c_->root);
    if (!r) return ExtractMiss{MissReason::NoContent, "root '" + spec_.root + "' not found"};
    root = *r;
  }

  const Context cx{doc, c_->text};
  std::vector<html::NodeId> text_nodes;
  std::string anchor;

  switch (spec_.mode) {
    case ExtractMode::Page: {
      std::vector<html::NodeId> scope{root};
      if (c_->cve_scope) {
        scope = doc.select(*c_->cve_scope);
        if (scope.empty()) {
          return ExtractMiss{MissReason::NoContent, "cve scope '" + spec_.cve_scope + "' not found"};
        }
      }
      const auto ids = ids_in(doc, scope);
      if (!has(ids, cve_id)) return ExtractMiss{MissReason::CveNotFound, std::string(cve_id)};
      if (ids.size() > 1) {
        return ExtractMiss{MissReason::MultipleCves, std::to_string(ids.size()) + " CVE ids on page"};
      }
      for (auto s : scope) {
        anchor = anchor_line(doc, s, cve_id);
        if (!anchor.empty()) break;
      }
      collect_text_nodes(cx, root, text_nodes);
      break;
    }
    case ExtractMode::Section: {
      bool shared = false;
      std::optional<html::NodeId> chosen;
      for (auto cand : doc.select(*c_->section, root)) {
        std::vector<html::NodeId> scope{cand};
        if (c_->section_cve) {
          scope = doc.select(*c_->section_cve, cand);
          if (doc.matches(cand, *c_->section_cve)) scope.insert(scope.begin(), cand);
        }
        const auto ids = ids_in(doc, scope);
        if (is_only(ids, cve_id)) {
          chosen = cand;
          for (auto s : scope) {
            anchor = anchor_line(doc, s, cve_id);
            if (!anchor.empty()) break;
          }
          break;
        }
        if (has(ids, cve_id)) shared = true;
      }
      if (!chosen) {
        return shared ? ExtractMiss{MissReason::MultipleCves, "section shared with other CVEs"}
                      : ExtractMiss{MissReason::CveNotFound, std::string(cve_id)};
      }
      collect_text_nodes(cx, *chosen, text_nodes);
      break;
    }
    case ExtractMode::Sequence: {
      html::NodeId container = root;
      if (c_->container) {
        const auto r = doc.select_first(*c_->container, root);
        if (!r) {
          return ExtractMiss{MissReason::NoContent, "container '" + spec_.container + "' not found"};
        }
        container = *r;
      }
      const auto children = doc.element_children(container);
      auto is_anchor = [&](html::NodeId n) {
        return doc.matches(n, *c_->anchor) || doc.select_first(*c_->anchor, n).has_value();
      };
      bool shared = false;
      bool found = false;
      for (std::size_t i = 0; i < children.size() && !found; ++i) {
        if (!is_anchor(children[i])) continue;
        const auto ids = nvd::find_cve_ids(doc.inline_text(children[i]));
        if (!has(ids, cve_id)) continue;
        if (!is_only(ids, cve_id)) {
          shared = true;
          continue;
        }
        found = true;
        anchor = doc.inline_text(children[i]);
        if (spec_.include_anchor) collect_text_nodes(cx, children[i], text_nodes);
        for (std::size_t k = i + 1; k < children.size() && !is_anchor(children[k]); ++k) {
          collect_text_nodes(cx, children[k], text_nodes);
        }
      }
      if (!found) {
        return shared ? ExtractMiss{MissReason::MultipleCves, "anchor shared with other CVEs"}
                      : ExtractMiss{MissReason::CveNotFound, std::string(cve_id)};
      }
      break;
    }
  }

  std::vector<std::string> lines;
  for (auto n : text_nodes) {
    for (auto& line : doc.text_blocks(n)) {
      for (const auto& p : spec_.strip_prefixes) {
        if (line.starts_with(p)) {
          line = text::trim(std::string_view(line).substr(p.size()));
          break;
        }
      }
      if (line.empty() || mentions_cvss_vector(line)) continue;
      const bool dropped = std::any_of(c_->drop_lines.begin(), c_->drop_lines.end(),
                                       [&](const std::regex& re) { return std::regex_search(line, re); });
      if (dropped) continue;
      const bool boiler = std::any_of(spec_.denylist.begin(), spec_.denylist.end(),
                                      [&](const std::string& d) { return contains_ci(line, d); });
      if (boiler) continue;
      lines.push_back(std::move(line));
    }
  }
  if (lines.empty()) return ExtractMiss{MissReason::NoContent, "no text after filtering"};

  Extraction out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i) out.text += '\n';
    out.text += lines[i];
  }
  if (text::scalar_count(out.text) < spec_.min_length) {
    return ExtractMiss{MissReason::TooShort,
                       std::to_string(text::scalar_count(out.text)) + " characters"};
  }
  out.anchor = std::move(anchor);
  return out;
}

void ExtractorRegistry::add(ExtractorSpec spec) {
  if (by_id_.count(spec.id)) throw ExtractorConfigError("duplicate extractor id '" + spec.id + "'");
  for (const auto& h : spec.hosts) {
    if (by_host_.count(h)) {
      throw ExtractorConfigError("host '" + h + "' claimed by two extractors");
    }
  }
  const std::size_t idx = extractors_.size();
  extractors_.push_back(std::make_unique<Extractor>(std::move(spec)));
  const auto& s = extractors_.back()->spec();
  by_id_[s.id] = idx;
  for (const auto& h : s.hosts) by_host_[h] = idx;
}

ExtractorRegistry ExtractorRegistry::load_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw ExtractorConfigError("extractor directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  ExtractorRegistry reg;
  for (const auto& f : files) {
    std::ifstream in(f);
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ExtractorConfigError(f.string() + ": " + e.what());
    }
    reg.add(ExtractorSpec::from_json(j));
  }
  spdlog::debug("loaded {} extractors from {}", reg.size(), dir.string());
  return reg;
}

const Extractor* ExtractorRegistry::by_id(std::string_view id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : extractors_[it->second].get();
}

const Extractor* ExtractorRegistry::for_host(std::string_view host) const {
  const auto it = by_host_.find(text::to_lower_ascii(host));
  return it == by_host_.end() ? nullptr : extractors_[it->second].get();
}

const Extractor* ExtractorRegistry::resolve(std::string_view name) const {
  if (const auto* e = by_id(name)) return e;
  if (const auto* e = for_host(name)) return e;
  for (const auto& e : extractors_) {
    if (e->spec().site == name) return e.get();
  }
  return nullptr;
}

std::vector<std::string> ExtractorRegistry::ids() const {
  std::vector<std::string> out;
  for (const auto& e : extractors_) out.push_back(e->spec().id);
  return out;
}

}  // namespace cvsstext::scrape
