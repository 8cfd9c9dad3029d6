#pragma once

// UTF-8 helpers shared by the loaders, the extractors and the tokenizer.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace cvsstext::text {

/// Byte offset of the first invalid UTF-8 sequence, or nullopt when valid.
/// Overlong encodings, surrogates and code points above U+10FFFF are invalid.
std::optional<std::size_t> find_invalid_utf8(std::string_view s) noexcept;

inline bool is_valid_utf8(std::string_view s) noexcept {
  return !find_invalid_utf8(s).has_value();
}

/// Number of Unicode scalar values. Input must be valid UTF-8.
std::size_t scalar_count(std::string_view s) noexcept;

/// Decodes one scalar at `pos` and advances it. Invalid bytes decode as
/// U+FFFD and advance by one.
char32_t decode_next(std::string_view s, std::size_t& pos) noexcept;

void append_utf8(std::string& out, char32_t cp);

bool is_word_char(char32_t cp) noexcept;
bool is_space(char32_t cp) noexcept;
char32_t to_lower(char32_t cp) noexcept;

std::string to_lower_ascii(std::string_view s);

/// Collapses runs of whitespace (including U+00A0) into one ASCII space and
/// trims both ends.
std::string collapse_whitespace(std::string_view s);

std::string trim(std::string_view s);

}  // namespace cvsstext::text
