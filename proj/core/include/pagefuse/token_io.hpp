#pragma once

#include <string>
#include <vector>

#include "pagefuse/page.hpp"

namespace pagefuse {

/// Tokens of one page as read from a token file.
struct PageTokens {
  std::string page_id;
  int width = 0;
  int height = 0;
  std::vector<Token> tokens;
  int dropped = 0;  // tokens whose clipped box was empty
};

/// Parse a line-oriented token file. Format, one or more pages per file:
///   PAGE <id> <W> <H>
///   <text> <x_min> <y_min> <x_max> <y_max>
/// Spaces inside token text are escaped as `\s`.
/// Boxes are clipped to page bounds; tokens with an empty clipped box
/// are dropped and counted in `dropped`. Throws std::runtime_error with
/// the offending line number on malformed input, negative dimensions,
/// or duplicate page ids.
std::vector<PageTokens> parse_token_file(const std::string& path);
std::vector<PageTokens> parse_token_text(const std::string& text);

std::string escape_token_text(const std::string& text);
std::string unescape_token_text(const std::string& text);

void write_token_file(const std::string& path, const std::vector<PageTokens>& pages);

}  // namespace pagefuse
