#include "pagefuse/token_io.hpp"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace pagefuse {

namespace {

[[noreturn]] void fail(size_t line_no, const std::string& what) {
  throw std::runtime_error("token file: line " + std::to_string(line_no) + ": " + what);
}

bool parse_int(const std::string& s, int& out) {
  try {
    size_t pos = 0;
    out = std::stoi(s, &pos);
    return pos == s.size();
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

std::string escape_token_text(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    if (c == ' ')
      out += "\\s";
    else if (c == '\\')
      out += "\\\\";
    else
      out += c;
  }
  return out;
}

std::string unescape_token_text(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\\' && i + 1 < text.size()) {
      char n = text[i + 1];
      if (n == 's') {
        out += ' ';
        ++i;
        continue;
      }
      if (n == '\\') {
        out += '\\';
        ++i;
        continue;
      }
    }
    out += text[i];
  }
  return out;
}

std::vector<PageTokens> parse_token_text(const std::string& text) {
  std::vector<PageTokens> pages;
  std::set<std::string> seen_ids;
  PageTokens* cur = nullptr;

  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "PAGE") {
      PageTokens pt;
      std::string w_s, h_s, extra;
      if (!(ls >> pt.page_id >> w_s >> h_s)) fail(line_no, "expected PAGE <id> <W> <H>");
      if (ls >> extra) fail(line_no, "trailing fields after page header");
      if (!parse_int(w_s, pt.width) || !parse_int(h_s, pt.height))
        fail(line_no, "non-integer page dimensions");
      if (pt.width <= 0 || pt.height <= 0) fail(line_no, "non-positive page dimensions");
      if (!seen_ids.insert(pt.page_id).second)
        fail(line_no, "duplicate page id '" + pt.page_id + "'");
      pages.push_back(std::move(pt));
      cur = &pages.back();
      continue;
    }

    if (cur == nullptr) fail(line_no, "token line before any PAGE header");
    std::string c0, c1, c2, c3, extra;
    if (!(ls >> c0 >> c1 >> c2 >> c3)) fail(line_no, "expected <text> <x_min> <y_min> <x_max> <y_max>");
    if (ls >> extra) fail(line_no, "trailing fields after box coordinates");

    Token t;
    t.text = unescape_token_text(first);
    // trim whitespace
    size_t b = t.text.find_first_not_of(" \t");
    size_t e = t.text.find_last_not_of(" \t");
    t.text = (b == std::string::npos) ? "" : t.text.substr(b, e - b + 1);
    if (t.text.empty()) fail(line_no, "empty token text");

    Box raw;
    if (!parse_int(c0, raw.x_min) || !parse_int(c1, raw.y_min) ||
        !parse_int(c2, raw.x_max) || !parse_int(c3, raw.y_max))
      fail(line_no, "non-integer box coordinate");
    if (raw.x_min >= raw.x_max || raw.y_min >= raw.y_max)
      fail(line_no, "degenerate box (min >= max)");

    t.box = raw.clipped(cur->width, cur->height);
    if (t.box.empty()) {
      ++cur->dropped;
      continue;
    }
    t.index = static_cast<int>(cur->tokens.size());
    cur->tokens.push_back(std::move(t));
  }
  return pages;
}

std::vector<PageTokens> parse_token_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open token file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_token_text(ss.str());
}

void write_token_file(const std::string& path, const std::vector<PageTokens>& pages) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write token file: " + path);
  for (const auto& p : pages) {
    out << "PAGE " << p.page_id << ' ' << p.width << ' ' << p.height << '\n';
    for (const auto& t : p.tokens) {
      out << escape_token_text(t.text) << ' ' << t.box.x_min << ' ' << t.box.y_min
          << ' ' << t.box.x_max << ' ' << t.box.y_max << '\n';
    }
  }
}

}  // namespace pagefuse
