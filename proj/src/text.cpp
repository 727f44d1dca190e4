#include "efcg/text.hpp"

#include <locale.h>
#include <wctype.h>

namespace efcg::text {
namespace {

locale_t utf8_ctype() {
  static const locale_t loc = [] {
    locale_t l = newlocale(LC_CTYPE_MASK, "C.UTF-8", static_cast<locale_t>(0));
    if (l == static_cast<locale_t>(0)) {
      l = newlocale(LC_CTYPE_MASK, "C.utf8", static_cast<locale_t>(0));
    }
    return l;
  }();
  return loc;
}

wint_t as_wint(char32_t cp) { return static_cast<wint_t>(cp); }

// Unicode White_Space characters that glibc does not report as spaces.
bool is_nonbreaking_space(char32_t cp) {
  return cp == 0x00A0 || cp == 0x2007 || cp == 0x202F || cp == 0x0085;
}

}  // namespace

std::vector<CodePoint> decode_utf8(std::string_view s) {
  std::vector<CodePoint> out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
      len = 1;
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    }
    bool ok = len > 0 && i + len <= s.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      const auto b = static_cast<unsigned char>(s[i + k]);
      if ((b & 0xC0) != 0x80) {
        ok = false;
      } else {
        cp = (cp << 6) | (b & 0x3F);
      }
    }
    // Reject overlong forms and surrogates.
    if (ok && ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) ||
               (len == 4 && (cp < 0x10000 || cp > 0x10FFFF)) ||
               (cp >= 0xD800 && cp <= 0xDFFF))) {
      ok = false;
    }
    if (!ok) {
      out.push_back({0xFFFD, i, 1});
      ++i;
      continue;
    }
    out.push_back({cp, i, len});
    i += len;
  }
  return out;
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_space(char32_t cp) {
  if (cp < 0x80) {
    return cp == ' ' || (cp >= '\t' && cp <= '\r');
  }
  return is_nonbreaking_space(cp) || iswspace_l(as_wint(cp), utf8_ctype()) != 0;
}

bool is_punct(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  if (is_nonbreaking_space(cp)) {
    return false;
  }
  return iswpunct_l(as_wint(cp), utf8_ctype()) != 0;
}

bool is_upper(char32_t cp) {
  if (cp < 0x80) {
    return cp >= 'A' && cp <= 'Z';
  }
  return iswupper_l(as_wint(cp), utf8_ctype()) != 0;
}

bool is_lower(char32_t cp) {
  if (cp < 0x80) {
    return cp >= 'a' && cp <= 'z';
  }
  return iswlower_l(as_wint(cp), utf8_ctype()) != 0;
}

char32_t to_lower(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'A' && cp <= 'Z') ? cp + 32 : cp;
  }
  return static_cast<char32_t>(towlower_l(as_wint(cp), utf8_ctype()));
}

std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (const auto& c : decode_utf8(s)) {
    if (c.value == 0xFFFD && c.length == 1 &&
        static_cast<unsigned char>(s[c.offset]) >= 0x80) {
      out.push_back(s[c.offset]);  // keep undecodable bytes untouched
    } else {
      append_utf8(out, to_lower(c.value));
    }
  }
  return out;
}

std::string normalize_word(std::string_view word) {
  const auto cps = decode_utf8(word);
  std::size_t begin = 0;
  std::size_t end = cps.size();
  while (begin < end && is_punct(cps[begin].value)) ++begin;
  while (end > begin && is_punct(cps[end - 1].value)) --end;
  if (begin == end) {
    return {};
  }
  const std::size_t from = cps[begin].offset;
  const std::size_t to = cps[end - 1].offset + cps[end - 1].length;
  return to_lower(word.substr(from, to - from));
}

bool has_non_space(std::string_view s) {
  for (const auto& c : decode_utf8(s)) {
    if (!is_space(c.value)) return true;
  }
  return false;
}

std::string_view trim_right(std::string_view s) {
  const auto cps = decode_utf8(s);
  std::size_t end = cps.size();
  while (end > 0 && is_space(cps[end - 1].value)) --end;
  if (end == 0) return s.substr(0, 0);
  return s.substr(0, cps[end - 1].offset + cps[end - 1].length);
}

std::string_view trim(std::string_view s) {
  s = trim_right(s);
  const auto cps = decode_utf8(s);
  std::size_t begin = 0;
  while (begin < cps.size() && is_space(cps[begin].value)) ++begin;
  if (begin == cps.size()) return s.substr(s.size());
  return s.substr(cps[begin].offset);
}

std::vector<std::string_view> split_whitespace(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = std::string_view::npos;
  for (const auto& c : decode_utf8(s)) {
    if (is_space(c.value)) {
      if (start != std::string_view::npos) {
        out.push_back(s.substr(start, c.offset - start));
        start = std::string_view::npos;
      }
    } else if (start == std::string_view::npos) {
      start = c.offset;
    }
  }
  if (start != std::string_view::npos) out.push_back(s.substr(start));
  return out;
}

std::size_t count_code_points(std::string_view s) { return decode_utf8(s).size(); }

}  // namespace efcg::text
