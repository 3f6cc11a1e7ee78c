#include "nvamp/render.hpp"

#include <cctype>
#include <cstdio>

#include "nvamp/util.hpp"

namespace nvamp {
namespace {

bool is_hex(char c) { return std::isxdigit(static_cast<unsigned char>(c)) != 0; }
bool is_lower_hex(char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
}
bool is_word(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

std::string display_double(double d) {
  std::string s = format_double(d);
  if (s.find_first_of(".eEnI") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::string escape_control(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    switch (c) {
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default:
        if (u < 0x20 || u == 0x7f) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\x%02x", u);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out;
}

std::string scrub_identity(std::string_view s) {
  std::string out;
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == '@' && i + 1 < s.size() && is_lower_hex(s[i + 1])) {
      std::size_t j = i + 1;
      while (j < s.size() && is_lower_hex(s[j])) ++j;
      out += "@ID";
      i = j;
      continue;
    }
    if (is_hex(s[i]) && (i == 0 || !is_word(s[i - 1]))) {
      std::size_t j = i;
      while (j < s.size() && is_hex(s[j])) ++j;
      std::size_t len = j - i;
      bool standalone = j == s.size() || !is_word(s[j]);
      if (standalone && len >= 8 && len <= 16) {
        out += "@ID";
        i = j;
        continue;
      }
      out.append(s.substr(i, len));
      i = j;
      continue;
    }
    out += s[i++];
  }
  return out;
}

std::string default_display(const lang::Value& v) {
  using K = lang::Value::Kind;
  switch (v.kind) {
    case K::kNull: return "null";
    case K::kBool: return v.b ? "true" : "false";
    case K::kInt:
    case K::kLong:
      return std::to_string(v.i);
    case K::kDouble: return display_double(v.d);
    case K::kString: return v.s;
    case K::kObject: break;
  }
  const lang::Object& o = *v.o;
  switch (o.kind) {
    case lang::ObjKind::kList: {
      std::string out = "[";
      for (std::size_t i = 0; i < o.items.size(); ++i) {
        if (i) out += ", ";
        out += default_display(o.items[i]);
      }
      return out + "]";
    }
    case lang::ObjKind::kMap: {
      std::string out = "{";
      for (std::size_t i = 0; i < o.entries.size(); ++i) {
        if (i) out += ", ";
        out += default_display(o.entries[i].first) + "=" +
               default_display(o.entries[i].second);
      }
      return out + "}";
    }
    case lang::ObjKind::kException:
      return o.has_message ? o.type_name + ": " + o.message : o.type_name;
    case lang::ObjKind::kInstance: break;
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "@%lx",
                static_cast<unsigned long>(
                    reinterpret_cast<std::uintptr_t>(v.o.get())));
  return o.type_name + buf;
}

std::string render_value(const lang::Value& v) {
  using K = lang::Value::Kind;
  switch (v.kind) {
    case K::kNull: return std::string(kAbsent);
    case K::kBool: return v.b ? "true" : "false";
    case K::kInt:
    case K::kLong:
      return std::to_string(v.i);
    case K::kDouble: return format_double(v.d);
    case K::kString: return escape_control(v.s);
    case K::kObject: return scrub_identity(escape_control(default_display(v)));
  }
  return std::string(kAbsent);
}

}  // namespace nvamp
