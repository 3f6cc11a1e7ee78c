// Signature tables for the builtin library. The interpreter implements the
// behavior; the static checker consults these tables to reject unknown calls.

#include <map>
#include <set>
#include <string>

#include "nvamp/lang/interpreter.hpp"

namespace nvamp::lang {
namespace {

using Sigs = std::map<std::string, std::set<std::size_t>>;

const std::map<std::string, Sigs>& static_methods() {
  static const std::map<std::string, Sigs> table = {
      {"Math",
       {{"abs", {1}}, {"max", {2}}, {"min", {2}}, {"sqrt", {1}}, {"pow", {2}},
        {"floor", {1}}, {"ceil", {1}}, {"round", {1}}}},
      {"Integer",
       {{"parseInt", {1}}, {"valueOf", {1}}, {"toString", {1}},
        {"compare", {2}}}},
      {"Long", {{"parseLong", {1}}, {"toString", {1}}}},
      {"Double",
       {{"parseDouble", {1}}, {"isNaN", {1}}, {"isInfinite", {1}},
        {"toString", {1}}}},
      {"String", {{"valueOf", {1}}}},
      {"System",
       {{"nanoTime", {0}}, {"currentTimeMillis", {0}}, {"randomInt", {0, 1}},
        {"cwd", {0}}, {"getenv", {1}}, {"locale", {0}}, {"timezone", {0}},
        {"identityHashCode", {1}}}},
      {"Files",
       {{"write", {2}}, {"read", {1}}, {"exists", {1}}, {"delete", {1}},
        {"absolutePath", {1}}}},
      {"Observe",
       {{"value", {2}}, {"probe", {2}}, {"render", {2}}, {"exception", {2}}}},
      {"Coverage", {{"hit", {1}}}},
      {"Assert",
       {{"assertEquals", {2, 3}}, {"assertNotEquals", {2, 3}},
        {"assertTrue", {1, 2}}, {"assertFalse", {1, 2}}, {"assertNull", {1, 2}},
        {"assertNotNull", {1, 2}}, {"assertSame", {2, 3}},
        {"assertNotSame", {2, 3}}, {"fail", {0, 1}}}},
  };
  return table;
}

const std::map<std::string, std::set<std::string>>& static_fields() {
  static const std::map<std::string, std::set<std::string>> table = {
      {"Integer", {"MAX_VALUE", "MIN_VALUE"}},
      {"Long", {"MAX_VALUE", "MIN_VALUE"}},
      {"Double", {"NaN", "POSITIVE_INFINITY", "NEGATIVE_INFINITY"}},
  };
  return table;
}

struct MemberSig {
  std::set<std::size_t> arities;
  std::string returns;
};

const std::map<std::string, std::map<std::string, MemberSig>>& members() {
  static const std::map<std::string, std::map<std::string, MemberSig>> table = {
      {"String",
       {{"length", {{0}, "int"}},
        {"charAt", {{1}, "String"}},
        {"substring", {{1, 2}, "String"}},
        {"indexOf", {{1}, "int"}},
        {"lastIndexOf", {{1}, "int"}},
        {"contains", {{1}, "boolean"}},
        {"startsWith", {{1}, "boolean"}},
        {"endsWith", {{1}, "boolean"}},
        {"isEmpty", {{0}, "boolean"}},
        {"equals", {{1}, "boolean"}},
        {"compareTo", {{1}, "int"}},
        {"concat", {{1}, "String"}},
        {"toUpperCase", {{0}, "String"}},
        {"toLowerCase", {{0}, "String"}},
        {"trim", {{0}, "String"}},
        {"replace", {{2}, "String"}},
        {"hashCode", {{0}, "int"}},
        {"codePointAt", {{1}, "int"}},
        {"toString", {{0}, "String"}}}},
      {"List",
       {{"add", {{1}, "boolean"}},
        {"get", {{1}, "Object"}},
        {"set", {{2}, "Object"}},
        {"size", {{0}, "int"}},
        {"isEmpty", {{0}, "boolean"}},
        {"remove", {{1}, "Object"}},
        {"contains", {{1}, "boolean"}},
        {"indexOf", {{1}, "int"}},
        {"clear", {{0}, "void"}},
        {"toString", {{0}, "String"}}}},
      {"Map",
       {{"put", {{2}, "Object"}},
        {"get", {{1}, "Object"}},
        {"containsKey", {{1}, "boolean"}},
        {"remove", {{1}, "Object"}},
        {"size", {{0}, "int"}},
        {"isEmpty", {{0}, "boolean"}},
        {"keys", {{0}, "List"}},
        {"values", {{0}, "List"}},
        {"clear", {{0}, "void"}},
        {"toString", {{0}, "String"}}}},
      {"Exception",
       {{"getMessage", {{0}, "String"}}, {"toString", {{0}, "String"}}}},
  };
  return table;
}

std::string member_table_key(const std::string& type) {
  if (type == "ArrayList" || type == "LinkedList") return "List";
  if (type == "HashMap" || type == "LinkedHashMap") return "Map";
  if (is_exception_type(type)) return "Exception";
  return type;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

bool is_builtin_static_class(const std::string& name) {
  return static_methods().count(name) > 0;
}

bool builtin_static_method(const std::string& cls, const std::string& method,
                           std::size_t arity) {
  auto c = static_methods().find(cls);
  if (c == static_methods().end()) return false;
  auto m = c->second.find(method);
  return m != c->second.end() && m->second.count(arity) > 0;
}

bool builtin_static_field(const std::string& cls, const std::string& field) {
  auto c = static_fields().find(cls);
  return c != static_fields().end() && c->second.count(field) > 0;
}

bool is_builtin_type(const std::string& name) {
  static const std::set<std::string> types = {
      "int",  "long",      "double",  "boolean",       "void",
      "String", "Object",  "List",    "ArrayList",     "LinkedList",
      "Map",  "HashMap",   "LinkedHashMap"};
  return types.count(name) > 0 || is_exception_type(name);
}

bool builtin_member_method(const std::string& type, const std::string& method,
                           std::size_t arity) {
  auto t = members().find(member_table_key(type));
  if (t == members().end()) return false;
  auto m = t->second.find(method);
  return m != t->second.end() && m->second.arities.count(arity) > 0;
}

std::string builtin_member_return(const std::string& type,
                                  const std::string& method) {
  auto t = members().find(member_table_key(type));
  if (t == members().end()) return "";
  auto m = t->second.find(method);
  return m == t->second.end() ? "" : m->second.returns;
}

bool is_exception_type(const std::string& name) {
  return name == "Throwable" || ends_with(name, "Exception") ||
         ends_with(name, "Error");
}

bool is_framework_method(const std::string& method) {
  return static_methods().at("Assert").count(method) > 0;
}

}  // namespace nvamp::lang
