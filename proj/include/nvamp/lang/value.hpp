#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace nvamp::lang {

struct ClassInfo;
struct Object;
using ObjRef = std::shared_ptr<Object>;

struct Value {
  enum class Kind { kNull, kBool, kInt, kLong, kDouble, kString, kObject };

  Kind kind = Kind::kNull;
  bool b = false;
  std::int64_t i = 0;
  double d = 0.0;
  std::string s;
  ObjRef o;

  static Value null() { return {}; }
  static Value boolean(bool v) {
    Value x;
    x.kind = Kind::kBool;
    x.b = v;
    return x;
  }
  static Value int32(std::int64_t v) {
    Value x;
    x.kind = Kind::kInt;
    x.i = static_cast<std::int32_t>(static_cast<std::uint32_t>(v));
    return x;
  }
  static Value int64(std::int64_t v) {
    Value x;
    x.kind = Kind::kLong;
    x.i = v;
    return x;
  }
  static Value dbl(double v) {
    Value x;
    x.kind = Kind::kDouble;
    x.d = v;
    return x;
  }
  static Value str(std::string v) {
    Value x;
    x.kind = Kind::kString;
    x.s = std::move(v);
    return x;
  }
  static Value object(ObjRef r) {
    Value x;
    x.kind = r ? Kind::kObject : Kind::kNull;
    x.o = std::move(r);
    return x;
  }

  bool is_null() const { return kind == Kind::kNull; }
  bool is_integral() const { return kind == Kind::kInt || kind == Kind::kLong; }
  bool is_numeric() const { return is_integral() || kind == Kind::kDouble; }
  double as_double() const { return kind == Kind::kDouble ? d : static_cast<double>(i); }
};

enum class ObjKind { kInstance, kList, kMap, kException };

struct Object {
  ObjKind kind = ObjKind::kInstance;
  const ClassInfo* cls = nullptr;  // kInstance only
  std::string type_name;           // class or exception type name
  std::vector<Value> fields;       // kInstance
  std::vector<Value> items;        // kList
  std::vector<std::pair<Value, Value>> entries;  // kMap, insertion ordered
  std::string message;             // kException
  bool has_message = false;
};

}  // namespace nvamp::lang
