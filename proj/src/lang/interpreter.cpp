#include "nvamp/lang/interpreter.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "nvamp/errors.hpp"
#include "nvamp/render.hpp"
#include "nvamp/util.hpp"

namespace nvamp::lang {

// ---------------------------------------------------------------------------
// Linking

const Method* ClassInfo::find(const std::string& n, std::size_t arity) const {
  auto it = methods.find(n);
  if (it == methods.end()) return nullptr;
  for (const Method* m : it->second) {
    if (m->params.size() == arity) return m;
  }
  return nullptr;
}

const Method* ClassInfo::find_ctor(std::size_t arity) const {
  for (const Method* m : ctors) {
    if (m->params.size() == arity) return m;
  }
  return nullptr;
}

bool ClassInfo::imports_framework_static() const {
  for (const auto& imp : unit->imports) {
    if (!imp.is_static) continue;
    if (imp.path == "unit.Assert" && imp.wildcard) return true;
    if (imp.path.rfind("unit.Assert.", 0) == 0 && !imp.wildcard) return true;
  }
  return false;
}

bool ClassInfo::imports_framework_class() const {
  for (const auto& imp : unit->imports) {
    if (imp.is_static) continue;
    if (imp.path == "unit.Assert" && !imp.wildcard) return true;
    if (imp.path == "unit" && imp.wildcard) return true;
  }
  return false;
}

const ClassInfo* Image::find_class(const std::string& name) const {
  auto it = classes.find(name);
  return it == classes.end() ? nullptr : &it->second;
}

std::shared_ptr<const Image> link_image(
    std::vector<std::shared_ptr<const CompilationUnit>> units) {
  auto image = std::make_shared<Image>();
  image->units = std::move(units);
  for (const auto& unit : image->units) {
    for (const auto& cd : unit->classes) {
      if (image->classes.count(cd.name)) {
        throw Error(ErrorCode::kBuildError,
                    cd.loc.str() + ": duplicate class " + cd.name);
      }
      ClassInfo& ci = image->classes[cd.name];
      ci.decl = &cd;
      ci.unit = unit.get();
      ci.name = cd.name;
      for (const auto& f : cd.fields) {
        if (f.is_static) {
          ci.static_index[f.name] = static_cast<int>(ci.static_fields.size());
          ci.static_fields.push_back(&f);
        } else {
          ci.field_index[f.name] = static_cast<int>(ci.instance_fields.size());
          ci.instance_fields.push_back(&f);
        }
      }
      for (const auto& m : cd.methods) {
        if (m.is_ctor) {
          ci.ctors.push_back(&m);
        } else {
          ci.methods[m.name].push_back(&m);
        }
      }
      image->class_order.push_back(&ci);
    }
  }
  return image;
}

// ---------------------------------------------------------------------------
// Runtime support

namespace {

constexpr int kMaxDepth = 400;
constexpr std::uint64_t kDeadlineMask = 255;

struct ThrowSignal {
  Value exc;
};
struct AssertionSignal {
  std::string message;
};
struct TimeoutSignal {};
struct BrokenSignal {
  std::string message;
};

enum class Flow { kNormal, kBreak, kContinue, kReturn };

struct Var {
  std::string name;
  std::string type;
  Value v;
};

struct Frame {
  const ClassInfo* cls = nullptr;
  ObjRef self;
  std::vector<Var> vars;
  Value ret;
};

Value default_for(const std::string& type) {
  if (type == "int") return Value::int32(0);
  if (type == "long") return Value::int64(0);
  if (type == "double") return Value::dbl(0.0);
  if (type == "boolean") return Value::boolean(false);
  return Value::null();
}

std::int64_t java_d2l(double d, std::int64_t lo, std::int64_t hi) {
  if (std::isnan(d)) return 0;
  if (d <= static_cast<double>(lo)) return lo;
  if (d >= static_cast<double>(hi)) return hi;
  return static_cast<std::int64_t>(d);
}

Value coerce(const Value& v, const std::string& type) {
  if (type == "int") {
    if (v.is_integral()) return Value::int32(v.i);
    if (v.kind == Value::Kind::kDouble) {
      return Value::int32(java_d2l(v.d, std::numeric_limits<std::int32_t>::min(),
                                   std::numeric_limits<std::int32_t>::max()));
    }
  } else if (type == "long") {
    if (v.is_integral()) return Value::int64(v.i);
    if (v.kind == Value::Kind::kDouble) {
      return Value::int64(java_d2l(v.d, std::numeric_limits<std::int64_t>::min(),
                                   std::numeric_limits<std::int64_t>::max()));
    }
  } else if (type == "double") {
    if (v.is_numeric()) return Value::dbl(v.as_double());
  }
  return v;
}

Value make_exception(const std::string& type, const std::string* message) {
  auto o = std::make_shared<Object>();
  o->kind = ObjKind::kException;
  o->type_name = type;
  if (message) {
    o->message = *message;
    o->has_message = true;
  }
  return Value::object(std::move(o));
}

[[noreturn]] void throw_lang(const std::string& type, const std::string& msg) {
  throw ThrowSignal{make_exception(type, &msg)};
}

[[noreturn]] void broken(const SourceLoc& loc, const std::string& msg) {
  throw BrokenSignal{loc.str() + ": " + msg};
}

bool is_exception(const Value& v) {
  return v.kind == Value::Kind::kObject && v.o->kind == ObjKind::kException;
}

bool catches(const std::string& clause, const Value& exc) {
  if (clause == "Exception" || clause == "Throwable" ||
      clause == "RuntimeException") {
    return true;
  }
  return clause == exc.o->type_name;
}

std::string out_of_bounds(std::int64_t index, std::size_t length) {
  return "Index " + std::to_string(index) + " out of bounds for length " +
         std::to_string(length);
}

std::string index_string(const std::vector<char32_t>& cps, std::size_t b,
                         std::size_t e) {
  return utf8_encode(std::vector<char32_t>(cps.begin() + b, cps.begin() + e));
}

std::int64_t find_substring(const std::vector<char32_t>& hay,
                            const std::vector<char32_t>& needle, bool last) {
  if (needle.size() > hay.size()) return -1;
  std::int64_t found = -1;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), hay.begin() + i)) {
      found = static_cast<std::int64_t>(i);
      if (!last) return found;
    }
  }
  return found;
}

std::int64_t parse_integer(const std::string& s, std::int64_t lo,
                           std::int64_t hi) {
  std::int64_t v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (s.empty() || ec != std::errc() || p != e || v < lo || v > hi) {
    throw_lang("NumberFormatException", "For input string: \"" + s + "\"");
  }
  return v;
}

double parse_double_text(const std::string& s) {
  std::string t = s;
  while (!t.empty() && t.back() == ' ') t.pop_back();
  while (!t.empty() && t.front() == ' ') t.erase(t.begin());
  if (t == "NaN") return std::numeric_limits<double>::quiet_NaN();
  if (t == "Infinity" || t == "+Infinity") {
    return std::numeric_limits<double>::infinity();
  }
  if (t == "-Infinity") return -std::numeric_limits<double>::infinity();
  double v = 0;
  const char* b = t.data();
  const char* e = t.data() + t.size();
  if (b != e && *b == '+') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (t.empty() || ec != std::errc() || p != e) {
    throw_lang("NumberFormatException", "For input string: \"" + s + "\"");
  }
  return v;
}

std::int32_t java_string_hash(const std::string& s) {
  std::uint32_t h = 0;
  for (char32_t cp : utf8_decode(s)) h = 31 * h + static_cast<std::uint32_t>(cp);
  return static_cast<std::int32_t>(h);
}

std::int32_t identity_hash(const Object* o) {
  auto bits = reinterpret_cast<std::uintptr_t>(o);
  return static_cast<std::int32_t>(fnv1a(std::string_view(
                                       reinterpret_cast<const char*>(&bits),
                                       sizeof bits)) &
                                   0x7fffffff);
}

std::random_device& entropy() {
  thread_local std::random_device rd;
  return rd;
}

}  // namespace

std::string LangException::describe() const {
  if (!is_exception(exception)) return "exception";
  return exception.o->has_message
             ? exception.o->type_name + ": " + exception.o->message
             : exception.o->type_name;
}

// ---------------------------------------------------------------------------
// Interpreter

struct Interpreter::Impl {
  std::shared_ptr<const Image> image;
  HostEnvironment env;
  std::chrono::milliseconds timeout;
  std::chrono::steady_clock::time_point deadline;
  std::uint64_t steps = 0;
  int depth = 0;
  RunResult* out = nullptr;
  RunResult scratch;
  std::unordered_map<const ClassInfo*, std::vector<Value>> statics;
  bool statics_ready = false;

  struct DepthGuard {
    int& d;
    explicit DepthGuard(int& depth) : d(depth) {
      if (++d > kMaxDepth) {
        --d;
        throw_lang("StackOverflowError", "call depth exceeded");
      }
    }
    ~DepthGuard() { --d; }
  };

  void tick() {
    if ((++steps & kDeadlineMask) == 0 &&
        std::chrono::steady_clock::now() > deadline) {
      throw TimeoutSignal{};
    }
  }

  void arm() {
    deadline = std::chrono::steady_clock::now() + timeout;
    steps = 0;
    depth = 0;
  }

  void ensure_statics() {
    if (statics_ready) return;
    statics_ready = true;
    for (const ClassInfo* ci : image->class_order) {
      auto& slots = statics[ci];
      for (const Field* f : ci->static_fields) slots.push_back(default_for(f->type));
    }
    for (const ClassInfo* ci : image->class_order) {
      Frame frame;
      frame.cls = ci;
      for (std::size_t i = 0; i < ci->static_fields.size(); ++i) {
        const Field* f = ci->static_fields[i];
        if (!f->init.empty()) {
          statics[ci][i] = coerce(eval(f->init[0], frame), f->type);
        }
      }
    }
  }

  // --- names ---------------------------------------------------------------

  static Var* find_local(Frame& f, const std::string& name) {
    for (auto it = f.vars.rbegin(); it != f.vars.rend(); ++it) {
      if (it->name == name) return &*it;
    }
    return nullptr;
  }

  bool is_variable(Frame& f, const std::string& name) {
    if (find_local(f, name)) return true;
    if (f.cls && f.self && f.cls->field_index.count(name)) return true;
    return f.cls && f.cls->static_index.count(name);
  }

  bool names_class(Frame& f, const Expr& e) {
    if (e.kind != ExprKind::kName || is_variable(f, e.text)) return false;
    return image->find_class(e.text) || is_builtin_static_class(e.text);
  }

  // --- rendering -----------------------------------------------------------

  std::string display(const Value& v) {
    if (v.kind != Value::Kind::kObject) return default_display(v);
    const Object& o = *v.o;
    switch (o.kind) {
      case ObjKind::kList: {
        std::string s = "[";
        for (std::size_t i = 0; i < o.items.size(); ++i) {
          if (i) s += ", ";
          s += display(o.items[i]);
        }
        return s + "]";
      }
      case ObjKind::kMap: {
        std::string s = "{";
        for (std::size_t i = 0; i < o.entries.size(); ++i) {
          if (i) s += ", ";
          s += display(o.entries[i].first) + "=" + display(o.entries[i].second);
        }
        return s + "}";
      }
      case ObjKind::kException: return default_display(v);
      case ObjKind::kInstance: break;
    }
    if (o.cls) {
      if (const Method* m = o.cls->find("toString", 0)) {
        Value r = call_method(o.cls, m, v.o, {});
        return r.is_null() ? "null" : display(r);
      }
    }
    return default_display(v);
  }

  std::string render(const Value& v) {
    if (v.kind != Value::Kind::kObject) return render_value(v);
    return scrub_identity(escape_control(display(v)));
  }

  void record(const std::string& id, std::string value, bool exception) {
    out->records.push_back(ObsRecord{id, std::move(value), exception});
  }

  // --- equality ------------------------------------------------------------

  static bool op_equals(const Value& a, const Value& b) {
    if (a.is_null() || b.is_null()) return a.is_null() && b.is_null();
    if (a.is_numeric() && b.is_numeric()) {
      if (a.is_integral() && b.is_integral()) return a.i == b.i;
      return a.as_double() == b.as_double();
    }
    if (a.kind != b.kind) return false;
    switch (a.kind) {
      case Value::Kind::kBool: return a.b == b.b;
      case Value::Kind::kString: return a.s == b.s;
      case Value::Kind::kObject: return a.o == b.o;
      default: return false;
    }
  }

  // Value equality used by assertions and collections.
  bool values_equal(const Value& a, const Value& b) {
    if (a.kind == Value::Kind::kDouble || b.kind == Value::Kind::kDouble) {
      if (a.is_numeric() && b.is_numeric()) {
        double x = a.as_double();
        double y = b.as_double();
        return x == y || (std::isnan(x) && std::isnan(y));
      }
    }
    if (a.kind == Value::Kind::kObject && b.kind == Value::Kind::kObject) {
      if (a.o == b.o) return true;
      const Object& x = *a.o;
      const Object& y = *b.o;
      if (x.kind == ObjKind::kList && y.kind == ObjKind::kList) {
        if (x.items.size() != y.items.size()) return false;
        for (std::size_t i = 0; i < x.items.size(); ++i) {
          if (!values_equal(x.items[i], y.items[i])) return false;
        }
        return true;
      }
      if (x.kind == ObjKind::kInstance && x.cls) {
        if (const Method* m = x.cls->find("equals", 1)) {
          Value r = call_method(x.cls, m, a.o, {b});
          return r.kind == Value::Kind::kBool && r.b;
        }
      }
      return false;
    }
    return op_equals(a, b);
  }

  // --- arithmetic ----------------------------------------------------------

  Value arith(const std::string& op, const Value& a, const Value& b,
              const SourceLoc& loc) {
    if (op == "+" && (a.kind == Value::Kind::kString ||
                      b.kind == Value::Kind::kString)) {
      return Value::str(display(a) + display(b));
    }
    if (op == "==") return Value::boolean(op_equals(a, b));
    if (op == "!=") return Value::boolean(!op_equals(a, b));
    if (!a.is_numeric() || !b.is_numeric()) {
      if (a.is_null() || b.is_null()) throw_lang("NullPointerException", "null operand");
      broken(loc, "operator " + op + " needs numeric operands");
    }
    if (op == "<" || op == ">" || op == "<=" || op == ">=") {
      bool r;
      if (a.is_integral() && b.is_integral()) {
        r = op == "<" ? a.i < b.i : op == ">" ? a.i > b.i : op == "<=" ? a.i <= b.i : a.i >= b.i;
      } else {
        double x = a.as_double();
        double y = b.as_double();
        r = op == "<" ? x < y : op == ">" ? x > y : op == "<=" ? x <= y : x >= y;
      }
      return Value::boolean(r);
    }
    if (a.kind == Value::Kind::kDouble || b.kind == Value::Kind::kDouble) {
      double x = a.as_double();
      double y = b.as_double();
      if (op == "+") return Value::dbl(x + y);
      if (op == "-") return Value::dbl(x - y);
      if (op == "*") return Value::dbl(x * y);
      if (op == "/") return Value::dbl(x / y);
      if (op == "%") return Value::dbl(std::fmod(x, y));
      broken(loc, "unknown operator " + op);
    }
    bool wide = a.kind == Value::Kind::kLong || b.kind == Value::Kind::kLong;
    auto x = static_cast<std::uint64_t>(a.i);
    auto y = static_cast<std::uint64_t>(b.i);
    std::int64_t r;
    if (op == "+") {
      r = static_cast<std::int64_t>(x + y);
    } else if (op == "-") {
      r = static_cast<std::int64_t>(x - y);
    } else if (op == "*") {
      r = static_cast<std::int64_t>(x * y);
    } else if (op == "/" || op == "%") {
      if (b.i == 0) throw_lang("ArithmeticException", "/ by zero");
      if (b.i == -1) {
        // avoids the INT64_MIN / -1 trap; wraps like the JVM
        r = op == "/" ? static_cast<std::int64_t>(0 - x) : 0;
      } else {
        r = op == "/" ? a.i / b.i : a.i % b.i;
      }
    } else {
      broken(loc, "unknown operator " + op);
    }
    return wide ? Value::int64(r) : Value::int32(r);
  }

  static bool truthy(const Value& v, const SourceLoc& loc) {
    if (v.kind != Value::Kind::kBool) broken(loc, "condition is not boolean");
    return v.b;
  }

  // --- lvalues -------------------------------------------------------------

  Value read_lvalue(const Expr& target, Frame& f) { return eval(target, f); }

  void assign(const Expr& target, Value v, Frame& f) {
    if (target.kind == ExprKind::kName) {
      if (Var* var = find_local(f, target.text)) {
        var->v = coerce(v, var->type);
        return;
      }
      if (f.cls && f.self) {
        auto it = f.cls->field_index.find(target.text);
        if (it != f.cls->field_index.end()) {
          f.self->fields[it->second] =
              coerce(v, f.cls->instance_fields[it->second]->type);
          return;
        }
      }
      if (f.cls) {
        auto it = f.cls->static_index.find(target.text);
        if (it != f.cls->static_index.end()) {
          statics[f.cls][it->second] =
              coerce(v, f.cls->static_fields[it->second]->type);
          return;
        }
      }
      broken(target.loc, "cannot assign to " + target.text);
    }
    if (target.kind == ExprKind::kField) {
      const Expr& recv = target.kids[0];
      if (names_class(f, recv)) {
        const ClassInfo* ci = image->find_class(recv.text);
        if (ci) {
          auto it = ci->static_index.find(target.text);
          if (it != ci->static_index.end()) {
            statics[ci][it->second] =
                coerce(v, ci->static_fields[it->second]->type);
            return;
          }
        }
        broken(target.loc, "cannot assign to " + recv.text + "." + target.text);
      }
      Value obj = eval(recv, f);
      if (obj.is_null()) {
        throw_lang("NullPointerException",
                   "Cannot assign field \"" + target.text + "\" because value is null");
      }
      if (obj.kind == Value::Kind::kObject && obj.o->cls) {
        auto it = obj.o->cls->field_index.find(target.text);
        if (it != obj.o->cls->field_index.end()) {
          obj.o->fields[it->second] =
              coerce(v, obj.o->cls->instance_fields[it->second]->type);
          return;
        }
      }
      broken(target.loc, "no field " + target.text);
    }
    broken(target.loc, "expression is not assignable");
  }

  // --- statements ----------------------------------------------------------

  Flow exec_block(const std::vector<Stmt>& body, Frame& f) {
    std::size_t mark = f.vars.size();
    Flow flow = Flow::kNormal;
    for (const auto& s : body) {
      flow = exec(s, f);
      if (flow != Flow::kNormal) break;
    }
    f.vars.resize(mark);
    return flow;
  }

  Flow exec(const Stmt& s, Frame& f) {
    tick();
    switch (s.kind) {
      case StmtKind::kVarDecl: {
        Value v = s.exprs.empty() ? default_for(s.type)
                                  : coerce(eval(s.exprs[0], f), s.type);
        f.vars.push_back(Var{s.name, s.type, std::move(v)});
        return Flow::kNormal;
      }
      case StmtKind::kExpr:
        eval(s.exprs[0], f);
        return Flow::kNormal;
      case StmtKind::kIf:
        if (truthy(eval(s.exprs[0], f), s.loc)) return exec_block(s.body, f);
        return exec_block(s.alt, f);
      case StmtKind::kFor: {
        std::size_t mark = f.vars.size();
        if (!s.init.empty()) exec(s.init[0], f);
        Flow result = Flow::kNormal;
        while (true) {
          tick();
          if (!s.exprs.empty() && !truthy(eval(s.exprs[0], f), s.loc)) break;
          Flow flow = exec_block(s.body, f);
          if (flow == Flow::kBreak) break;
          if (flow == Flow::kReturn) {
            result = flow;
            break;
          }
          for (const auto& u : s.updates) eval(u, f);
        }
        f.vars.resize(mark);
        return result;
      }
      case StmtKind::kWhile:
        while (true) {
          tick();
          if (!truthy(eval(s.exprs[0], f), s.loc)) break;
          Flow flow = exec_block(s.body, f);
          if (flow == Flow::kBreak) break;
          if (flow == Flow::kReturn) return flow;
        }
        return Flow::kNormal;
      case StmtKind::kBlock: return exec_block(s.body, f);
      case StmtKind::kReturn:
        f.ret = s.exprs.empty() ? Value::null() : eval(s.exprs[0], f);
        return Flow::kReturn;
      case StmtKind::kThrow: {
        Value v = eval(s.exprs[0], f);
        if (v.is_null()) throw_lang("NullPointerException", "throw null");
        if (!is_exception(v)) broken(s.loc, "can only throw exceptions");
        throw ThrowSignal{v};
      }
      case StmtKind::kTry: {
        std::size_t mark = f.vars.size();
        try {
          return exec_block(s.body, f);
        } catch (ThrowSignal& t) {
          f.vars.resize(mark);
          if (!catches(s.type, t.exc)) throw;
          f.vars.push_back(Var{s.name, s.type, t.exc});
          Flow flow = exec_block(s.alt, f);
          f.vars.resize(mark);
          return flow;
        }
      }
      case StmtKind::kBreak: return Flow::kBreak;
      case StmtKind::kContinue: return Flow::kContinue;
    }
    return Flow::kNormal;
  }

  // --- expressions ---------------------------------------------------------

  Value eval(const Expr& e, Frame& f) {
    switch (e.kind) {
      case ExprKind::kIntLit: return Value::int32(e.int_value);
      case ExprKind::kLongLit: return Value::int64(e.int_value);
      case ExprKind::kDoubleLit: return Value::dbl(e.double_value);
      case ExprKind::kStringLit: return Value::str(e.text);
      case ExprKind::kBoolLit: return Value::boolean(e.flag);
      case ExprKind::kNullLit: return Value::null();
      case ExprKind::kThis:
        if (!f.self) broken(e.loc, "this in static context");
        return Value::object(f.self);
      case ExprKind::kName: return eval_name(e, f);
      case ExprKind::kField: return eval_field(e, f);
      case ExprKind::kCall: return eval_call(e, f);
      case ExprKind::kNew: return eval_new(e, f);
      case ExprKind::kUnary: {
        Value v = eval(e.kids[0], f);
        if (e.text == "!") return Value::boolean(!truthy(v, e.loc));
        if (v.kind == Value::Kind::kDouble) return Value::dbl(-v.d);
        if (v.kind == Value::Kind::kInt) return Value::int32(0 - static_cast<std::uint64_t>(v.i));
        if (v.kind == Value::Kind::kLong) {
          return Value::int64(static_cast<std::int64_t>(0 - static_cast<std::uint64_t>(v.i)));
        }
        if (v.is_null()) throw_lang("NullPointerException", "null operand");
        broken(e.loc, "unary minus needs a number");
      }
      case ExprKind::kBinary: {
        if (e.text == "&&") {
          return Value::boolean(truthy(eval(e.kids[0], f), e.loc) &&
                                truthy(eval(e.kids[1], f), e.loc));
        }
        if (e.text == "||") {
          return Value::boolean(truthy(eval(e.kids[0], f), e.loc) ||
                                truthy(eval(e.kids[1], f), e.loc));
        }
        Value a = eval(e.kids[0], f);
        Value b = eval(e.kids[1], f);
        return arith(e.text, a, b, e.loc);
      }
      case ExprKind::kAssign: {
        Value v;
        if (e.text == "=") {
          v = eval(e.kids[1], f);
        } else {
          Value cur = read_lvalue(e.kids[0], f);
          Value rhs = eval(e.kids[1], f);
          v = arith(e.text.substr(0, 1), cur, rhs, e.loc);
        }
        assign(e.kids[0], v, f);
        return read_lvalue(e.kids[0], f);
      }
      case ExprKind::kIncDec: {
        Value cur = read_lvalue(e.kids[0], f);
        Value next = arith(e.text == "++" ? "+" : "-", cur, Value::int32(1), e.loc);
        assign(e.kids[0], next, f);
        return e.flag ? read_lvalue(e.kids[0], f) : cur;
      }
      case ExprKind::kCast: {
        Value v = eval(e.kids[0], f);
        if (!v.is_numeric()) broken(e.loc, "cast needs a number");
        return coerce(v, e.text);
      }
    }
    broken(e.loc, "unsupported expression");
  }

  Value eval_name(const Expr& e, Frame& f) {
    if (Var* v = find_local(f, e.text)) return v->v;
    if (f.cls && f.self) {
      auto it = f.cls->field_index.find(e.text);
      if (it != f.cls->field_index.end()) return f.self->fields[it->second];
    }
    if (f.cls) {
      auto it = f.cls->static_index.find(e.text);
      if (it != f.cls->static_index.end()) return statics[f.cls][it->second];
    }
    broken(e.loc, "cannot resolve " + e.text);
  }

  Value eval_field(const Expr& e, Frame& f) {
    const Expr& recv = e.kids[0];
    if (names_class(f, recv)) {
      if (const ClassInfo* ci = image->find_class(recv.text)) {
        auto it = ci->static_index.find(e.text);
        if (it != ci->static_index.end()) return statics[ci][it->second];
        broken(e.loc, "no static field " + recv.text + "." + e.text);
      }
      return builtin_field(recv.text, e.text, e.loc);
    }
    Value obj = eval(recv, f);
    if (obj.is_null()) {
      throw_lang("NullPointerException",
                 "Cannot read field \"" + e.text + "\" because value is null");
    }
    if (obj.kind == Value::Kind::kObject && obj.o->cls) {
      auto it = obj.o->cls->field_index.find(e.text);
      if (it != obj.o->cls->field_index.end()) return obj.o->fields[it->second];
    }
    broken(e.loc, "no field " + e.text);
  }

  Value builtin_field(const std::string& cls, const std::string& name,
                      const SourceLoc& loc) {
    if (cls == "Integer") {
      if (name == "MAX_VALUE") return Value::int32(std::numeric_limits<std::int32_t>::max());
      if (name == "MIN_VALUE") return Value::int32(std::numeric_limits<std::int32_t>::min());
    } else if (cls == "Long") {
      if (name == "MAX_VALUE") return Value::int64(std::numeric_limits<std::int64_t>::max());
      if (name == "MIN_VALUE") return Value::int64(std::numeric_limits<std::int64_t>::min());
    } else if (cls == "Double") {
      if (name == "NaN") return Value::dbl(std::numeric_limits<double>::quiet_NaN());
      if (name == "POSITIVE_INFINITY") return Value::dbl(std::numeric_limits<double>::infinity());
      if (name == "NEGATIVE_INFINITY") return Value::dbl(-std::numeric_limits<double>::infinity());
    }
    broken(loc, "no static field " + cls + "." + name);
  }

  Value eval_new(const Expr& e, Frame& f) {
    std::vector<Value> args;
    for (const auto& k : e.kids) args.push_back(eval(k, f));
    if (const ClassInfo* ci = image->find_class(e.text)) {
      return instantiate(ci, args, e.loc);
    }
    const std::string& t = e.text;
    if ((t == "ArrayList" || t == "LinkedList" || t == "List") && args.empty()) {
      auto o = std::make_shared<Object>();
      o->kind = ObjKind::kList;
      o->type_name = "List";
      return Value::object(o);
    }
    if ((t == "HashMap" || t == "LinkedHashMap" || t == "Map") && args.empty()) {
      auto o = std::make_shared<Object>();
      o->kind = ObjKind::kMap;
      o->type_name = "Map";
      return Value::object(o);
    }
    if (t == "Object" && args.empty()) {
      auto o = std::make_shared<Object>();
      o->type_name = "Object";
      return Value::object(o);
    }
    if (is_exception_type(t) && args.size() <= 1) {
      if (args.empty()) return make_exception(t, nullptr);
      if (args[0].is_null()) return make_exception(t, nullptr);
      std::string msg = display(args[0]);
      return make_exception(t, &msg);
    }
    broken(e.loc, "cannot instantiate " + t);
  }

  Value instantiate(const ClassInfo* ci, const std::vector<Value>& args,
                    const SourceLoc& loc) {
    auto o = std::make_shared<Object>();
    o->cls = ci;
    o->type_name = ci->name;
    for (const Field* fd : ci->instance_fields) o->fields.push_back(default_for(fd->type));
    Frame init;
    init.cls = ci;
    init.self = o;
    for (std::size_t i = 0; i < ci->instance_fields.size(); ++i) {
      const Field* fd = ci->instance_fields[i];
      if (!fd->init.empty()) o->fields[i] = coerce(eval(fd->init[0], init), fd->type);
    }
    const Method* ctor = ci->find_ctor(args.size());
    if (ctor) {
      call_method(ci, ctor, o, args);
    } else if (!args.empty() || !ci->ctors.empty()) {
      broken(loc, "no constructor " + ci->name + "/" + std::to_string(args.size()));
    }
    return Value::object(o);
  }

  Value call_method(const ClassInfo* ci, const Method* m, ObjRef self,
                    const std::vector<Value>& args) {
    DepthGuard guard(depth);
    tick();
    if (m->has_annotation("Test")) ++out->test_invocations;
    Frame frame;
    frame.cls = ci;
    if (!m->is_static) frame.self = std::move(self);
    for (std::size_t i = 0; i < m->params.size(); ++i) {
      frame.vars.push_back(
          Var{m->params[i].name, m->params[i].type, coerce(args[i], m->params[i].type)});
    }
    exec_block(m->body, frame);
    if (m->is_ctor || m->return_type == "void") return Value::null();
    return coerce(frame.ret, m->return_type);
  }

  std::vector<Value> eval_args(const Expr& e, Frame& f) {
    std::vector<Value> args;
    for (std::size_t i = e.arg_begin(); i < e.kids.size(); ++i) {
      args.push_back(eval(e.kids[i], f));
    }
    return args;
  }

  Value eval_call(const Expr& e, Frame& f) {
    if (!e.has_receiver()) {
      if (f.cls) {
        if (const Method* m = f.cls->find(e.text, e.arg_count())) {
          std::vector<Value> args = eval_args(e, f);
          if (!m->is_static && !f.self) broken(e.loc, "instance call from static context");
          return call_method(f.cls, m, f.self, args);
        }
        if (f.cls->imports_framework_static() && is_framework_method(e.text)) {
          return call_assert(e.text, eval_args(e, f), e.loc);
        }
      }
      broken(e.loc, "cannot resolve method " + e.text);
    }
    const Expr& recv = e.receiver();
    if (names_class(f, recv)) {
      if (const ClassInfo* ci = image->find_class(recv.text)) {
        const Method* m = ci->find(e.text, e.arg_count());
        if (!m || !m->is_static) {
          broken(e.loc, "no static method " + recv.text + "." + e.text);
        }
        return call_method(ci, m, nullptr, eval_args(e, f));
      }
      if (recv.text == "Observe" && e.text == "probe") return observe_probe(e, f);
      return call_builtin_static(recv.text, e.text, eval_args(e, f), e.loc);
    }
    Value target = eval(recv, f);
    std::vector<Value> args = eval_args(e, f);
    return call_member(target, e.text, args, e.loc);
  }

  Value call_member(const Value& target, const std::string& name,
                    const std::vector<Value>& args, const SourceLoc& loc) {
    switch (target.kind) {
      case Value::Kind::kNull:
        throw_lang("NullPointerException",
                   "Cannot invoke \"" + name + "()\" because value is null");
      case Value::Kind::kString: return string_method(target.s, name, args, loc);
      case Value::Kind::kObject: break;
      default: broken(loc, "cannot call " + name + " on a primitive");
    }
    Object& o = *target.o;
    if (name == "toString" && args.empty() &&
        (o.kind == ObjKind::kList || o.kind == ObjKind::kMap)) {
      return Value::str(display(target));
    }
    switch (o.kind) {
      case ObjKind::kList: return list_method(o, name, args, loc);
      case ObjKind::kMap: return map_method(o, name, args, loc);
      case ObjKind::kException:
        if (name == "getMessage" && args.empty()) {
          return o.has_message ? Value::str(o.message) : Value::null();
        }
        if (name == "toString" && args.empty()) return Value::str(display(target));
        broken(loc, "no method " + name + " on exception");
      case ObjKind::kInstance: break;
    }
    if (o.cls) {
      if (const Method* m = o.cls->find(name, args.size())) {
        if (m->is_static) return call_method(o.cls, m, nullptr, args);
        return call_method(o.cls, m, target.o, args);
      }
    }
    if (name == "toString" && args.empty()) return Value::str(display(target));
    if (name == "hashCode" && args.empty()) return Value::int32(identity_hash(&o));
    if (name == "equals" && args.size() == 1) {
      return Value::boolean(args[0].kind == Value::Kind::kObject && args[0].o == target.o);
    }
    broken(loc, "no method " + name + "/" + std::to_string(args.size()) + " on " +
                    o.type_name);
  }

  // --- builtin members -----------------------------------------------------

  static const std::string& str_arg(const std::vector<Value>& args, std::size_t i,
                                    const SourceLoc& loc) {
    if (args[i].is_null()) throw_lang("NullPointerException", "argument is null");
    if (args[i].kind != Value::Kind::kString) broken(loc, "expected a String argument");
    return args[i].s;
  }

  static std::int64_t int_arg(const std::vector<Value>& args, std::size_t i,
                              const SourceLoc& loc) {
    if (!args[i].is_integral()) broken(loc, "expected an integer argument");
    return args[i].i;
  }

  Value string_method(const std::string& s, const std::string& name,
                      const std::vector<Value>& args, const SourceLoc& loc) {
    std::size_t n = args.size();
    if (name == "length" && n == 0) return Value::int32(utf8_decode(s).size());
    if (name == "isEmpty" && n == 0) return Value::boolean(s.empty());
    if (name == "toString" && n == 0) return Value::str(s);
    if (name == "hashCode" && n == 0) return Value::int32(java_string_hash(s));
    if (name == "charAt" && n == 1) {
      auto cps = utf8_decode(s);
      std::int64_t i = int_arg(args, 0, loc);
      if (i < 0 || i >= static_cast<std::int64_t>(cps.size())) {
        throw_lang("StringIndexOutOfBoundsException", out_of_bounds(i, cps.size()));
      }
      return Value::str(index_string(cps, i, i + 1));
    }
    if (name == "codePointAt" && n == 1) {
      auto cps = utf8_decode(s);
      std::int64_t i = int_arg(args, 0, loc);
      if (i < 0 || i >= static_cast<std::int64_t>(cps.size())) {
        throw_lang("StringIndexOutOfBoundsException", out_of_bounds(i, cps.size()));
      }
      return Value::int32(static_cast<std::int64_t>(cps[i]));
    }
    if (name == "substring" && (n == 1 || n == 2)) {
      auto cps = utf8_decode(s);
      auto len = static_cast<std::int64_t>(cps.size());
      std::int64_t b = int_arg(args, 0, loc);
      std::int64_t e = n == 2 ? int_arg(args, 1, loc) : len;
      if (b < 0 || e > len || b > e) {
        throw_lang("StringIndexOutOfBoundsException",
                   "begin " + std::to_string(b) + ", end " + std::to_string(e) +
                       ", length " + std::to_string(len));
      }
      return Value::str(index_string(cps, b, e));
    }
    if ((name == "indexOf" || name == "lastIndexOf") && n == 1) {
      return Value::int32(find_substring(utf8_decode(s), utf8_decode(str_arg(args, 0, loc)),
                                         name == "lastIndexOf"));
    }
    if (name == "contains" && n == 1) {
      return Value::boolean(s.find(str_arg(args, 0, loc)) != std::string::npos);
    }
    if (name == "startsWith" && n == 1) {
      return Value::boolean(s.rfind(str_arg(args, 0, loc), 0) == 0);
    }
    if (name == "endsWith" && n == 1) {
      const std::string& t = str_arg(args, 0, loc);
      return Value::boolean(s.size() >= t.size() &&
                            s.compare(s.size() - t.size(), t.size(), t) == 0);
    }
    if (name == "equals" && n == 1) {
      return Value::boolean(args[0].kind == Value::Kind::kString && args[0].s == s);
    }
    if (name == "compareTo" && n == 1) {
      auto a = utf8_decode(s);
      auto b = utf8_decode(str_arg(args, 0, loc));
      for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i] != b[i]) return Value::int32(static_cast<std::int64_t>(a[i]) - b[i]);
      }
      return Value::int32(static_cast<std::int64_t>(a.size()) -
                          static_cast<std::int64_t>(b.size()));
    }
    if (name == "concat" && n == 1) return Value::str(s + str_arg(args, 0, loc));
    if ((name == "toUpperCase" || name == "toLowerCase") && n == 0) {
      std::string r = s;
      for (char& c : r) {
        if (name == "toUpperCase" && c >= 'a' && c <= 'z') c = static_cast<char>(c - 32);
        if (name == "toLowerCase" && c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
      }
      return Value::str(r);
    }
    if (name == "trim" && n == 0) {
      std::size_t b = 0;
      std::size_t e = s.size();
      while (b < e && static_cast<unsigned char>(s[b]) <= ' ') ++b;
      while (e > b && static_cast<unsigned char>(s[e - 1]) <= ' ') --e;
      return Value::str(s.substr(b, e - b));
    }
    if (name == "replace" && n == 2) {
      const std::string& from = str_arg(args, 0, loc);
      const std::string& to = str_arg(args, 1, loc);
      if (from.empty()) broken(loc, "replace with empty target");
      std::string r;
      std::size_t pos = 0;
      while (true) {
        std::size_t hit = s.find(from, pos);
        if (hit == std::string::npos) break;
        r.append(s, pos, hit - pos);
        r += to;
        pos = hit + from.size();
      }
      r.append(s, pos, std::string::npos);
      return Value::str(r);
    }
    broken(loc, "no method String." + name + "/" + std::to_string(n));
  }

  Value list_method(Object& o, const std::string& name,
                    const std::vector<Value>& args, const SourceLoc& loc) {
    std::size_t n = args.size();
    auto size = o.items.size();
    auto check = [&](std::int64_t i) {
      if (i < 0 || i >= static_cast<std::int64_t>(size)) {
        throw_lang("IndexOutOfBoundsException", out_of_bounds(i, size));
      }
      return static_cast<std::size_t>(i);
    };
    if (name == "add" && n == 1) {
      o.items.push_back(args[0]);
      return Value::boolean(true);
    }
    if (name == "get" && n == 1) return o.items[check(int_arg(args, 0, loc))];
    if (name == "set" && n == 2) {
      std::size_t i = check(int_arg(args, 0, loc));
      Value old = o.items[i];
      o.items[i] = args[1];
      return old;
    }
    if (name == "size" && n == 0) return Value::int32(size);
    if (name == "isEmpty" && n == 0) return Value::boolean(size == 0);
    if (name == "remove" && n == 1) {
      std::size_t i = check(int_arg(args, 0, loc));
      Value old = o.items[i];
      o.items.erase(o.items.begin() + i);
      return old;
    }
    if ((name == "contains" || name == "indexOf") && n == 1) {
      std::int64_t found = -1;
      for (std::size_t i = 0; i < size; ++i) {
        if (values_equal(o.items[i], args[0])) {
          found = static_cast<std::int64_t>(i);
          break;
        }
      }
      if (name == "contains") return Value::boolean(found >= 0);
      return Value::int32(found);
    }
    if (name == "clear" && n == 0) {
      o.items.clear();
      return Value::null();
    }
    broken(loc, "no method List." + name + "/" + std::to_string(n));
  }

  Value map_method(Object& o, const std::string& name,
                   const std::vector<Value>& args, const SourceLoc& loc) {
    std::size_t n = args.size();
    auto find = [&](const Value& k) -> std::ptrdiff_t {
      for (std::size_t i = 0; i < o.entries.size(); ++i) {
        if (values_equal(o.entries[i].first, k)) return static_cast<std::ptrdiff_t>(i);
      }
      return -1;
    };
    if (name == "put" && n == 2) {
      auto i = find(args[0]);
      if (i < 0) {
        o.entries.emplace_back(args[0], args[1]);
        return Value::null();
      }
      Value old = o.entries[i].second;
      o.entries[i].second = args[1];
      return old;
    }
    if (name == "get" && n == 1) {
      auto i = find(args[0]);
      return i < 0 ? Value::null() : o.entries[i].second;
    }
    if (name == "containsKey" && n == 1) return Value::boolean(find(args[0]) >= 0);
    if (name == "remove" && n == 1) {
      auto i = find(args[0]);
      if (i < 0) return Value::null();
      Value old = o.entries[i].second;
      o.entries.erase(o.entries.begin() + i);
      return old;
    }
    if (name == "size" && n == 0) return Value::int32(o.entries.size());
    if (name == "isEmpty" && n == 0) return Value::boolean(o.entries.empty());
    if ((name == "keys" || name == "values") && n == 0) {
      auto l = std::make_shared<Object>();
      l->kind = ObjKind::kList;
      l->type_name = "List";
      for (const auto& [k, v] : o.entries) l->items.push_back(name == "keys" ? k : v);
      return Value::object(l);
    }
    if (name == "clear" && n == 0) {
      o.entries.clear();
      return Value::null();
    }
    broken(loc, "no method Map." + name + "/" + std::to_string(n));
  }

  // --- builtin statics -----------------------------------------------------

  const std::filesystem::path& visible_root() const {
    return env.visible_workdir.empty() ? env.workdir : env.visible_workdir;
  }

  std::filesystem::path sandbox_path(const std::string& rel) {
    std::filesystem::path p(rel);
    if (rel.empty() || p.is_absolute()) {
      throw_lang("SecurityException", "path escapes working directory: " + rel);
    }
    for (const auto& part : p) {
      if (part == "..") {
        throw_lang("SecurityException", "path escapes working directory: " + rel);
      }
    }
    return env.workdir / p;
  }

  Value call_builtin_static(const std::string& cls, const std::string& m,
                            const std::vector<Value>& args, const SourceLoc& loc) {
    std::size_t n = args.size();
    auto num = [&](std::size_t i) -> const Value& {
      if (!args[i].is_numeric()) {
        if (args[i].is_null()) throw_lang("NullPointerException", "argument is null");
        broken(loc, "expected a numeric argument");
      }
      return args[i];
    };
    if (cls == "Math") {
      if (m == "abs" && n == 1) {
        const Value& v = num(0);
        if (v.kind == Value::Kind::kDouble) return Value::dbl(std::fabs(v.d));
        Value neg = arith("-", v.kind == Value::Kind::kLong ? Value::int64(0) : Value::int32(0),
                          v, loc);
        return v.i < 0 ? neg : v;
      }
      if ((m == "max" || m == "min") && n == 2) {
        const Value& a = num(0);
        const Value& b = num(1);
        if (a.kind == Value::Kind::kDouble || b.kind == Value::Kind::kDouble) {
          double x = a.as_double();
          double y = b.as_double();
          if (std::isnan(x) || std::isnan(y)) return Value::dbl(std::nan(""));
          return Value::dbl(m == "max" ? std::max(x, y) : std::min(x, y));
        }
        std::int64_t r = m == "max" ? std::max(a.i, b.i) : std::min(a.i, b.i);
        bool wide = a.kind == Value::Kind::kLong || b.kind == Value::Kind::kLong;
        return wide ? Value::int64(r) : Value::int32(r);
      }
      if (m == "sqrt" && n == 1) return Value::dbl(std::sqrt(num(0).as_double()));
      if (m == "pow" && n == 2) return Value::dbl(std::pow(num(0).as_double(), num(1).as_double()));
      if (m == "floor" && n == 1) return Value::dbl(std::floor(num(0).as_double()));
      if (m == "ceil" && n == 1) return Value::dbl(std::ceil(num(0).as_double()));
      if (m == "round" && n == 1) {
        return Value::int64(java_d2l(std::floor(num(0).as_double() + 0.5),
                                     std::numeric_limits<std::int64_t>::min(),
                                     std::numeric_limits<std::int64_t>::max()));
      }
    } else if (cls == "Integer") {
      if ((m == "parseInt" || m == "valueOf") && n == 1) {
        return Value::int32(parse_integer(str_arg(args, 0, loc),
                                          std::numeric_limits<std::int32_t>::min(),
                                          std::numeric_limits<std::int32_t>::max()));
      }
      if (m == "toString" && n == 1) return Value::str(display(num(0)));
      if (m == "compare" && n == 2) {
        std::int64_t a = num(0).i;
        std::int64_t b = num(1).i;
        return Value::int32(a < b ? -1 : (a > b ? 1 : 0));
      }
    } else if (cls == "Long") {
      if (m == "parseLong" && n == 1) {
        return Value::int64(parse_integer(str_arg(args, 0, loc),
                                          std::numeric_limits<std::int64_t>::min(),
                                          std::numeric_limits<std::int64_t>::max()));
      }
      if (m == "toString" && n == 1) return Value::str(display(num(0)));
    } else if (cls == "Double") {
      if (m == "parseDouble" && n == 1) return Value::dbl(parse_double_text(str_arg(args, 0, loc)));
      if (m == "isNaN" && n == 1) return Value::boolean(std::isnan(num(0).as_double()));
      if (m == "isInfinite" && n == 1) return Value::boolean(std::isinf(num(0).as_double()));
      if (m == "toString" && n == 1) return Value::str(display(Value::dbl(num(0).as_double())));
    } else if (cls == "String") {
      if (m == "valueOf" && n == 1) return Value::str(display(args[0]));
    } else if (cls == "System") {
      if (m == "nanoTime") {
        return Value::int64(std::chrono::duration_cast<std::chrono::nanoseconds>(
                                std::chrono::steady_clock::now().time_since_epoch())
                                .count());
      }
      if (m == "currentTimeMillis") {
        return Value::int64(std::chrono::duration_cast<std::chrono::milliseconds>(
                                std::chrono::system_clock::now().time_since_epoch())
                                .count());
      }
      if (m == "randomInt") {
        auto r = static_cast<std::int32_t>(entropy()());
        if (n == 0) return Value::int32(r);
        std::int64_t bound = int_arg(args, 0, loc);
        if (bound <= 0) throw_lang("IllegalArgumentException", "bound must be positive");
        return Value::int32(static_cast<std::uint32_t>(r) % bound);
      }
      if (m == "cwd") return Value::str(visible_root().string());
      if (m == "getenv" && n == 1) {
        auto it = env.vars.find(str_arg(args, 0, loc));
        return it == env.vars.end() ? Value::null() : Value::str(it->second);
      }
      if (m == "locale") return Value::str(env.locale);
      if (m == "timezone") return Value::str(env.timezone);
      if (m == "identityHashCode" && n == 1) {
        if (args[0].kind != Value::Kind::kObject) return Value::int32(0);
        return Value::int32(identity_hash(args[0].o.get()));
      }
    } else if (cls == "Files") {
      if (m == "write" && n == 2) {
        auto p = sandbox_path(str_arg(args, 0, loc));
        try {
          write_file(p, display(args[1]));
        } catch (const Error& err) {
          throw_lang("IOException", err.detail());
        }
        return Value::null();
      }
      if (m == "read" && n == 1) {
        const std::string& rel = str_arg(args, 0, loc);
        auto p = sandbox_path(rel);
        std::error_code ec;
        if (!std::filesystem::is_regular_file(p, ec)) {
          throw_lang("FileNotFoundException", rel + " (No such file or directory)");
        }
        return Value::str(read_file(p));
      }
      if (m == "exists" && n == 1) {
        std::error_code ec;
        return Value::boolean(std::filesystem::exists(sandbox_path(str_arg(args, 0, loc)), ec));
      }
      if (m == "delete" && n == 1) {
        std::error_code ec;
        return Value::boolean(std::filesystem::remove(sandbox_path(str_arg(args, 0, loc)), ec));
      }
      if (m == "absolutePath" && n == 1) {
        const std::string& rel = str_arg(args, 0, loc);
        sandbox_path(rel);
        return Value::str((visible_root() / rel).lexically_normal().string());
      }
    } else if (cls == "Observe") {
      if (n == 2) {
        const std::string& id = str_arg(args, 0, loc);
        if (m == "value" || m == "render") {
          record(id, render(args[1]), false);
          return Value::null();
        }
        if (m == "exception") {
          const Value& ex = args[1];
          std::string text = std::string(kAbsent);
          if (is_exception(ex) && ex.o->has_message) text = escape_control(ex.o->message);
          record(id, text, true);
          return Value::null();
        }
      }
    } else if (cls == "Coverage") {
      if (m == "hit" && n == 1) {
        out->coverage.insert(static_cast<int>(int_arg(args, 0, loc)));
        return Value::null();
      }
    } else if (cls == "Assert") {
      return call_assert(m, args, loc);
    }
    broken(loc, "no method " + cls + "." + m + "/" + std::to_string(n));
  }

  Value observe_probe(const Expr& e, Frame& f) {
    if (e.arg_count() != 2) broken(e.loc, "Observe.probe takes 2 arguments");
    Value id = eval(e.arg(0), f);
    if (id.kind != Value::Kind::kString) broken(e.loc, "point id must be a String");
    std::string text;
    try {
      text = render(eval(e.arg(1), f));
    } catch (ThrowSignal& t) {
      text = "<throws: " + escape_control(LangException{t.exc}.describe()) + ">";
    }
    record(id.s, std::move(text), false);
    return Value::null();
  }

  Value call_assert(const std::string& m, const std::vector<Value>& args,
                    const SourceLoc& loc) {
    ++out->assertions;
    std::size_t n = args.size();
    auto message = [&](std::size_t arity) -> std::string {
      if (n == arity + 1 && args[0].kind == Value::Kind::kString) return args[0].s + " ";
      return "";
    };
    auto fail = [&](const std::string& why) -> Value { throw AssertionSignal{why}; };
    if (m == "fail") {
      return fail(n == 1 ? display(args[0]) : "fail");
    }
    if (m == "assertTrue" || m == "assertFalse") {
      const Value& v = args[n - 1];
      if (v.kind != Value::Kind::kBool) broken(loc, m + " needs a boolean");
      if (v.b != (m == "assertTrue")) return fail(message(1) + "expected " + (m == "assertTrue" ? "true" : "false"));
      return Value::null();
    }
    if (m == "assertNull" || m == "assertNotNull") {
      bool is_null = args[n - 1].is_null();
      if (is_null != (m == "assertNull")) {
        return fail(message(1) + (is_null ? "expected non-null" : "expected null but was:<" + display(args[n - 1]) + ">"));
      }
      return Value::null();
    }
    if (m == "assertEquals" || m == "assertNotEquals" || m == "assertSame" ||
        m == "assertNotSame") {
      // (expected, actual), (message, expected, actual) or
      // (expected, actual, delta) for numbers
      std::size_t base = 0;
      double delta = -1;
      if (n == 3) {
        if (args[0].kind == Value::Kind::kString || args[0].is_null()) {
          base = 1;
        } else if (args[2].is_numeric()) {
          delta = args[2].as_double();
        } else {
          base = 1;
        }
      }
      const Value& expected = args[base];
      const Value& actual = args[base + 1];
      bool eq;
      if (m == "assertSame" || m == "assertNotSame") {
        eq = op_equals(expected, actual);
      } else if (delta >= 0 && expected.is_numeric() && actual.is_numeric()) {
        eq = std::fabs(expected.as_double() - actual.as_double()) <= delta;
      } else {
        eq = values_equal(expected, actual);
      }
      bool want = m == "assertEquals" || m == "assertSame";
      if (eq != want) {
        std::string prefix = base ? display(args[0]) + " " : "";
        return fail(prefix + "expected:<" + display(expected) + "> but was:<" +
                    display(actual) + ">");
      }
      return Value::null();
    }
    broken(loc, "no assertion " + m);
  }

  // --- entry points --------------------------------------------------------

  const ClassInfo* require_class(const std::string& name) {
    const ClassInfo* ci = image->find_class(name);
    if (!ci) throw Error(ErrorCode::kExecutionError, "unknown class " + name);
    return ci;
  }

  template <typename Fn>
  Value guarded(Fn&& fn) {
    out = &scratch;
    scratch = RunResult{};
    arm();
    try {
      ensure_statics();
      return fn();
    } catch (ThrowSignal& t) {
      throw LangException{t.exc};
    } catch (AssertionSignal& a) {
      throw LangException{make_exception("AssertionError", &a.message)};
    } catch (TimeoutSignal&) {
      throw Error(ErrorCode::kExecutionError, "timeout");
    } catch (BrokenSignal& b) {
      throw Error(ErrorCode::kBuildError, b.message);
    }
  }
};

Interpreter::Interpreter(std::shared_ptr<const Image> image, HostEnvironment env,
                         std::chrono::milliseconds timeout)
    : impl_(std::make_unique<Impl>()) {
  impl_->image = std::move(image);
  impl_->env = std::move(env);
  impl_->timeout = timeout;
}

Interpreter::~Interpreter() = default;

RunResult Interpreter::run_test(const std::string& cls, const std::string& method) {
  Impl& im = *impl_;
  RunResult result;
  im.out = &result;
  im.arm();
  try {
    const ClassInfo* ci = im.require_class(cls);
    const Method* m = ci->find(method, 0);
    if (!m) throw Error(ErrorCode::kExecutionError, "unknown test " + cls + "." + method);
    im.ensure_statics();
    Value self = im.instantiate(ci, {}, m->loc);
    im.call_method(ci, m, m->is_static ? nullptr : self.o, {});
  } catch (ThrowSignal& t) {
    result.status = RunResult::Status::kFailed;
    result.failure = "uncaught " + LangException{t.exc}.describe();
  } catch (AssertionSignal& a) {
    result.status = RunResult::Status::kFailed;
    result.failure = a.message;
  } catch (TimeoutSignal&) {
    result.status = RunResult::Status::kTimeout;
    result.failure = "timeout";
  } catch (BrokenSignal& b) {
    result.status = RunResult::Status::kBroken;
    result.failure = b.message;
  }
  im.out = nullptr;
  return result;
}

Value Interpreter::construct(const std::string& cls, const std::vector<Value>& args) {
  Impl& im = *impl_;
  return im.guarded([&] {
    return im.instantiate(im.require_class(cls), args, SourceLoc{});
  });
}

Value Interpreter::invoke(const Value& receiver, const std::string& method,
                          const std::vector<Value>& args) {
  Impl& im = *impl_;
  return im.guarded([&] { return im.call_member(receiver, method, args, SourceLoc{}); });
}

Value Interpreter::invoke_static(const std::string& cls, const std::string& method,
                                 const std::vector<Value>& args) {
  Impl& im = *impl_;
  return im.guarded([&] {
    const ClassInfo* ci = im.require_class(cls);
    const Method* m = ci->find(method, args.size());
    if (!m || !m->is_static) {
      throw Error(ErrorCode::kExecutionError, "unknown static method " + cls + "." + method);
    }
    return im.call_method(ci, m, nullptr, args);
  });
}

std::string Interpreter::render(const Value& v) {
  Impl& im = *impl_;
  std::string text;
  im.guarded([&] {
    text = im.render(v);
    return Value::null();
  });
  return text;
}

}  // namespace nvamp::lang
