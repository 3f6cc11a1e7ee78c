#include "nvamp/amplifier.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "json.hpp"
#include "nvamp/errors.hpp"
#include "nvamp/util.hpp"

namespace nvamp {

using lang::Expr;
using lang::ExprKind;

namespace {

constexpr char32_t kFirstPrintable = 0x20;
constexpr std::uint64_t kPrintableCount = 0x7E - 0x20 + 1;
constexpr std::uint64_t kMaxTdrTests = 1'000'000;

constexpr TransformKind kNumericKinds[] = {
    TransformKind::kNumPlus1, TransformKind::kNumMinus1,
    TransformKind::kNumTimes2, TransformKind::kNumDiv2};

Expr* slot_expr(Statement& s, int slot) {
  Expr* found = nullptr;
  int index = 0;
  lang::walk_own_exprs(s.node, [&](Expr& root) {
    lang::walk_exprs(root, [&](Expr& e) {
      bool literal = e.kind == ExprKind::kStringLit || e.kind == ExprKind::kIntLit ||
                     e.kind == ExprKind::kLongLit || e.kind == ExprKind::kDoubleLit ||
                     e.kind == ExprKind::kBoolLit;
      if (literal && index++ == slot) found = &e;
    });
  });
  return found;
}

Statement* find_statement(std::vector<Statement>& list, int ordinal) {
  for (auto& s : list) {
    if (s.ordinal == ordinal) return &s;
    if (Statement* c = find_statement(s.children, ordinal)) return c;
  }
  return nullptr;
}

Expr* find_slot(TestCase& t, const SlotId& id) {
  Statement* s = find_statement(t.statements, id.ordinal);
  return s ? slot_expr(*s, id.slot) : nullptr;
}

bool edit_at(std::vector<Statement>& list, int ordinal, bool duplicate) {
  for (std::size_t i = 0; i < list.size(); ++i) {
    if (list[i].ordinal == ordinal) {
      if (duplicate) {
        Statement copy = list[i];
        list.insert(list.begin() + static_cast<std::ptrdiff_t>(i) + 1, std::move(copy));
      } else {
        list.erase(list.begin() + static_cast<std::ptrdiff_t>(i));
      }
      return true;
    }
    if (edit_at(list[i].children, ordinal, duplicate)) return true;
  }
  return false;
}

std::vector<Statement> strip_list(const std::vector<Statement>& list) {
  std::vector<Statement> out;
  for (const auto& s : list) {
    if (s.kind == StatementKind::kAssertion) {
      const Expr& call = s.assertion_call();
      for (std::size_t i = 0; i < call.arg_count(); ++i) {
        const Expr& arg = call.arg(i);
        if (arg.kind != ExprKind::kCall) continue;
        Statement hoisted;
        hoisted.node = lang::Stmt::expr_stmt(arg);
        hoisted.node.loc = s.node.loc;
        hoisted.from_assertion = true;
        out.push_back(std::move(hoisted));
      }
      continue;
    }
    Statement copy = s;
    copy.children = strip_list(s.children);
    out.push_back(std::move(copy));
  }
  return out;
}

std::string unique_name(const std::string& wanted, std::set<std::string>& taken) {
  std::string name = wanted;
  while (!taken.insert(name).second) name += "_x";
  return name;
}

TestCase derive(const TestCase& parent, const TransformationDescriptor& d) {
  TestCase g = parent;
  g.generated = true;
  g.parent = parent.name;
  g.transform = d;
  g.name = parent.name + "_" + d.name_suffix();
  return g;
}

std::string string_variant(TransformKind kind, const std::string& value,
                           std::mt19937_64& rng) {
  std::vector<char32_t> cps = utf8_decode(value);
  switch (kind) {
    case TransformKind::kStrRemove:
      if (cps.empty()) return value;
      cps.erase(cps.begin() + static_cast<std::ptrdiff_t>(uniform_below(rng, cps.size())));
      break;
    case TransformKind::kStrAdd: {
      auto pos = uniform_below(rng, cps.size() + 1);
      auto c = static_cast<char32_t>(kFirstPrintable + uniform_below(rng, kPrintableCount));
      cps.insert(cps.begin() + static_cast<std::ptrdiff_t>(pos), c);
      break;
    }
    case TransformKind::kStrReplace: {
      if (cps.empty()) return value;
      auto pos = uniform_below(rng, cps.size());
      char32_t old = cps[pos];
      bool printable = old >= kFirstPrintable && old < kFirstPrintable + kPrintableCount;
      char32_t c;
      if (printable) {
        c = static_cast<char32_t>(kFirstPrintable + uniform_below(rng, kPrintableCount - 1));
        if (c >= old) ++c;
      } else {
        c = static_cast<char32_t>(kFirstPrintable + uniform_below(rng, kPrintableCount));
      }
      cps[pos] = c;
      break;
    }
    default: break;
  }
  return utf8_encode(cps);
}

}  // namespace

bool apply_numeric(TransformKind kind, const Expr& in, Expr& out) {
  out = in;
  if (in.kind == ExprKind::kDoubleLit) {
    double v = in.double_value;
    double r = v;
    switch (kind) {
      case TransformKind::kNumPlus1: r = v + 1.0; break;
      case TransformKind::kNumMinus1: r = v - 1.0; break;
      case TransformKind::kNumTimes2: r = v * 2.0; break;
      case TransformKind::kNumDiv2: r = v / 2.0; break;
      default: return false;
    }
    if (!std::isfinite(r)) return false;
    out.double_value = r;
    return true;
  }
  if (in.kind != ExprKind::kIntLit && in.kind != ExprKind::kLongLit) return false;
  std::int64_t v = in.int_value;
  std::int64_t r = 0;
  bool overflow = false;
  switch (kind) {
    case TransformKind::kNumPlus1: overflow = __builtin_add_overflow(v, 1, &r); break;
    case TransformKind::kNumMinus1: overflow = __builtin_sub_overflow(v, 1, &r); break;
    case TransformKind::kNumTimes2: overflow = __builtin_mul_overflow(v, 2, &r); break;
    case TransformKind::kNumDiv2: r = v / 2; break;
    default: return false;
  }
  if (overflow) return false;
  if (in.kind == ExprKind::kIntLit &&
      (r < std::numeric_limits<std::int32_t>::min() ||
       r > std::numeric_limits<std::int32_t>::max())) {
    return false;
  }
  out.int_value = r;
  return true;
}

std::vector<LiteralVariant> transform_literal(const LiteralSlot& slot,
                                              std::uint64_t seed, int* skipped) {
  std::vector<LiteralVariant> out;
  auto descriptor = [&](TransformKind k) {
    TransformationDescriptor d;
    d.kind = k;
    d.slot = slot.id;
    return d;
  };
  switch (slot.kind) {
    case LiteralKind::kString: {
      std::mt19937_64 rng = derive_rng(seed, slot.id.str());
      for (TransformKind k : {TransformKind::kStrRemove, TransformKind::kStrAdd,
                              TransformKind::kStrReplace}) {
        out.emplace_back(descriptor(k),
                         Expr::string_lit(string_variant(k, slot.value.text, rng)));
      }
      break;
    }
    case LiteralKind::kInteger:
    case LiteralKind::kFloat:
      for (TransformKind k : kNumericKinds) {
        Expr e;
        if (apply_numeric(k, slot.value, e)) {
          out.emplace_back(descriptor(k), std::move(e));
        } else if (skipped) {
          ++*skipped;
        }
      }
      break;
    case LiteralKind::kBoolean: {
      Expr e = slot.value;
      e.flag = !e.flag;
      out.emplace_back(descriptor(TransformKind::kBoolNegate), std::move(e));
      break;
    }
  }
  return out;
}

TestCase strip_assertions(const TestCase& test) {
  TestCase out = test;
  out.statements = strip_list(test.statements);
  renumber(out);
  return out;
}

std::vector<TestCase> transform_statements(const TestCase& test) {
  std::vector<int> targets;
  for_each_statement(test.statements, [&](const Statement& s) {
    if (s.kind != StatementKind::kAssertion) targets.push_back(s.ordinal);
  });
  std::vector<TestCase> out;
  for (int ordinal : targets) {
    for (TransformKind k : {TransformKind::kStmtRemove, TransformKind::kStmtDup}) {
      TransformationDescriptor d;
      d.kind = k;
      d.ordinal = ordinal;
      TestCase g = derive(test, d);
      edit_at(g.statements, ordinal, k == TransformKind::kStmtDup);
      renumber(g);
      out.push_back(std::move(g));
    }
  }
  return out;
}

AmplifiedSuite amplify(const TestSuite& suite, std::uint64_t seed) {
  AmplifiedSuite out;
  out.kind = AmplificationKind::kFull;
  out.seed = seed;
  out.suite.files = suite.files;
  std::set<std::string> taken;
  for (const auto& t : suite.tests) taken.insert(t.name);

  for (const auto& original : suite.tests) {
    TestCase base = strip_assertions(original);
    std::vector<TestCase> generated;
    for_each_statement(base.statements, [&](const Statement& s) {
      ++out.counts.st;
      for (const auto& slot : s.literal_slots) {
        switch (slot.kind) {
          case LiteralKind::kString: ++out.counts.s; break;
          case LiteralKind::kInteger:
          case LiteralKind::kFloat:
            ++out.counts.n;
            break;
          case LiteralKind::kBoolean: ++out.counts.b; break;
        }
        for (auto& [d, value] : transform_literal(slot, seed, &out.skipped_overflow)) {
          TestCase g = derive(base, d);
          *find_slot(g, slot.id) = std::move(value);
          generated.push_back(std::move(g));
        }
      }
    });
    for (auto& g : transform_statements(base)) generated.push_back(std::move(g));

    out.suite.tests.push_back(std::move(base));
    for (auto& g : generated) {
      g.name = unique_name(g.name, taken);
      renumber(g);
      out.suite.tests.push_back(std::move(g));
      ++out.generated_count;
    }
  }
  return out;
}

AmplifiedSuite tdr_amplify(const TestSuite& suite, int interaction_level) {
  if (interaction_level < 1) {
    throw Error(ErrorCode::kConfigError, "interaction level must be at least 1");
  }
  AmplifiedSuite out;
  out.kind = AmplificationKind::kTdr;
  out.interaction_level = interaction_level;
  out.suite.files = suite.files;
  std::set<std::string> taken;
  for (const auto& t : suite.tests) taken.insert(t.name);

  for (const auto& original : suite.tests) {
    TestCase base = strip_assertions(original);
    std::vector<SlotId> slots;
    for_each_statement(base.statements, [&](const Statement& s) {
      ++out.counts.st;
      for (const auto& slot : s.literal_slots) {
        if (slot.kind == LiteralKind::kInteger || slot.kind == LiteralKind::kFloat) {
          slots.push_back(slot.id);
          ++out.counts.n;
        }
      }
    });
    std::vector<TestCase> generated;
    const std::uint64_t choices = slots.size() * 4;
    std::uint64_t total = 0;
    std::uint64_t layer = 1;
    for (int k = 1; k <= interaction_level && choices > 0; ++k) {
      layer *= choices;
      total += layer;
      if (total > kMaxTdrTests) {
        throw Error(ErrorCode::kConfigError,
                    "interaction level too large for test " + base.name);
      }
    }
    for (int k = 1; k <= interaction_level && choices > 0; ++k) {
      std::vector<std::uint64_t> digits(k, 0);
      while (true) {
        TransformationDescriptor d;
        d.kind = TransformKind::kTdrStack;
        for (std::uint64_t digit : digits) {
          d.stack.emplace_back(slots[digit / 4], kNumericKinds[digit % 4]);
        }
        TestCase g = derive(base, d);
        bool ok = true;
        for (const auto& [id, kind] : d.stack) {
          Expr* e = find_slot(g, id);
          Expr next;
          if (!apply_numeric(kind, *e, next)) {
            ok = false;
            break;
          }
          *e = std::move(next);
        }
        if (ok) {
          generated.push_back(std::move(g));
        } else {
          ++out.skipped_overflow;
        }
        // odometer increment, last digit fastest
        int pos = k - 1;
        while (pos >= 0 && ++digits[pos] == choices) digits[pos--] = 0;
        if (pos < 0) break;
      }
    }
    out.suite.tests.push_back(std::move(base));
    for (auto& g : generated) {
      g.name = unique_name(g.name, taken);
      renumber(g);
      out.suite.tests.push_back(std::move(g));
      ++out.generated_count;
    }
  }
  return out;
}

std::string manifest_json(const AmplifiedSuite& ats) {
  nlohmann::ordered_json j;
  j["kind"] = ats.kind == AmplificationKind::kFull ? "full" : "tdr";
  if (ats.kind == AmplificationKind::kFull) {
    j["seed"] = ats.seed;
  } else {
    j["interaction_level"] = ats.interaction_level;
  }
  j["counts"] = {{"s", ats.counts.s}, {"n", ats.counts.n}, {"b", ats.counts.b},
                 {"st", ats.counts.st}};
  j["originals"] = ats.originals();
  j["generated_count"] = ats.generated_count;
  j["skipped_overflow"] = ats.skipped_overflow;
  auto& tests = j["tests"] = nlohmann::ordered_json::array();
  for (const auto& t : ats.suite.tests) {
    nlohmann::ordered_json e;
    e["name"] = t.name;
    e["file"] = ats.suite.source_origin(t);
    if (!t.generated) {
      e["original"] = true;
    } else {
      e["parent"] = t.parent;
      e["transformation"] = std::string(to_string(t.transform.kind));
      if (t.transform.kind == TransformKind::kTdrStack) {
        auto& steps = e["steps"] = nlohmann::ordered_json::array();
        for (const auto& [id, kind] : t.transform.stack) {
          steps.push_back({{"slot", id.str()}, {"kind", std::string(to_string(kind))}});
        }
      } else if (t.transform.slot) {
        e["slot"] = t.transform.slot->str();
      } else {
        e["statement"] = t.transform.ordinal;
      }
    }
    tests.push_back(std::move(e));
  }
  return j.dump(2) + "\n";
}

void write_ats(const AmplifiedSuite& ats, const std::filesystem::path& dir) {
  render_tests(ats.suite, dir / "tests");
  write_file_if_changed(dir / "manifest.json", manifest_json(ats));
}

}  // namespace nvamp
