#include "nvamp/program.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "nvamp/errors.hpp"
#include "nvamp/lang/parser.hpp"
#include "nvamp/lang/printer.hpp"
#include "nvamp/util.hpp"

namespace nvamp {

using lang::CompilationUnit;
using lang::Expr;
using lang::ExprKind;
using lang::Stmt;
using lang::StmtKind;

Program Program::load(const std::filesystem::path& src_dir, std::string id) {
  if (!std::filesystem::is_directory(src_dir)) {
    throw Error(ErrorCode::kConfigError, "no program sources at " + src_dir.string());
  }
  std::vector<std::pair<std::string, std::string>> sources;
  for (const auto& p : list_files(src_dir, ".mj")) {
    sources.emplace_back(std::filesystem::relative(p, src_dir).generic_string(), read_file(p));
  }
  return from_sources(sources, std::move(id));
}

Program Program::from_sources(const std::vector<std::pair<std::string, std::string>>& sources,
                              std::string id) {
  Program p;
  p.id = std::move(id);
  for (const auto& [path, text] : sources) p.units.push_back(lang::parse_unit(text, path));
  std::sort(p.units.begin(), p.units.end(),
            [](const auto& a, const auto& b) { return a.file < b.file; });
  return p;
}

std::string Program::digest() const {
  std::uint64_t h = fnv1a("program");
  for (const auto& u : units) {
    h = fnv1a(u.file, h);
    h = fnv1a(lang::print_unit(u), h);
  }
  return hex64(h);
}

std::vector<std::shared_ptr<const CompilationUnit>> Program::shared_units() const {
  std::vector<std::shared_ptr<const CompilationUnit>> out;
  for (const auto& u : units) out.push_back(std::make_shared<const CompilationUnit>(u));
  return out;
}

void Program::write(const std::filesystem::path& dir) const {
  for (const auto& u : units) write_file_if_changed(dir / u.file, lang::print_unit(u));
}

namespace {

struct MemberContext {
  std::size_t unit = 0;
  const lang::ClassDecl* cls = nullptr;
  const lang::Method* method = nullptr;
};

std::vector<ScopedVar> member_scope(const lang::ClassDecl& cls, const lang::Method& m) {
  std::vector<ScopedVar> scope;
  for (const auto& f : cls.fields) {
    if (f.is_static || !m.is_static) scope.push_back({f.name, f.type});
  }
  for (const auto& p : m.params) scope.push_back({p.name, p.type});
  return scope;
}

class SiteCollector {
 public:
  explicit SiteCollector(std::vector<StatementSite>& out) : out_(out) {}

  void walk(const std::vector<Stmt>& list, std::vector<ScopedVar> scope, const MemberContext& ctx) {
    for (const auto& s : list) {
      StatementSite site;
      site.id = next_++;
      site.unit = ctx.unit;
      site.cls = ctx.cls->name;
      site.method = ctx.method->is_ctor ? "<init>" : ctx.method->name;
      site.arity = ctx.method->params.size();
      site.in_static = ctx.method->is_static;
      site.return_type = ctx.method->is_ctor ? "" : ctx.method->return_type;
      site.stmt = &s;
      site.scope = scope;
      out_.push_back(std::move(site));
      switch (s.kind) {
        case StmtKind::kIf:
          walk(s.body, scope, ctx);
          walk(s.alt, scope, ctx);
          break;
        case StmtKind::kFor: {
          auto inner = scope;
          for (const auto& i : s.init) {
            if (i.kind == StmtKind::kVarDecl) inner.push_back({i.name, i.type});
          }
          walk(s.body, inner, ctx);
          break;
        }
        case StmtKind::kWhile:
        case StmtKind::kBlock:
          walk(s.body, scope, ctx);
          break;
        case StmtKind::kTry: {
          walk(s.body, scope, ctx);
          auto inner = scope;
          inner.push_back({s.name, s.type});
          walk(s.alt, inner, ctx);
          break;
        }
        default:
          break;
      }
      if (s.kind == StmtKind::kVarDecl) scope.push_back({s.name, s.type});
    }
  }

 private:
  std::vector<StatementSite>& out_;
  int next_ = 0;
};

// Numbers statements exactly like SiteCollector and stops at `target`.
class Finder {
 public:
  Finder(int target, const std::function<void(std::vector<Stmt>&, std::size_t)>& fn)
      : target_(target), fn_(fn) {}

  bool walk(std::vector<Stmt>& list) {
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (next_++ == target_) {
        fn_(list, i);
        return true;
      }
      Stmt& s = list[i];
      if (walk(s.body)) return true;
      if (walk(s.alt)) return true;
    }
    return false;
  }

 private:
  int target_;
  int next_ = 0;
  const std::function<void(std::vector<Stmt>&, std::size_t)>& fn_;
};

Stmt coverage_hit(int id) {
  return Stmt::expr_stmt(Expr::method_call(Expr::name("Coverage"), "hit", {Expr::int_lit(id)}));
}

std::vector<Stmt> inject(const std::vector<Stmt>& list, int& next) {
  std::vector<Stmt> out;
  for (const auto& s : list) {
    int id = next++;
    Stmt copy = s;
    copy.body = inject(s.body, next);
    copy.alt = inject(s.alt, next);
    out.push_back(coverage_hit(id));
    out.push_back(std::move(copy));
  }
  return out;
}

void collect_names(const Stmt& s, std::set<std::string>& declared, std::vector<std::string>& out,
                   std::set<std::string>& seen) {
  auto use = [&](const Expr& root) {
    lang::walk_exprs(root, [&](const Expr& e) {
      if (e.kind != ExprKind::kName || declared.count(e.text)) return;
      if (!e.text.empty() && std::isupper(static_cast<unsigned char>(e.text[0]))) return;
      if (seen.insert(e.text).second) out.push_back(e.text);
    });
  };
  for (const auto& i : s.init) collect_names(i, declared, out, seen);
  lang::walk_own_exprs(s, use);
  if (s.kind == StmtKind::kVarDecl) declared.insert(s.name);
  for (const auto& b : s.body) collect_names(b, declared, out, seen);
  if (s.kind == StmtKind::kTry) declared.insert(s.name);
  for (const auto& a : s.alt) collect_names(a, declared, out, seen);
}

}  // namespace

std::vector<StatementSite> statement_sites(const std::vector<CompilationUnit>& units) {
  std::vector<StatementSite> out;
  SiteCollector collector(out);
  for (std::size_t u = 0; u < units.size(); ++u) {
    for (const auto& cls : units[u].classes) {
      for (const auto& m : cls.methods) {
        collector.walk(m.body, member_scope(cls, m), MemberContext{u, &cls, &m});
      }
    }
  }
  return out;
}

bool edit_statement(std::vector<CompilationUnit>& units, int id,
                    const std::function<void(std::vector<Stmt>&, std::size_t)>& fn) {
  Finder finder(id, fn);
  for (auto& u : units) {
    for (auto& cls : u.classes) {
      for (auto& m : cls.methods) {
        if (finder.walk(m.body)) return true;
      }
    }
  }
  return false;
}

Program with_coverage(const Program& program) {
  Program out = program;
  int next = 0;
  for (auto& u : out.units) {
    for (auto& cls : u.classes) {
      for (auto& m : cls.methods) m.body = inject(m.body, next);
    }
  }
  return out;
}

std::vector<std::string> free_variables(const Stmt& s) {
  std::set<std::string> declared;
  std::set<std::string> seen;
  std::vector<std::string> out;
  collect_names(s, declared, out, seen);
  return out;
}

}  // namespace nvamp
