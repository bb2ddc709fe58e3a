#include "monofuzz/type_expr.hpp"

#include <algorithm>
#include <cctype>

namespace monofuzz {

struct TypeExpr::Node {
  Kind kind;
  std::string name;
  Decoration decoration = Decoration::SharedBorrow;
  std::vector<TypeExpr> args;  // Decorated: exactly one element, the inner type
  std::size_t hash = 0;
  bool has_params = false;
};

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::string_view decoration_name(Decoration d) {
  switch (d) {
    case Decoration::SharedBorrow: return "shared-borrow";
    case Decoration::ExclusiveBorrow: return "exclusive-borrow";
    case Decoration::ConstRaw: return "const-raw-address";
    case Decoration::MutRaw: return "mut-raw-address";
  }
  return "?";
}

Decoration decoration_from_name(std::string_view name) {
  for (auto d : {Decoration::SharedBorrow, Decoration::ExclusiveBorrow, Decoration::ConstRaw,
                 Decoration::MutRaw}) {
    if (decoration_name(d) == name) return d;
  }
  throw std::invalid_argument("unknown decoration '" + std::string(name) + "'");
}

TypeExpr TypeExpr::prim(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Primitive;
  n->hash = mix(1, std::hash<std::string>{}(name));
  n->name = std::move(name);
  return TypeExpr(std::move(n));
}

TypeExpr TypeExpr::con(std::string name, std::vector<TypeExpr> args) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Concrete;
  std::size_t h = mix(2, std::hash<std::string>{}(name));
  for (const auto& a : args) {
    h = mix(h, a.hash());
    n->has_params = n->has_params || a.has_params();
  }
  n->hash = h;
  n->name = std::move(name);
  n->args = std::move(args);
  return TypeExpr(std::move(n));
}

TypeExpr TypeExpr::param(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Param;
  n->hash = mix(3, std::hash<std::string>{}(name));
  n->has_params = true;
  n->name = std::move(name);
  return TypeExpr(std::move(n));
}

TypeExpr TypeExpr::deco(Decoration d, TypeExpr inner) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Decorated;
  n->decoration = d;
  n->hash = mix(mix(4, static_cast<std::size_t>(d)), inner.hash());
  n->has_params = inner.has_params();
  n->args.push_back(std::move(inner));
  return TypeExpr(std::move(n));
}

TypeExpr::Kind TypeExpr::kind() const { return node_->kind; }
const std::string& TypeExpr::name() const { return node_->name; }

std::span<const TypeExpr> TypeExpr::args() const {
  if (node_->kind != Kind::Concrete) return {};
  return node_->args;
}

Decoration TypeExpr::decoration() const { return node_->decoration; }

const TypeExpr& TypeExpr::inner() const {
  if (node_->kind != Kind::Decorated) throw std::logic_error("inner() on undecorated type");
  return node_->args.front();
}

bool TypeExpr::has_params() const { return node_->has_params; }
std::size_t TypeExpr::hash() const { return node_->hash; }

std::string TypeExpr::str() const {
  switch (kind()) {
    case Kind::Primitive:
    case Kind::Param:
      return name();
    case Kind::Concrete: {
      if (node_->args.empty()) return name();
      std::string s = name() + "<";
      for (std::size_t i = 0; i < node_->args.size(); ++i) {
        if (i) s += ", ";
        s += node_->args[i].str();
      }
      return s + ">";
    }
    case Kind::Decorated:
      switch (decoration()) {
        case Decoration::SharedBorrow: return "&" + inner().str();
        case Decoration::ExclusiveBorrow: return "&mut " + inner().str();
        case Decoration::ConstRaw: return "*const " + inner().str();
        case Decoration::MutRaw: return "*mut " + inner().str();
      }
  }
  return "?";
}

bool operator==(const TypeExpr& a, const TypeExpr& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash()) return false;
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const TypeExpr& a, const TypeExpr& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (auto c = x.kind <=> y.kind; c != 0) return c;
  if (x.kind == TypeExpr::Kind::Decorated) {
    if (auto c = x.decoration <=> y.decoration; c != 0) return c;
  } else if (auto c = x.name <=> y.name; c != 0) {
    return c;
  }
  return std::lexicographical_compare_three_way(x.args.begin(), x.args.end(), y.args.begin(),
                                                y.args.end());
}

int type_depth(const TypeExpr& t) {
  switch (t.kind()) {
    case TypeExpr::Kind::Param:
      throw std::logic_error("type_depth: parameter '" + t.name() + "' in concrete type");
    case TypeExpr::Kind::Primitive:
      return 1;
    case TypeExpr::Kind::Decorated:
      return type_depth(t.inner());
    case TypeExpr::Kind::Concrete: {
      int d = 0;
      for (const auto& a : t.args()) d = std::max(d, type_depth(a));
      return d + 1;
    }
  }
  return 1;
}

void collect_params(const TypeExpr& t, std::vector<std::string>& out) {
  if (!t.has_params()) return;
  switch (t.kind()) {
    case TypeExpr::Kind::Param:
      if (std::find(out.begin(), out.end(), t.name()) == out.end()) out.push_back(t.name());
      return;
    case TypeExpr::Kind::Decorated:
      collect_params(t.inner(), out);
      return;
    case TypeExpr::Kind::Concrete:
      for (const auto& a : t.args()) collect_params(a, out);
      return;
    case TypeExpr::Kind::Primitive:
      return;
  }
}

bool mentions_param(const TypeExpr& t, std::string_view param) {
  if (!t.has_params()) return false;
  switch (t.kind()) {
    case TypeExpr::Kind::Param: return t.name() == param;
    case TypeExpr::Kind::Decorated: return mentions_param(t.inner(), param);
    case TypeExpr::Kind::Concrete:
      return std::any_of(t.args().begin(), t.args().end(),
                         [&](const TypeExpr& a) { return mentions_param(a, param); });
    case TypeExpr::Kind::Primitive: return false;
  }
  return false;
}

namespace {

class TypeParser {
 public:
  TypeParser(std::string_view text, std::span<const std::string> prims,
             std::span<const std::string> params)
      : text_(text), prims_(prims), params_(params) {}

  TypeExpr parse_all() {
    TypeExpr t = parse();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing input");
    return t;
  }

 private:
  TypeExpr parse() {
    skip_ws();
    // Primitive names such as "&str" or "&[u8]" win over decoration syntax.
    std::size_t best = 0;
    const std::string* best_prim = nullptr;
    for (const auto& p : prims_) {
      if (p.size() > best && text_.substr(pos_, p.size()) == p &&
          !ident_char_at(pos_ + p.size(), p)) {
        best = p.size();
        best_prim = &p;
      }
    }
    if (best_prim) {
      pos_ += best;
      return TypeExpr::prim(*best_prim);
    }
    if (consume("&")) {
      skip_ws();
      if (consume_word("mut")) return TypeExpr::deco(Decoration::ExclusiveBorrow, parse());
      return TypeExpr::deco(Decoration::SharedBorrow, parse());
    }
    if (consume("*")) {
      skip_ws();
      if (consume_word("const")) return TypeExpr::deco(Decoration::ConstRaw, parse());
      if (consume_word("mut")) return TypeExpr::deco(Decoration::MutRaw, parse());
      fail("expected const or mut after '*'");
    }
    std::string id = ident();
    if (std::find(params_.begin(), params_.end(), id) != params_.end()) {
      return TypeExpr::param(id);
    }
    std::vector<TypeExpr> args;
    skip_ws();
    if (consume("<")) {
      do {
        args.push_back(parse());
        skip_ws();
      } while (consume(","));
      if (!consume(">")) fail("expected '>'");
    }
    return TypeExpr::con(std::move(id), std::move(args));
  }

  bool ident_char_at(std::size_t i, const std::string& matched) const {
    if (i >= text_.size() || matched.empty()) return false;
    unsigned char last = static_cast<unsigned char>(matched.back());
    if (!(std::isalnum(last) || last == '_')) return false;
    unsigned char c = static_cast<unsigned char>(text_[i]);
    return std::isalnum(c) || c == '_';
  }

  std::string ident() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
            (text_[pos_] == ':' && pos_ + 1 < text_.size() && text_[pos_ + 1] == ':'))) {
      pos_ += text_[pos_] == ':' ? 2 : 1;
    }
    if (start == pos_) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  bool consume(std::string_view s) {
    if (text_.substr(pos_, s.size()) == s) {
      pos_ += s.size();
      return true;
    }
    return false;
  }

  bool consume_word(std::string_view w) {
    if (text_.substr(pos_, w.size()) == w &&
        (pos_ + w.size() >= text_.size() ||
         !std::isalnum(static_cast<unsigned char>(text_[pos_ + w.size()])))) {
      pos_ += w.size();
      return true;
    }
    return false;
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("parse_type: " + what + " at offset " + std::to_string(pos_) +
                                " in '" + std::string(text_) + "'");
  }

  std::string_view text_;
  std::span<const std::string> prims_;
  std::span<const std::string> params_;
  std::size_t pos_ = 0;
};

}  // namespace

TypeExpr parse_type(std::string_view text, std::span<const std::string> prims,
                    std::span<const std::string> params) {
  return TypeParser(text, prims, params).parse_all();
}

}  // namespace monofuzz
