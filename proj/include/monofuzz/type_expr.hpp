#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace monofuzz {

enum class Decoration { SharedBorrow, ExclusiveBorrow, ConstRaw, MutRaw };

std::string_view decoration_name(Decoration d);
Decoration decoration_from_name(std::string_view name);

// Immutable tree-shaped type term. Copies share structure.
class TypeExpr {
 public:
  enum class Kind { Primitive, Concrete, Param, Decorated };

  static TypeExpr prim(std::string name);
  static TypeExpr con(std::string name, std::vector<TypeExpr> args = {});
  static TypeExpr param(std::string name);
  static TypeExpr deco(Decoration d, TypeExpr inner);

  Kind kind() const;
  bool is_prim() const { return kind() == Kind::Primitive; }
  bool is_con() const { return kind() == Kind::Concrete; }
  bool is_param() const { return kind() == Kind::Param; }
  bool is_deco() const { return kind() == Kind::Decorated; }

  // Name of a primitive, constructor or parameter.
  const std::string& name() const;
  std::span<const TypeExpr> args() const;
  Decoration decoration() const;
  const TypeExpr& inner() const;

  bool has_params() const;
  std::size_t hash() const;

  // Rust-like surface syntax: Vec<Ty1>, &mut T, *const u8.
  std::string str() const;

  friend bool operator==(const TypeExpr& a, const TypeExpr& b);
  friend std::strong_ordering operator<=>(const TypeExpr& a, const TypeExpr& b);

 private:
  struct Node;
  explicit TypeExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct TypeExprHash {
  std::size_t operator()(const TypeExpr& t) const { return t.hash(); }
};

// Max constructor nesting; decorations add nothing. Throws std::logic_error
// when a Param is encountered.
int type_depth(const TypeExpr& t);

// Collects parameter names in first-occurrence order.
void collect_params(const TypeExpr& t, std::vector<std::string>& out);
bool mentions_param(const TypeExpr& t, std::string_view param);

// Small surface-syntax parser. Identifiers in
// `params` become Param nodes, identifiers in `prims` become Primitive nodes,
// everything else is a constructor.
TypeExpr parse_type(std::string_view text, std::span<const std::string> prims,
                    std::span<const std::string> params = {});

}  // namespace monofuzz

template <>
struct std::hash<monofuzz::TypeExpr> {
  std::size_t operator()(const monofuzz::TypeExpr& t) const { return t.hash(); }
};
