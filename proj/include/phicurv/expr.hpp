#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "phicurv/jet.hpp"

namespace phicurv {

/// Declarations an expression is linked against: chart/target dimensions,
/// named constants and (for ansatz families) free parameter names.
struct FieldEnv {
  int chart_dim = 0;   // coordinates x1..xm
  int target_dim = 0;  // coordinates y1..yn, visible in target context only
  std::map<std::string, double> constants;
  std::set<std::string> parameters;  // resolved like constants, bound at eval
};

/// Which coordinate family an expression may reference.
enum class VarFamily { Chart, Target };

struct ExprAst;
using ExprPtr = std::shared_ptr<const ExprAst>;

/// Immutable expression tree. All identifiers are resolved at parse time;
/// exponents of '^' are folded to constants then.
struct ExprAst {
  enum class Kind { Number, Coordinate, Constant, Neg, Binary, Call };

  Kind kind;
  std::ptrdiff_t offset = 0;  // byte offset of the node in the source text

  double number = 0.0;              // Number
  std::string name;                 // Coordinate/Constant/Call
  int slot = 0;                     // Coordinate: 0-based index
  VarFamily family = VarFamily::Chart;
  char op = 0;                      // Binary: + - * / ^
  bool exponent_is_integer = false; // Binary '^'
  long exponent_int = 0;
  double exponent_real = 0.0;
  std::vector<ExprPtr> args;
};

/// Parse and link an expression against `env` in the given coordinate family.
/// Throws SyntaxError (with byte offset), UnknownIdentifier or ArityError.
ExprPtr parse(const std::string& text, const FieldEnv& env,
              VarFamily family = VarFamily::Chart);

/// Canonical printing; print(parse(s)) reparses to a structurally equal tree.
std::string print(const ExprAst& ast);

bool structurally_equal(const ExprAst& a, const ExprAst& b);

/// True when the expression references no coordinate (constants only).
bool is_coordinate_free(const ExprAst& ast);

/// Binding of coordinates and parameters to jet variables.
struct JetBinding {
  JetSpaceRef space;
  std::vector<double> base;  // base point in jet-variable space
  int coord_offset = 0;      // coordinate k lifts to jet variable coord_offset+k
  const std::map<std::string, int>* parameter_slots = nullptr;
  const FieldEnv* env = nullptr;
};

/// Jet of the expression at the binding's base point, exact through the
/// truncation order. Jet domain errors are rethrown with the node offset.
Jet eval_jet(const ExprAst& ast, const JetBinding& binding);

/// Convenience: evaluate at `point` with order-`order` jets over the chart
/// coordinates alone (no parameters).
Jet eval_jet(const ExprAst& ast, const FieldEnv& env,
             const std::vector<double>& point, int order);

/// Plain double evaluation at a point.
double eval_value(const ExprAst& ast, const FieldEnv& env,
                  const std::vector<double>& point);

}  // namespace phicurv
