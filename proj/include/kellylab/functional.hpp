#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace kellylab {

/// Per-sequence log quantities from which every trajectory functional is
/// assembled. Quantities that were not computed are NaN.
struct SequenceTerms {
  std::size_t n = 0;
  double log_wealth = 0.0;     ///< n g_n = ln(M_{n+1} / M_1)
  double log_py = 0.0;         ///< ln P(y^n)
  double log_py_causal = 0.0;  ///< ln P(y^n || x^n)
  double log_odds = 0.0;       ///< ln o(y^n); for binary games -ln Q(y^n)
};

enum class Term {
  log_wealth,          ///< n g_n
  growth_rate,         ///< g_n
  stochastic_entropy,  ///< s_{y^n} = -ln P(y^n)
  reference_entropy,   ///< s^Q_{y^n} (binary) or ln o(y^n) (horse)
  info_density,        ///< i_{x^n -> y^n} = ln P(y^n||x^n) / P(y^n)
};

double term_value(Term term, const SequenceTerms& terms);
std::string_view term_name(Term term);
Term parse_term(std::string_view name);

/// The five equality exponents.
enum class Theorem { one = 1, two = 2, three = 3, four = 4, five = 5 };

std::string theorem_name(Theorem theorem);

/// Signed sum of terms plus a constant, optionally exponentiated.
class TrajectoryFunctional {
 public:
  using Component = std::pair<double, Term>;

  static TrajectoryFunctional constant(double c);
  static TrajectoryFunctional of(Term term);
  /// Coefficients must be -1 or +1.
  static TrajectoryFunctional composite(std::vector<Component> components);
  /// Argument of the exponential in the given equality, e.g. for the
  /// side-information theorems n g_n + s_{y^n} - i - s^Q_{y^n}.
  static TrajectoryFunctional theorem_exponent(Theorem theorem);

  /// exp of this functional.
  TrajectoryFunctional exponential() const;

  double evaluate(const SequenceTerms& terms) const;
  bool needs_strategy() const;
  bool exponentiated() const { return exponentiate_; }
  const std::vector<Component>& components() const { return components_; }
  double offset() const { return constant_; }

 private:
  std::vector<Component> components_;
  double constant_ = 0.0;
  bool exponentiate_ = false;
};

}  // namespace kellylab
