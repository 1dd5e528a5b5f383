#include "kellylab/functional.hpp"

#include <cmath>

#include "kellylab/error.hpp"

namespace kellylab {

double term_value(Term term, const SequenceTerms& t) {
  switch (term) {
    case Term::log_wealth:
      return t.log_wealth;
    case Term::growth_rate:
      return t.log_wealth / static_cast<double>(t.n);
    case Term::stochastic_entropy:
      return -t.log_py;
    case Term::reference_entropy:
      return t.log_odds;
    case Term::info_density:
      return t.log_py_causal - t.log_py;
  }
  return 0.0;
}

std::string_view term_name(Term term) {
  switch (term) {
    case Term::log_wealth:
      return "log_wealth";
    case Term::growth_rate:
      return "growth_rate";
    case Term::stochastic_entropy:
      return "stochastic_entropy";
    case Term::reference_entropy:
      return "reference_entropy";
    case Term::info_density:
      return "info_density";
  }
  return "";
}

Term parse_term(std::string_view name) {
  for (Term t : {Term::log_wealth, Term::growth_rate, Term::stochastic_entropy,
                 Term::reference_entropy, Term::info_density}) {
    if (term_name(t) == name) return t;
  }
  throw InvalidParameter("unknown functional term '" + std::string(name) + "'");
}

std::string theorem_name(Theorem theorem) {
  return "theorem" + std::to_string(static_cast<int>(theorem));
}

TrajectoryFunctional TrajectoryFunctional::constant(double c) {
  TrajectoryFunctional f;
  f.constant_ = c;
  return f;
}

TrajectoryFunctional TrajectoryFunctional::of(Term term) { return composite({{1.0, term}}); }

TrajectoryFunctional TrajectoryFunctional::composite(std::vector<Component> components) {
  for (const auto& [coef, term] : components) {
    if (coef != 1.0 && coef != -1.0) {
      throw InvalidParameter("composite coefficients must be +1 or -1");
    }
  }
  TrajectoryFunctional f;
  f.components_ = std::move(components);
  return f;
}

TrajectoryFunctional TrajectoryFunctional::theorem_exponent(Theorem theorem) {
  switch (theorem) {
    case Theorem::one:
    case Theorem::three:
      return composite({{1.0, Term::log_wealth},
                        {1.0, Term::stochastic_entropy},
                        {-1.0, Term::reference_entropy}});
    case Theorem::two:
    case Theorem::four:
    case Theorem::five:
      return composite({{1.0, Term::log_wealth},
                        {1.0, Term::stochastic_entropy},
                        {-1.0, Term::info_density},
                        {-1.0, Term::reference_entropy}});
  }
  throw InvalidParameter("unknown theorem");
}

TrajectoryFunctional TrajectoryFunctional::exponential() const {
  if (exponentiate_) throw InvalidParameter("functional is already exponentiated");
  TrajectoryFunctional f = *this;
  f.exponentiate_ = true;
  return f;
}

double TrajectoryFunctional::evaluate(const SequenceTerms& terms) const {
  double sum = constant_;
  for (const auto& [coef, term] : components_) sum += coef * term_value(term, terms);
  return exponentiate_ ? std::exp(sum) : sum;
}

bool TrajectoryFunctional::needs_strategy() const {
  for (const auto& [coef, term] : components_) {
    if (term == Term::log_wealth || term == Term::growth_rate) return true;
  }
  return false;
}

}  // namespace kellylab
