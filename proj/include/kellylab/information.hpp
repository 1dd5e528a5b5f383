#pragma once

#include "kellylab/sequence.hpp"

namespace kellylab {

/// I(X^n : Y^n) = <ln P(x^n,y^n) / (P(x^n) P(y^n))>. For n = 1 this is the
/// single-pair mutual information.
double mutual_information(const SequenceDistribution& joint);

/// S(Y^n) = -<ln P(y^n)>.
double sequence_entropy(const SequenceDistribution& joint);

/// S(Y^n || X^n) = -<ln P(y^n || x^n)>.
double causally_conditional_entropy(const SequenceDistribution& joint);

/// I_dr(X^n -> Y^n) = <ln P(y^n || x^n) / P(y^n)>, averaged directly (not as
/// the entropy difference).
double directed_information(const SequenceDistribution& joint);

}  // namespace kellylab
