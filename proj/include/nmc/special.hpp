#pragma once

namespace nmc {

// Derivatives of lgamma. Both require x > 0 and return NaN otherwise.
double digamma(double x);
double trigamma(double x);

}  // namespace nmc
