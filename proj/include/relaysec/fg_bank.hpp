#pragma once

// The f/g log-terms whose differences make up the per-subcarrier rates:
//
//   log2(1 + gamma_R(t=1))  = f_R  - g_R
//   log2(1 + gamma_D(t=2))  = f_D
//   log2(1 + gamma_SEJ)     = f_SE - g_SE
//   log2(1 + gamma_REJ)     = f_RE - g_RE
//   log2(1 + gamma_E^{k,4}) = f_E4 - g_E4
//
// All are functions of the subcarrier's (s1, r1, r2, s2) powers, in that
// variable order. Every term except f_E4 is the log of an affine function
// (hence concave); f_E4 is the log of a multi-affine polynomial and is not
// concave in general.

#include <array>
#include <string_view>

#include <Eigen/Core>

#include "relaysec/secrecy_rates.hpp"

namespace relaysec {

using Vec4 = Eigen::Vector4d;
using Mat4 = Eigen::Matrix4d;

enum class FgTerm { F_R, F_SE, F_RE, F_D, G_R, G_SE, G_RE, F_E4, G_E4 };

inline constexpr std::array<FgTerm, 9> kAllFgTerms{FgTerm::F_R,  FgTerm::F_SE, FgTerm::F_RE,
                                                   FgTerm::F_D,  FgTerm::G_R,  FgTerm::G_SE,
                                                   FgTerm::G_RE, FgTerm::F_E4, FgTerm::G_E4};

std::string_view fg_name(FgTerm term);

struct FgEval {
  double value = 0.0;
  Vec4 grad = Vec4::Zero();
  Mat4 hess = Mat4::Zero();
};

inline Vec4 to_vec(const SubcarrierPowers& p) { return {p.s1, p.r1, p.r2, p.s2}; }
inline SubcarrierPowers to_powers(const Vec4& x) { return {x[0], x[1], x[2], x[3]}; }

FgEval evaluate_fg(FgTerm term, const Vec4& x, const SubcarrierGains& g);
double fg_value(FgTerm term, const Vec4& x, const SubcarrierGains& g);

// log2(c0 + coeff . x) with value, gradient and Hessian.
FgEval log2_affine(double c0, const Vec4& coeff, const Vec4& x);

// Argument of f_E4: (sigma+a)(sigma+b) + c(sigma+b) + d(sigma+a), with
// a = r1 h_RE, b = s2 h_SE, c = s1 h_SE, d = r2 h_RE.
double informed_polynomial(const Vec4& x, const SubcarrierGains& g);

}  // namespace relaysec
