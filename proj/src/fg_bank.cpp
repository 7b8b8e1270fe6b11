#include "relaysec/fg_bank.hpp"

#include <cmath>
#include <numbers>

namespace relaysec {

namespace {

constexpr double kLn2 = std::numbers::ln2;

enum Var { S1 = 0, R1 = 1, R2 = 2, S2 = 3 };

Vec4 unit(Var v, double scale) {
  Vec4 e = Vec4::Zero();
  e[v] = scale;
  return e;
}

FgEval log2_polynomial_e4(const Vec4& x, const SubcarrierGains& g) {
  const double s = g.sigma;
  const double a = x[R1] * g.h_re, b = x[S2] * g.h_se, c = x[S1] * g.h_se, d = x[R2] * g.h_re;
  const double q = (s + a) * (s + b) + c * (s + b) + d * (s + a);

  // Partials of q with respect to (a, b, c, d), then chained to powers.
  const double dq_da = s + b + d;
  const double dq_db = s + a + c;
  const double dq_dc = s + b;
  const double dq_dd = s + a;
  Vec4 grad_q;
  grad_q[S1] = dq_dc * g.h_se;
  grad_q[R1] = dq_da * g.h_re;
  grad_q[R2] = dq_dd * g.h_re;
  grad_q[S2] = dq_db * g.h_se;

  // Bilinear terms ab, bc, ad.
  Mat4 hess_q = Mat4::Zero();
  hess_q(R1, S2) = hess_q(S2, R1) = g.h_re * g.h_se;
  hess_q(S2, S1) = hess_q(S1, S2) = g.h_se * g.h_se;
  hess_q(R1, R2) = hess_q(R2, R1) = g.h_re * g.h_re;

  FgEval out;
  out.value = std::log2(q);
  out.grad = grad_q / (q * kLn2);
  out.hess = (hess_q * q - grad_q * grad_q.transpose()) / (q * q * kLn2);
  return out;
}

}  // namespace

std::string_view fg_name(FgTerm term) {
  switch (term) {
    case FgTerm::F_R: return "f_R";
    case FgTerm::F_SE: return "f_SE";
    case FgTerm::F_RE: return "f_RE";
    case FgTerm::F_D: return "f_D";
    case FgTerm::G_R: return "g_R";
    case FgTerm::G_SE: return "g_SE";
    case FgTerm::G_RE: return "g_RE";
    case FgTerm::F_E4: return "f_E4";
    case FgTerm::G_E4: return "g_E4";
  }
  return "?";
}

FgEval log2_affine(double c0, const Vec4& coeff, const Vec4& x) {
  const double arg = c0 + coeff.dot(x);
  FgEval out;
  out.value = std::log2(arg);
  out.grad = coeff / (arg * kLn2);
  out.hess = -(coeff * coeff.transpose()) / (arg * arg * kLn2);
  return out;
}

double informed_polynomial(const Vec4& x, const SubcarrierGains& g) {
  const double s = g.sigma;
  const double a = x[R1] * g.h_re, b = x[S2] * g.h_se, c = x[S1] * g.h_se, d = x[R2] * g.h_re;
  return (s + a) * (s + b) + c * (s + b) + d * (s + a);
}

FgEval evaluate_fg(FgTerm term, const Vec4& x, const SubcarrierGains& g) {
  const double s = g.sigma;
  switch (term) {
    case FgTerm::F_R: return log2_affine(s, unit(R1, g.h_si) + unit(S1, g.h_sr), x);
    case FgTerm::F_SE: return log2_affine(s, unit(R1, g.h_re) + unit(S1, g.h_se), x);
    case FgTerm::F_RE: return log2_affine(s, unit(R2, g.h_re) + unit(S2, g.h_se), x);
    case FgTerm::F_D: return log2_affine(1.0, unit(R2, g.h_rd / s), x);
    case FgTerm::G_R: return log2_affine(s, unit(R1, g.h_si), x);
    case FgTerm::G_SE: return log2_affine(s, unit(R1, g.h_re), x);
    case FgTerm::G_RE: return log2_affine(s, unit(S2, g.h_se), x);
    case FgTerm::F_E4: return log2_polynomial_e4(x, g);
    case FgTerm::G_E4: {
      FgEval ra = log2_affine(s, unit(R1, g.h_re), x);
      const FgEval sb = log2_affine(s, unit(S2, g.h_se), x);
      ra.value += sb.value;
      ra.grad += sb.grad;
      ra.hess += sb.hess;
      return ra;
    }
  }
  return {};
}

double fg_value(FgTerm term, const Vec4& x, const SubcarrierGains& g) { return evaluate_fg(term, x, g).value; }

}  // namespace relaysec
