#include "cpkdim/normal_forms.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <sstream>

namespace cpkdim {

using cplx = std::complex<double>;

int order(const MultiIndex& a) {
  int s = 0;
  for (int v : a) s += v;
  return s;
}

bool GrLex::operator()(const MultiIndex& a, const MultiIndex& b) const {
  const int oa = order(a), ob = order(b);
  if (oa != ob) return oa < ob;
  return a < b;
}

ExactComplex& ExactComplex::operator+=(const ExactComplex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

ExactComplex& ExactComplex::operator-=(const ExactComplex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

ExactComplex& ExactComplex::operator*=(const ExactComplex& o) {
  mpq_class r = re * o.re - im * o.im;
  mpq_class i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

ExactComplex& ExactComplex::operator/=(const ExactComplex& o) {
  const mpq_class den = o.re * o.re + o.im * o.im;
  if (sgn(den) == 0) throw Error(ErrorCode::SingularDiagonal, "division by exact zero");
  mpq_class r = (re * o.re + im * o.im) / den;
  mpq_class i = (im * o.re - re * o.im) / den;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

double modulus(const ExactComplex& c) {
  const mpq_class n2 = c.re * c.re + c.im * c.im;
  return std::sqrt(n2.get_d());
}

cplx to_complex(const ExactComplex& c) { return {c.re.get_d(), c.im.get_d()}; }

bool ResonanceSet::contains(int i, const MultiIndex& alpha) const {
  if (i < 0 || i >= static_cast<int>(R.size())) return false;
  return std::binary_search(R[i].begin(), R[i].end(), alpha, GrLex{});
}

namespace {

// All alpha in N^k with alpha_0..alpha_i = 0 and 2 <= |alpha| <= max_order.
void candidates(int k, int i, int max_order, std::vector<MultiIndex>& out) {
  MultiIndex a(k, 0);
  auto rec = [&](auto&& self, int j, int left) -> void {
    if (j == k) {
      if (order(a) >= 2) out.push_back(a);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      a[j] = v;
      self(self, j + 1, left - v);
    }
    a[j] = 0;
  };
  rec(rec, i + 1, max_order);
}

void check_exponents(const std::vector<double>& lambda) {
  if (lambda.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one exponent");
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "exponents must be positive");
    if (i > 0 && lambda[i] > lambda[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "exponents must be sorted descending");
    }
  }
}

template <class Pred>
ResonanceSet enumerate(const std::vector<double>& lambda, double eps, Pred&& resonant) {
  ResonanceSet s;
  s.k = static_cast<int>(lambda.size());
  s.lambda = lambda;
  s.theta = lambda.front() / lambda.back();
  s.R.assign(std::max(0, s.k - 1), {});
  const int max_order = static_cast<int>(std::ceil(s.theta)) + 1;
  for (int i = 0; i + 1 < s.k; ++i) {
    if (2.0 * lambda.back() <= lambda[i] + eps) s.I.push_back(i);
    std::vector<MultiIndex> cand;
    candidates(s.k, i, max_order, cand);
    for (const auto& a : cand) {
      if (resonant(i, a)) s.R[i].push_back(a);
    }
    std::sort(s.R[i].begin(), s.R[i].end(), GrLex{});
    s.Delta += static_cast<int>(s.R[i].size());
  }
  return s;
}

}  // namespace

ResonanceSet enumerate_resonances(const std::vector<double>& lambda, double eps_res) {
  check_exponents(lambda);
  if (!(eps_res > 0.0) || !(eps_res < lambda.back() / 4.0)) {
    throw Error(ErrorCode::InvalidArgument, "eps_res must lie in (0, lambda_k / 4)");
  }
  return enumerate(lambda, eps_res, [&](int i, const MultiIndex& a) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * lambda[j];
    return std::abs(lambda[i] - s) <= eps_res;
  });
}

ResonanceSet enumerate_resonances_exact(const std::vector<mpq_class>& ratios) {
  std::vector<double> lambda;
  for (const auto& r : ratios) {
    if (r <= 1) throw Error(ErrorCode::InvalidArgument, "exponent ratios must exceed 1");
    lambda.push_back(std::log(r.get_d()));
  }
  check_exponents(lambda);
  return enumerate(lambda, 0.0, [&](int i, const MultiIndex& a) {
    mpq_class p = 1;
    for (std::size_t j = 0; j < a.size(); ++j) {
      for (int t = 0; t < a[j]; ++t) p *= ratios[j];
    }
    return p == ratios[i];
  });
}

bool in_band(double modulus_a, double lambda, double eps, int n) {
  const double lo = std::exp(-n * lambda - std::abs(n) * eps);
  const double hi = std::exp(-n * lambda + std::abs(n) * eps);
  return modulus_a >= lo * (1.0 - 1e-12) && modulus_a <= hi * (1.0 + 1e-12);
}

ResonantMap<cplx> to_double(const ResonantMap<ExactComplex>& r) {
  ResonantMap<cplx> out;
  out.k = r.k;
  for (const auto& a : r.a) out.a.push_back(to_complex(a));
  out.N.resize(r.N.size());
  for (std::size_t i = 0; i < r.N.size(); ++i) {
    for (const auto& [alpha, c] : r.N[i]) out.N[i][alpha] = to_complex(c);
  }
  return out;
}

CocycleSpec<cplx> to_double(const CocycleSpec<ExactComplex>& spec) {
  CocycleSpec<cplx> out;
  for (const auto& s : spec.steps) out.steps.push_back(to_double(s));
  out.res = spec.res;
  out.epsilon = spec.epsilon;
  out.M = spec.M;
  return out;
}

double minimal_adaptedness_constant(const CocycleSpec<cplx>& spec, int n) {
  if (n < 1 || n > static_cast<int>(spec.steps.size())) {
    throw Error(ErrorCode::InvalidArgument, "n must lie in [1, length]");
  }
  double m_needed = 1.0;
  ResonantMap<cplx> acc = spec.steps[0];
  for (int m = 1; m <= n; ++m) {
    if (m > 1) acc = compose_resonant(spec.steps[m - 1], acc, spec.res);
    const ResonantMap<cplx> inv = invert_resonant(acc, spec.res);
    for (int i = 0; i < acc.k; ++i) {
      const double lam = spec.res.lambda[i];
      const double fwd = std::exp(-m * lam + m * spec.epsilon);
      const double bwd = std::exp(m * lam + m * spec.epsilon);
      for (const auto& [alpha, c] : acc.N[i]) m_needed = std::max(m_needed, std::abs(c) / fwd);
      for (const auto& [alpha, c] : inv.N[i]) m_needed = std::max(m_needed, std::abs(c) / bwd);
    }
  }
  return m_needed;
}

namespace {

double halton(std::uint64_t index, int base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

constexpr std::array<int, 12> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

// Point of D^k(r): radii r u^(1/4) pile up near the boundary; every fourth point sits on the torus.
std::vector<cplx> polydisc_sample(int k, int idx, double r) {
  std::vector<cplx> z(k);
  for (int j = 0; j < k; ++j) {
    const double u = halton(static_cast<std::uint64_t>(idx) + 1, kPrimes[(2 * j) % kPrimes.size()]);
    const double v = halton(static_cast<std::uint64_t>(idx) + 1, kPrimes[(2 * j + 1) % kPrimes.size()]);
    const double rho = (idx % 4 == 3) ? r : r * std::pow(u, 0.25);
    z[j] = std::polar(rho, 2.0 * M_PI * v);
  }
  return z;
}

cplx eval_poly(const SparsePoly<cplx>& p, const std::vector<cplx>& z) {
  cplx s = 0.0;
  for (const auto& [e, c] : p) {
    cplx t = c;
    for (std::size_t j = 0; j < z.size(); ++j) {
      for (int q = 0; q < e[j]; ++q) t *= z[j];
    }
    s += t;
  }
  return s;
}

SparsePoly<cplx> derivative(const SparsePoly<cplx>& p, int var) {
  SparsePoly<cplx> out;
  for (const auto& [e, c] : p) {
    if (e[var] == 0) continue;
    MultiIndex f = e;
    f[var] -= 1;
    out[f] += c * static_cast<double>(e[var]);
  }
  return out;
}

double sup_norm(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

// Relative slack bound/observed - 1, infinite when nothing is observed.
double slack_above(double observed, double bound) {
  if (observed == 0.0) return std::numeric_limits<double>::infinity();
  return bound / observed - 1.0;
}

}  // namespace

EstimatesResult normal_form_estimates(const CocycleSpec<cplx>& spec, int n, int samples) {
  const double m_needed = minimal_adaptedness_constant(spec, n);
  if (m_needed > spec.M * (1.0 + 1e-12)) {
    throw Error(ErrorCode::AdaptednessFailure, "composed coefficients exceed the adaptedness bound");
  }
  const ResonanceSet& res = spec.res;
  const int k = res.k;
  const double th = res.theta;
  const double eps = spec.epsilon;
  const double l1 = res.lambda.front();
  const double lk = res.lambda.back();
  EstimatesResult out;
  out.M_prime = std::max({res.Delta + 1.0, th, th * (th - 1.0)}) * spec.M;
  const double mp = out.M_prime;
  const double r = 1.0;

  const ResonantMap<cplx> rn = cocycle_product(spec, n);
  const ResonantMap<cplx> rinv = invert_resonant(rn, res);
  const auto comps = rn.components();
  const auto inv_comps = rinv.components();
  std::vector<std::vector<SparsePoly<cplx>>> grad(k, std::vector<SparsePoly<cplx>>(k));
  std::vector<SparsePoly<cplx>> second(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) grad[i][j] = derivative(comps[i], j);
    second[i] = derivative(grad[i][k - 1], k - 1);
  }

  const double outer = mp * std::exp(-n * lk + n * eps) * r;
  const double inner = r / (mp * std::exp(n * l1 + n * eps));
  const double b2 = k >= 2 ? mp * std::exp(-n * res.lambda[k - 2] + n * eps) : 0.0;
  const double b3_lo = std::exp(-n * lk - n * eps);
  const double b3_hi = std::max(b2, std::exp(-n * lk + n * eps));
  const double b4 = mp * std::exp(-2.0 * n * lk + n * eps);

  double m1 = std::numeric_limits<double>::infinity();
  double m2 = m1, m3 = m1, m4 = m1;
  std::vector<cplx> img(k), w(k), pre(k);
  for (int s = 0; s < samples; ++s) {
    const std::vector<cplx> z = polydisc_sample(k, s, r);
    for (int i = 0; i < k; ++i) img[i] = eval_poly(comps[i], z);
    m1 = std::min(m1, slack_above(sup_norm(img), outer));
    for (int i = 0; i < k; ++i) w[i] = z[i] * inner;
    for (int i = 0; i < k; ++i) pre[i] = eval_poly(inv_comps[i], w);
    m1 = std::min(m1, slack_above(sup_norm(pre), r));

    double row_max = 0.0;
    for (int i = 0; i + 1 < k; ++i) {
      for (int j = 0; j < k; ++j) row_max = std::max(row_max, std::abs(eval_poly(grad[i][j], z)));
    }
    if (k >= 2) m2 = std::min(m2, slack_above(row_max, b2));

    const double diag = std::abs(eval_poly(grad[k - 1][k - 1], z));
    m3 = std::min(m3, diag / b3_lo - 1.0);
    double col = 0.0;
    for (int i = 0; i < k; ++i) col = std::max(col, std::abs(eval_poly(grad[i][k - 1], z)));
    m3 = std::min(m3, slack_above(col, b3_hi));

    double sec = 0.0;
    for (int i = 0; i < k; ++i) sec = std::max(sec, std::abs(eval_poly(second[i], z)));
    m4 = std::min(m4, slack_above(sec, b4));
  }
  // rounding in the polynomial evaluation is far below this
  constexpr double kTol = -1e-9;
  out.worst_margins[0] = m1;
  out.worst_margins[1] = m2;
  out.worst_margins[2] = m3;
  out.worst_margins[3] = m4;
  out.ok1 = m1 >= kTol;
  out.ok2 = m2 >= kTol;
  out.ok3 = m3 >= kTol;
  out.ok4 = m4 >= kTol;
  return out;
}

int fractional_time(int n, double lambda1, double lambdak) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "n must be non-negative");
  if (!(lambdak > 0.0) || !(lambda1 >= lambdak)) {
    throw Error(ErrorCode::InvalidArgument, "need 0 < lambdak <= lambda1");
  }
  const double x = n * lambdak / lambda1;
  return std::min(n, static_cast<int>(std::floor(x * (1.0 + 1e-12))));
}

ResonantMap<cplx> random_resonant_map(const ResonanceSet& res, double eps, double c_scale,
                                      std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ResonantMap<cplx> r;
  r.k = res.k;
  r.N.assign(res.k, {});
  for (int i = 0; i < res.k; ++i) {
    const double mod = std::exp(-res.lambda[i]) * (1.0 + eps * (u(rng) - 0.5));
    r.a.push_back(std::polar(mod, 2.0 * M_PI * u(rng)));
    if (i + 1 < res.k) {
      for (const auto& alpha : res.R[i]) {
        r.N[i][alpha] = std::polar(c_scale * std::exp(-res.lambda[i]) * u(rng), 2.0 * M_PI * u(rng));
      }
    }
  }
  return r;
}

ResonantMap<ExactComplex> random_exact_resonant_map(const ResonanceSet& res,
                                                    const std::vector<mpq_class>& ratios,
                                                    std::mt19937_64& rng) {
  std::uniform_int_distribution<int> small(1, 12);
  std::uniform_int_distribution<int> delta(-4, 4);
  std::uniform_int_distribution<int> num(-9, 9);
  std::uniform_int_distribution<int> den(1, 9);
  std::uniform_int_distribution<int> quadrant(0, 3);
  ResonantMap<ExactComplex> r;
  r.k = res.k;
  r.N.assign(res.k, {});
  for (int i = 0; i < res.k; ++i) {
    int m = small(rng), q = small(rng);
    if (m == q) ++m;
    const mpq_class h = m * m + q * q;
    ExactComplex unit(mpq_class(m * m - q * q) / h, mpq_class(2 * m * q) / h);
    unit.re.canonicalize();
    unit.im.canonicalize();
    for (int t = quadrant(rng); t > 0; --t) unit *= ExactComplex(0, 1);
    mpq_class scale = (1 + mpq_class(delta(rng), 1000)) / ratios[i];
    scale.canonicalize();
    r.a.push_back(unit * ExactComplex(scale));
    if (i + 1 < res.k) {
      for (const auto& alpha : res.R[i]) {
        mpq_class re(num(rng), den(rng)), im(num(rng), den(rng));
        re.canonicalize();
        im.canonicalize();
        ExactComplex c(re, im);
        if (!is_zero(c)) r.N[i][alpha] = c;
      }
    }
  }
  return r;
}

namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string alpha_text(const MultiIndex& a) {
  std::string s;
  for (std::size_t j = 0; j < a.size(); ++j) s += (j ? "," : "") + std::to_string(a[j]);
  return s;
}

template <class S, class Fmt>
std::string text_of(const ResonantMap<S>& r, Fmt&& fmt) {
  std::string out;
  auto sep = [&] {
    if (!out.empty()) out += "; ";
  };
  for (int i = 0; i < r.k; ++i) {
    sep();
    out += "a_" + std::to_string(i + 1) + " = " + fmt(r.a[i]);
  }
  for (int i = 0; i < r.k; ++i) {
    for (const auto& [alpha, c] : r.N[i]) {
      sep();
      out += "c_" + std::to_string(i + 1) + "[" + alpha_text(alpha) + "] = " + fmt(c);
    }
  }
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string to_text(const ResonantMap<cplx>& r) {
  return text_of(r, [](const cplx& c) { return format_double(c.real()) + "," + format_double(c.imag()); });
}

std::string to_text(const ResonantMap<ExactComplex>& r) {
  return text_of(r, [](const ExactComplex& c) { return c.re.get_str() + "," + c.im.get_str(); });
}

ResonantMap<cplx> parse_resonant_map(const std::string& text, int k) {
  ResonantMap<cplx> r;
  r.k = k;
  r.a.assign(k, 0.0);
  r.N.assign(k, {});
  std::vector<bool> seen(k, false);
  std::stringstream ss(text);
  std::string entry;
  while (std::getline(ss, entry, ';')) {
    entry = trim(entry);
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "missing '=' in '" + entry + "'");
    const std::string key = trim(entry.substr(0, eq));
    const std::string val = trim(entry.substr(eq + 1));
    const auto comma = val.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::ParseError, "expected re,im in '" + entry + "'");
    cplx c;
    try {
      c = {std::stod(val.substr(0, comma)), std::stod(val.substr(comma + 1))};
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad number in '" + entry + "'");
    }
    if (key.size() < 3 || (key[0] != 'a' && key[0] != 'c') || key[1] != '_') {
      throw Error(ErrorCode::ParseError, "unknown key '" + key + "'");
    }
    const auto br = key.find('[');
    int i = 0;
    try {
      i = std::stoi(key.substr(2, br == std::string::npos ? std::string::npos : br - 2)) - 1;
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "bad index in '" + key + "'");
    }
    if (i < 0 || i >= k) throw Error(ErrorCode::ParseError, "index out of range in '" + key + "'");
    if (key[0] == 'a') {
      r.a[i] = c;
      seen[i] = true;
      continue;
    }
    const auto close = key.find(']');
    if (br == std::string::npos || close == std::string::npos) {
      throw Error(ErrorCode::ParseError, "missing multi-index in '" + key + "'");
    }
    MultiIndex alpha;
    std::stringstream as(key.substr(br + 1, close - br - 1));
    std::string part;
    while (std::getline(as, part, ',')) alpha.push_back(std::stoi(trim(part)));
    if (static_cast<int>(alpha.size()) != k) throw Error(ErrorCode::ParseError, "multi-index length differs from k");
    r.N[i][alpha] = c;
  }
  for (int i = 0; i < k; ++i) {
    if (!seen[i]) throw Error(ErrorCode::ParseError, "missing a_" + std::to_string(i + 1));
  }
  return r;
}

}  // namespace cpkdim
