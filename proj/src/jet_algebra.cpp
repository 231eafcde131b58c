#include "ssf/jet_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ssf/errors.hpp"

namespace ssf {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::capability: return "capability";
    case ErrorKind::domain: return "domain";
    case ErrorKind::divergence: return "divergence";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::refinement: return "refinement";
    case ErrorKind::range: return "range";
    case ErrorKind::unsupported: return "unsupported";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

std::string MultiIndex::to_string(int dim) const {
  std::string s = "[";
  for (int i = 0; i < dim; ++i) {
    if (i) s += ",";
    s += std::to_string((*this)[i]);
  }
  return s + "]";
}

std::vector<MultiIndex> multi_indices_exact(int dim, int order) {
  std::vector<MultiIndex> out;
  if (dim == 1) {
    out.emplace_back(order);
  } else if (dim == 2) {
    for (int a = order; a >= 0; --a) out.emplace_back(a, order - a);
  } else {
    for (int a = order; a >= 0; --a)
      for (int b = order - a; b >= 0; --b) out.emplace_back(a, b, order - a - b);
  }
  return out;
}

std::vector<MultiIndex> multi_indices(int dim, int max_order) {
  std::vector<MultiIndex> out;
  for (int n = 0; n <= max_order; ++n) {
    auto level = multi_indices_exact(dim, n);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coefficients

double Coefficient::to_double() const {
  return q.get_d() * std::pow(std::numbers::pi, 0.5 * pi_half);
}

Coefficient Coefficient::operator/(const Coefficient& o) const {
  if (o.is_zero()) fail(ErrorKind::domain, "division by zero coefficient");
  return {q / o.q, pi_half - o.pi_half};
}

static std::string pi_factor(int pi_half) {
  if (pi_half == 0) return "";
  if (pi_half % 2 == 0) return "*pi^" + std::to_string(pi_half / 2);
  return "*pi^(" + std::to_string(pi_half) + "/2)";
}

std::string Coefficient::to_string() const {
  return "(" + q.get_str() + ")" + pi_factor(pi_half);
}

mpz_class factorial(long n) {
  if (n < 0) fail(ErrorKind::domain, "factorial of a negative integer");
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

mpz_class binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

std::optional<Coefficient> gamma_half(long twice) {
  if (twice % 2 == 0) {
    long a = twice / 2;
    if (a <= 0) return std::nullopt;
    return Coefficient(mpq_class(factorial(a - 1)));
  }
  // argument n + 1/2
  long n = (twice - 1) / 2;
  if (twice < 0) n = -((1 - twice) / 2);
  if (n >= 0) {
    mpz_class four_n;
    mpz_ui_pow_ui(four_n.get_mpz_t(), 4, static_cast<unsigned long>(n));
    return Coefficient(mpq_class(factorial(2 * n), four_n * factorial(n)), 1);
  }
  long p = -n;
  mpz_class four_p;
  mpz_ui_pow_ui(four_p.get_mpz_t(), 4, static_cast<unsigned long>(p));
  mpq_class q(four_p * factorial(p), factorial(2 * p));
  if (p % 2) q = -q;
  return Coefficient(q, 1);
}

Coefficient reciprocal_gamma_half(long twice) {
  auto g = gamma_half(twice);
  if (!g) return Coefficient{};
  return Coefficient(1) / *g;
}

// ---------------------------------------------------------------------------
// Jet monomials

int JetMonomial::degree() const {
  int d = 0;
  for (const auto& [k, p] : factors) d += p;
  return d;
}

int JetMonomial::max_jet_order() const {
  int m = -1;
  for (const auto& [k, p] : factors) m = std::max(m, k.order());
  return m;
}

std::strong_ordering JetMonomial::operator<=>(const JetMonomial& o) const {
  if (auto c = degree() <=> o.degree(); c != 0) return c;
  std::size_t n = std::min(factors.size(), o.factors.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (auto c = factors[i].first <=> o.factors[i].first; c != 0) return c;
    if (auto c = o.factors[i].second <=> factors[i].second; c != 0) return c;
  }
  if (auto c = factors.size() <=> o.factors.size(); c != 0) return c;
  return pi_half <=> o.pi_half;
}

static JetMonomial multiply_monomials(const JetMonomial& a, const JetMonomial& b) {
  JetMonomial r;
  r.pi_half = a.pi_half + b.pi_half;
  r.factors.reserve(a.factors.size() + b.factors.size());
  auto i = a.factors.begin();
  auto j = b.factors.begin();
  while (i != a.factors.end() || j != b.factors.end()) {
    if (j == b.factors.end() || (i != a.factors.end() && i->first < j->first)) {
      r.factors.push_back(*i++);
    } else if (i == a.factors.end() || j->first < i->first) {
      r.factors.push_back(*j++);
    } else {
      r.factors.emplace_back(i->first, i->second + j->second);
      ++i;
      ++j;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// JetPoly

JetPoly::JetPoly(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) fail(ErrorKind::domain, "dimension must be 1, 2 or 3");
}

JetPoly::JetPoly(int dim, const Coefficient& c) : JetPoly(dim) {
  if (!c.is_zero()) terms_[JetMonomial{c.pi_half, {}}] = c.q;
}

JetPoly JetPoly::jet(int dim, const MultiIndex& k) {
  JetPoly p(dim);
  p.terms_[JetMonomial{0, {{k, 1}}}] = 1;
  return p;
}

void JetPoly::add_term(const JetMonomial& m, const mpq_class& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

int JetPoly::min_degree() const {
  int m = -1;
  for (const auto& [mono, c] : terms_) {
    int d = mono.degree();
    if (m < 0 || d < m) m = d;
  }
  return m < 0 ? 0 : m;
}

int JetPoly::max_jet_order() const {
  int m = -1;
  for (const auto& [mono, c] : terms_) m = std::max(m, mono.max_jet_order());
  return m;
}

JetPoly& JetPoly::operator+=(const JetPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

JetPoly& JetPoly::operator-=(const JetPoly& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

JetPoly& JetPoly::operator*=(const Coefficient& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  TermMap out;
  for (auto& [m, q] : terms_) {
    JetMonomial mm = m;
    mm.pi_half += c.pi_half;
    out.emplace(std::move(mm), q * c.q);
  }
  terms_ = std::move(out);
  return *this;
}

JetPoly JetPoly::operator-() const {
  JetPoly r(*this);
  for (auto& [m, q] : r.terms_) q = -q;
  return r;
}

JetPoly operator*(const JetPoly& a, const JetPoly& b) {
  JetPoly r(a.dim());
  for (const auto& [ma, ca] : a.terms()) {
    for (const auto& [mb, cb] : b.terms()) {
      r.add_term(multiply_monomials(ma, mb), ca * cb);
    }
  }
  return r;
}

JetPoly pow(const JetPoly& p, int n) {
  JetPoly r(p.dim(), Coefficient(1));
  for (int i = 0; i < n; ++i) r = r * p;
  return r;
}

JetPoly JetPoly::derivative(int i) const {
  JetPoly r(dim_);
  const MultiIndex e = MultiIndex::unit(i);
  for (const auto& [m, c] : terms_) {
    for (std::size_t f = 0; f < m.factors.size(); ++f) {
      const auto& [k, p] = m.factors[f];
      // d_i (u_k^p) = p u_k^(p-1) u_{k+e}
      JetMonomial rest;
      rest.pi_half = m.pi_half;
      for (std::size_t g = 0; g < m.factors.size(); ++g) {
        if (g == f) {
          if (p > 1) rest.factors.emplace_back(k, p - 1);
        } else {
          rest.factors.push_back(m.factors[g]);
        }
      }
      JetMonomial dk{0, {{k + e, 1}}};
      r.add_term(multiply_monomials(rest, dk), c * p);
    }
  }
  return r;
}

JetPoly JetPoly::derivative(const MultiIndex& k) const {
  JetPoly r = *this;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < k[i]; ++j) r = r.derivative(i);
  return r;
}

JetPoly JetPoly::laplacian() const {
  JetPoly r(dim_);
  for (int i = 0; i < dim_; ++i) r += derivative(i).derivative(i);
  return r;
}

double JetPoly::evaluate(const std::function<double(const MultiIndex&)>& jet_value) const {
  std::map<MultiIndex, double> cache;
  auto value_of = [&](const MultiIndex& k) {
    auto it = cache.find(k);
    if (it != cache.end()) return it->second;
    double v = jet_value(k);
    cache.emplace(k, v);
    return v;
  };
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c.get_d() * std::pow(std::numbers::pi, 0.5 * m.pi_half);
    for (const auto& [k, p] : m.factors) t *= std::pow(value_of(k), p);
    sum += t;
  }
  return sum;
}

std::string JetPoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << "(" << c.get_str() << ")" << pi_factor(m.pi_half);
    for (const auto& [k, p] : m.factors) {
      os << "*u" << k.to_string(dim_);
      if (p != 1) os << "^" << p;
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// DiffOp

DiffOp DiffOp::identity(int dim) {
  return multiply(JetPoly(dim, Coefficient(1)));
}

DiffOp DiffOp::multiply(const JetPoly& f) {
  DiffOp op(f.dim());
  op.add(MultiIndex{}, f);
  return op;
}

DiffOp DiffOp::partial(int dim, const MultiIndex& alpha) {
  DiffOp op(dim);
  op.add(alpha, JetPoly(dim, Coefficient(1)));
  return op;
}

DiffOp DiffOp::free_hamiltonian(int dim) {
  DiffOp op(dim);
  for (int i = 0; i < dim; ++i) {
    MultiIndex a;
    a[i] = 2;
    op.add(a, JetPoly(dim, Coefficient(-1)));
  }
  return op;
}

DiffOp DiffOp::schrodinger(int dim) {
  return free_hamiltonian(dim) + multiply(JetPoly::v(dim));
}

JetPoly DiffOp::coefficient(const MultiIndex& alpha) const {
  auto it = coeffs_.find(alpha);
  return it == coeffs_.end() ? JetPoly(dim_) : it->second;
}

int DiffOp::order() const {
  int o = -1;
  for (const auto& [a, p] : coeffs_) o = std::max(o, a.order());
  return o;
}

void DiffOp::add(const MultiIndex& alpha, const JetPoly& p) {
  if (p.is_zero()) return;
  auto [it, inserted] = coeffs_.try_emplace(alpha, p);
  if (!inserted) {
    it->second += p;
    if (it->second.is_zero()) coeffs_.erase(it);
  }
}

DiffOp& DiffOp::operator+=(const DiffOp& o) {
  for (const auto& [a, p] : o.coeffs_) add(a, p);
  return *this;
}

DiffOp& DiffOp::operator-=(const DiffOp& o) {
  for (const auto& [a, p] : o.coeffs_) add(a, -p);
  return *this;
}

std::string DiffOp::to_string() const {
  if (coeffs_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [a, p] : coeffs_) {
    if (!first) s += " + ";
    first = false;
    s += "(" + p.to_string() + ")*d" + a.to_string(dim_);
  }
  return s;
}

static mpz_class multi_binomial(const MultiIndex& a, const MultiIndex& g) {
  mpz_class r = 1;
  for (int i = 0; i < kMaxDim; ++i) r *= binomial(a[i], g[i]);
  return r;
}

DiffOp compose(const DiffOp& a, const DiffOp& b) {
  if (a.dim() != b.dim()) fail(ErrorKind::domain, "compose: dimension mismatch");
  const int dim = a.dim();
  DiffOp r(dim);
  // Cache derivatives of b's coefficients.
  std::map<std::pair<MultiIndex, MultiIndex>, JetPoly> dcache;
  for (const auto& [alpha, p] : a.coefficients()) {
    for (const auto& [beta, q] : b.coefficients()) {
      for (int g0 = 0; g0 <= alpha[0]; ++g0)
        for (int g1 = 0; g1 <= alpha[1]; ++g1)
          for (int g2 = 0; g2 <= alpha[2]; ++g2) {
            MultiIndex gamma(g0, g1, g2);
            auto key = std::make_pair(beta, gamma);
            auto it = dcache.find(key);
            if (it == dcache.end()) it = dcache.emplace(key, q.derivative(gamma)).first;
            if (it->second.is_zero()) continue;
            Coefficient c{mpq_class(multi_binomial(alpha, gamma))};
            r.add(alpha - gamma + beta, (p * it->second) * c);
          }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// DisplacementPoly

DisplacementPoly DisplacementPoly::constant(const JetPoly& c) {
  DisplacementPoly p(c.dim());
  p.add(MultiIndex{}, c);
  return p;
}

DisplacementPoly DisplacementPoly::monomial(int dim, const MultiIndex& beta, const Coefficient& c) {
  DisplacementPoly p(dim);
  p.add(beta, JetPoly(dim, c));
  return p;
}

DisplacementPoly DisplacementPoly::radius_power(int dim, int k) {
  DisplacementPoly r2(dim);
  for (int i = 0; i < dim; ++i) {
    MultiIndex b;
    b[i] = 2;
    r2.add(b, JetPoly(dim, Coefficient(1)));
  }
  DisplacementPoly r = monomial(dim, MultiIndex{}, Coefficient(1));
  for (int i = 0; i < k; ++i) r = r.multiply(r2);
  return r;
}

DisplacementPoly DisplacementPoly::potential_taylor(int dim, int max_degree) {
  DisplacementPoly p(dim);
  for (const auto& k : multi_indices(dim, max_degree)) {
    mpz_class kfact = 1;
    for (int i = 0; i < dim; ++i) kfact *= factorial(k[i]);
    p.add(k, JetPoly::jet(dim, k) * Coefficient(mpq_class(1, kfact)));
  }
  return p;
}

int DisplacementPoly::degree() const {
  int d = -1;
  for (const auto& [b, c] : coeffs_) d = std::max(d, b.order());
  return d;
}

JetPoly DisplacementPoly::diagonal() const {
  auto it = coeffs_.find(MultiIndex{});
  return it == coeffs_.end() ? JetPoly(dim_) : it->second;
}

void DisplacementPoly::add(const MultiIndex& beta, const JetPoly& c) {
  if (c.is_zero()) return;
  auto [it, inserted] = coeffs_.try_emplace(beta, c);
  if (!inserted) {
    it->second += c;
    if (it->second.is_zero()) coeffs_.erase(it);
  }
}

DisplacementPoly& DisplacementPoly::operator+=(const DisplacementPoly& o) {
  for (const auto& [b, c] : o.coeffs_) add(b, c);
  return *this;
}

DisplacementPoly& DisplacementPoly::operator-=(const DisplacementPoly& o) {
  for (const auto& [b, c] : o.coeffs_) add(b, -c);
  return *this;
}

DisplacementPoly& DisplacementPoly::operator*=(const Coefficient& c) {
  if (c.is_zero()) {
    coeffs_.clear();
    return *this;
  }
  for (auto& [b, p] : coeffs_) p *= c;
  return *this;
}

DisplacementPoly DisplacementPoly::multiply(const DisplacementPoly& o, int max_degree) const {
  DisplacementPoly r(dim_);
  for (const auto& [ba, ca] : coeffs_) {
    for (const auto& [bb, cb] : o.coeffs_) {
      MultiIndex b = ba + bb;
      if (max_degree >= 0 && b.order() > max_degree) continue;
      r.add(b, ca * cb);
    }
  }
  return r;
}

DisplacementPoly DisplacementPoly::laplacian_y() const {
  DisplacementPoly r(dim_);
  for (const auto& [b, c] : coeffs_) {
    for (int i = 0; i < dim_; ++i) {
      if (b[i] < 2) continue;
      MultiIndex nb = b;
      nb[i] -= 2;
      r.add(nb, c * Coefficient(static_cast<long>(b[i]) * (b[i] - 1)));
    }
  }
  return r;
}

DisplacementPoly DisplacementPoly::truncated(int max_degree) const {
  DisplacementPoly r(dim_);
  for (const auto& [b, c] : coeffs_)
    if (b.order() <= max_degree) r.coeffs_.emplace(b, c);
  return r;
}

static MultiIndex swap_index(MultiIndex k, int i, int j) {
  std::swap(k[i], k[j]);
  return k;
}

DisplacementPoly DisplacementPoly::permuted(int i, int j) const {
  DisplacementPoly r(dim_);
  for (const auto& [b, c] : coeffs_) {
    JetPoly pc(dim_);
    for (const auto& [m, q] : c.terms()) {
      JetMonomial mm;
      mm.pi_half = m.pi_half;
      for (const auto& [k, p] : m.factors) mm.factors.emplace_back(swap_index(k, i, j), p);
      std::sort(mm.factors.begin(), mm.factors.end());
      pc.add_term(mm, q);
    }
    r.add(swap_index(b, i, j), pc);
  }
  return r;
}

std::string DisplacementPoly::to_string() const {
  if (coeffs_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [b, c] : coeffs_) {
    if (!first) s += " + ";
    first = false;
    s += "(" + c.to_string() + ")*y" + b.to_string(dim_);
  }
  return s;
}

DisplacementPoly schrodinger_apply(const DisplacementPoly& f, int max_degree) {
  const int work = max_degree >= 0 ? max_degree : std::max(f.degree(), 0);
  DisplacementPoly r = f.laplacian_y();
  r *= Coefficient(-1);
  r += f.multiply(DisplacementPoly::potential_taylor(f.dim(), work), work);
  return r.truncated(work);
}

DisplacementPoly sigma_integrate(const DisplacementPoly& f, int n) {
  if (n < 0) fail(ErrorKind::domain, "sigma_integrate: n must be non-negative");
  DisplacementPoly r(f.dim());
  for (const auto& [b, c] : f.coefficients())
    r.add(b, c * Coefficient(mpq_class(1, n + b.order() + 1)));
  return r;
}

}  // namespace ssf
