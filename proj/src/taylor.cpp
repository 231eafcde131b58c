#include "ssf/taylor.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "ssf/errors.hpp"

namespace ssf {

struct Taylor::Layout {
  int dim = 1;
  int order = 0;
  std::vector<MultiIndex> monomials;
  std::map<MultiIndex, int> index;
  // products[k] lists (i, j) with m_i + m_j = m_k.
  std::vector<std::vector<std::pair<int, int>>> products;
};

static std::shared_ptr<const Taylor::Layout> layout_for(int dim, int order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const Taylor::Layout>> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(dim, order);
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  auto l = std::make_shared<Taylor::Layout>();
  l->dim = dim;
  l->order = order;
  l->monomials = multi_indices(dim, order);
  for (std::size_t i = 0; i < l->monomials.size(); ++i)
    l->index.emplace(l->monomials[i], static_cast<int>(i));
  l->products.resize(l->monomials.size());
  for (std::size_t i = 0; i < l->monomials.size(); ++i) {
    for (std::size_t j = 0; j < l->monomials.size(); ++j) {
      auto m = l->monomials[i] + l->monomials[j];
      if (m.order() > order) continue;
      l->products[static_cast<std::size_t>(l->index.at(m))].emplace_back(i, j);
    }
  }
  cache.emplace(key, l);
  return l;
}

Taylor::Taylor(int dim, int order, double value) : layout_(layout_for(dim, order)) {
  c_.assign(layout_->monomials.size(), 0.0);
  c_[0] = value;
}

Taylor Taylor::variable(int dim, int order, int i, double x0) {
  Taylor t(dim, order, x0);
  if (order >= 1) t.c_[static_cast<std::size_t>(t.layout_->index.at(MultiIndex::unit(i)))] = 1.0;
  return t;
}

int Taylor::dim() const { return layout_->dim; }
int Taylor::order() const { return layout_->order; }

double Taylor::coefficient(const MultiIndex& m) const {
  auto it = layout_->index.find(m);
  return it == layout_->index.end() ? 0.0 : c_[static_cast<std::size_t>(it->second)];
}

double Taylor::derivative(const MultiIndex& m) const {
  double f = 1.0;
  for (int i = 0; i < kMaxDim; ++i)
    for (int j = 2; j <= m[i]; ++j) f *= j;
  return f * coefficient(m);
}

Taylor& Taylor::operator+=(const Taylor& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += o.c_[i];
  return *this;
}

Taylor& Taylor::operator-=(const Taylor& o) {
  for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= o.c_[i];
  return *this;
}

Taylor& Taylor::operator*=(double s) {
  for (double& c : c_) c *= s;
  return *this;
}

Taylor Taylor::operator-() const {
  Taylor r(*this);
  r *= -1.0;
  return r;
}

Taylor operator-(double s, const Taylor& a) {
  Taylor r = -a;
  r.c_[0] += s;
  return r;
}

Taylor operator*(const Taylor& a, const Taylor& b) {
  Taylor r(a);
  const auto& prods = a.layout_->products;
  for (std::size_t k = 0; k < r.c_.size(); ++k) {
    double s = 0.0;
    for (auto [i, j] : prods[k]) s += a.c_[static_cast<std::size_t>(i)] * b.c_[static_cast<std::size_t>(j)];
    r.c_[k] = s;
  }
  return r;
}

Taylor operator/(const Taylor& a, const Taylor& b) {
  if (b.c_[0] == 0.0) fail(ErrorKind::domain, "Taylor division by a series with zero value");
  Taylor r(a);
  const auto& prods = a.layout_->products;
  // Monomials are sorted by total degree, so every c_i with i != k needed
  // below is already final.
  for (std::size_t k = 0; k < r.c_.size(); ++k) {
    double s = a.c_[k];
    for (auto [i, j] : prods[k]) {
      if (j == 0) continue;
      s -= r.c_[static_cast<std::size_t>(i)] * b.c_[static_cast<std::size_t>(j)];
    }
    r.c_[k] = s / b.c_[0];
  }
  return r;
}

Taylor Taylor::compose(const std::vector<double>& f) const {
  Taylor h(*this);
  h.c_[0] = 0.0;
  Taylor r(dim(), order(), f.back());
  for (int j = static_cast<int>(f.size()) - 2; j >= 0; --j) {
    r = r * h;
    r.c_[0] += f[static_cast<std::size_t>(j)];
  }
  return r;
}

namespace {

// Univariate recurrences on coefficient vectors x_0..x_K.
using Coeffs = std::vector<double>;

Coeffs uni_exp(const Coeffs& x) {
  const std::size_t n = x.size();
  Coeffs e(n, 0.0);
  e[0] = std::exp(x[0]);
  for (std::size_t k = 1; k < n; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j) s += static_cast<double>(j) * x[j] * e[k - j];
    e[k] = s / static_cast<double>(k);
  }
  return e;
}

Coeffs uni_log(const Coeffs& x) {
  if (x[0] <= 0.0) fail(ErrorKind::domain, "log of a non-positive value");
  const std::size_t n = x.size();
  Coeffs l(n, 0.0);
  l[0] = std::log(x[0]);
  for (std::size_t k = 1; k < n; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j < k; ++j) s += static_cast<double>(j) * l[j] * x[k - j];
    l[k] = (x[k] - s / static_cast<double>(k)) / x[0];
  }
  return l;
}

std::pair<Coeffs, Coeffs> uni_sincos(const Coeffs& x) {
  const std::size_t n = x.size();
  Coeffs s(n, 0.0), c(n, 0.0);
  s[0] = std::sin(x[0]);
  c[0] = std::cos(x[0]);
  for (std::size_t k = 1; k < n; ++k) {
    double ss = 0.0, cc = 0.0;
    for (std::size_t j = 1; j <= k; ++j) {
      ss += static_cast<double>(j) * x[j] * c[k - j];
      cc += static_cast<double>(j) * x[j] * s[k - j];
    }
    s[k] = ss / static_cast<double>(k);
    c[k] = -cc / static_cast<double>(k);
  }
  return {s, c};
}

Coeffs uni_pow(const Coeffs& x, double p) {
  if (x[0] <= 0.0) fail(ErrorKind::domain, "real power of a non-positive value");
  const std::size_t n = x.size();
  Coeffs y(n, 0.0);
  y[0] = std::pow(x[0], p);
  for (std::size_t k = 1; k < n; ++k) {
    double s = 0.0;
    for (std::size_t j = 1; j <= k; ++j)
      s += (p * static_cast<double>(j) - static_cast<double>(k - j)) * x[j] * y[k - j];
    y[k] = s / (static_cast<double>(k) * x[0]);
  }
  return y;
}

Coeffs uni_div(const Coeffs& a, const Coeffs& b) {
  const std::size_t n = a.size();
  Coeffs r(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = a[k];
    for (std::size_t j = 1; j <= k; ++j) s -= r[k - j] * b[j];
    r[k] = s / b[0];
  }
  return r;
}

Coeffs identity_series(double a, int order) {
  Coeffs x(static_cast<std::size_t>(order) + 1, 0.0);
  x[0] = a;
  if (order >= 1) x[1] = 1.0;
  return x;
}

template <class F>
Taylor apply(const Taylor& x, F&& univariate) {
  return x.compose(univariate(identity_series(x.value(), x.order())));
}

}  // namespace

Taylor exp(const Taylor& x) { return apply(x, uni_exp); }
Taylor log(const Taylor& x) { return apply(x, uni_log); }
Taylor sin(const Taylor& x) {
  return apply(x, [](const Coeffs& s) { return uni_sincos(s).first; });
}
Taylor cos(const Taylor& x) {
  return apply(x, [](const Coeffs& s) { return uni_sincos(s).second; });
}

static Coeffs uni_sinh(const Coeffs& s) {
  Coeffs ep = uni_exp(s);
  Coeffs m(s);
  for (double& v : m) v = -v;
  Coeffs em = uni_exp(m);
  for (std::size_t i = 0; i < ep.size(); ++i) ep[i] = 0.5 * (ep[i] - em[i]);
  return ep;
}

static Coeffs uni_cosh(const Coeffs& s) {
  Coeffs ep = uni_exp(s);
  Coeffs m(s);
  for (double& v : m) v = -v;
  Coeffs em = uni_exp(m);
  for (std::size_t i = 0; i < ep.size(); ++i) ep[i] = 0.5 * (ep[i] + em[i]);
  return ep;
}

Taylor sinh(const Taylor& x) { return apply(x, uni_sinh); }
Taylor cosh(const Taylor& x) { return apply(x, uni_cosh); }
Taylor tanh(const Taylor& x) {
  return apply(x, [](const Coeffs& s) { return uni_div(uni_sinh(s), uni_cosh(s)); });
}
Taylor sech(const Taylor& x) {
  return apply(x, [](const Coeffs& s) {
    Coeffs one(s.size(), 0.0);
    one[0] = 1.0;
    return uni_div(one, uni_cosh(s));
  });
}
Taylor sqrt(const Taylor& x) { return pow(x, 0.5); }
Taylor pow(const Taylor& x, double p) {
  if (p == std::floor(p) && std::abs(p) <= 64) return pow(x, static_cast<int>(p));
  return apply(x, [p](const Coeffs& s) { return uni_pow(s, p); });
}
Taylor pow(const Taylor& x, int n) {
  if (n < 0) return Taylor(x.dim(), x.order(), 1.0) / pow(x, -n);
  Taylor r(x.dim(), x.order(), 1.0);
  Taylor b = x;
  while (n) {
    if (n & 1) r = r * b;
    n >>= 1;
    if (n) b = b * b;
  }
  return r;
}

Taylor abs(const Taylor& x) {
  if (x.value() == 0.0 && x.order() > 0) fail(ErrorKind::domain, "abs is not differentiable at 0");
  return x.value() < 0.0 ? -x : x;
}

Taylor heaviside(const Taylor& x) {
  if (x.value() == 0.0 && x.order() > 0) fail(ErrorKind::domain, "step function jumps at 0");
  return Taylor(x.dim(), x.order(), x.value() > 0.0 ? 1.0 : 0.0);
}

}  // namespace ssf
