#include "pseudospec/poly.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>

namespace pseudospec {

int total_degree(const Exponents& e) {
  return std::accumulate(e.begin(), e.end(), 0);
}

bool GradedLexLess::operator()(const Exponents& a, const Exponents& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  return a < b;
}

Polynomial::Polynomial(int nvars) : nvars_(nvars) {
  if (nvars < 0) throw std::invalid_argument("Polynomial: negative nvars");
}

Polynomial Polynomial::constant(int nvars, double c) {
  Polynomial p(nvars);
  p.add_term(Exponents(nvars, 0), c);
  return p;
}

Polynomial Polynomial::variable(int nvars, int index, double c) {
  if (index < 0 || index >= nvars) {
    throw std::out_of_range("Polynomial::variable: index out of range");
  }
  Exponents e(nvars, 0);
  e[index] = 1;
  Polynomial p(nvars);
  p.add_term(e, c);
  return p;
}

Polynomial Polynomial::monomial(Exponents e, double c) {
  Polynomial p(static_cast<int>(e.size()));
  p.add_term(e, c);
  return p;
}

int Polynomial::total_degree() const {
  // The last key has the largest degree under graded order.
  return terms_.empty() ? 0 : pseudospec::total_degree(terms_.rbegin()->first);
}

double Polynomial::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::constant_term() const {
  return coefficient(Exponents(nvars_, 0));
}

void Polynomial::add_term(const Exponents& e, double c) {
  if (static_cast<int>(e.size()) != nvars_) {
    throw std::invalid_argument("Polynomial::add_term: exponent length mismatch");
  }
  if (std::any_of(e.begin(), e.end(), [](int k) { return k < 0; })) {
    throw std::invalid_argument("Polynomial::add_term: negative exponent");
  }
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= nvars_) throw std::out_of_range("Polynomial::derivative: bad variable");
  Polynomial out(nvars_);
  for (const auto& [e, c] : terms_) {
    if (e[var] == 0) continue;
    Exponents d = e;
    --d[var];
    out.add_term(d, c * e[var]);
  }
  return out;
}

Polynomial Polynomial::extended(int new_nvars) const {
  if (new_nvars < nvars_) {
    throw std::invalid_argument("Polynomial::extended: cannot shrink");
  }
  Polynomial out(new_nvars);
  for (const auto& [e, c] : terms_) {
    Exponents wide = e;
    wide.resize(new_nvars, 0);
    out.terms_.emplace(std::move(wide), c);
  }
  return out;
}

namespace {

double monomial_value(const Exponents& e, std::span<const double> x) {
  double v = 1.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    for (int k = 0; k < e[i]; ++k) v *= x[i];
  }
  return v;
}

}  // namespace

double Polynomial::eval(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != nvars_) {
    throw std::invalid_argument("Polynomial::eval: dimension mismatch");
  }
  double sum = 0.0;
  for (const auto& [e, c] : terms_) sum += c * monomial_value(e, point);
  return sum;
}

double Polynomial::abs_eval(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != nvars_) {
    throw std::invalid_argument("Polynomial::abs_eval: dimension mismatch");
  }
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    sum += std::abs(c) * std::abs(monomial_value(e, point));
  }
  return sum;
}

void Polynomial::check_compatible(const Polynomial& other) const {
  if (nvars_ != other.nvars_) {
    throw std::invalid_argument("Polynomial: nvars mismatch");
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& [e, c] : out.terms_) c = -c;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  check_compatible(other);
  for (const auto& [e, c] : other.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  check_compatible(other);
  for (const auto& [e, c] : other.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    it = it->second == 0.0 ? terms_.erase(it) : std::next(it);
  }
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  a.check_compatible(b);
  Polynomial out(a.nvars_);
  Exponents e(a.nvars_);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      for (int i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
      out.add_term(e, ca * cb);
    }
  }
  return out;
}

std::vector<std::string> default_var_names(int nvars, std::string_view prefix) {
  std::vector<std::string> names;
  names.reserve(nvars);
  for (int i = 1; i <= nvars; ++i) names.push_back(std::string(prefix) + std::to_string(i));
  return names;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::string to_string(const Polynomial& p, std::span<const std::string> var_names) {
  if (static_cast<int>(var_names.size()) != p.nvars()) {
    throw std::invalid_argument("to_string: wrong number of variable names");
  }
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    const bool is_const = total_degree(e) == 0;
    double mag = c;
    if (first) {
      if (c < 0 && !is_const) {
        out += "-";
        mag = -c;
      }
    } else {
      out += c < 0 ? " - " : " + ";
      mag = std::abs(c);
    }
    first = false;
    std::string factors;
    for (int i = 0; i < p.nvars(); ++i) {
      if (e[i] == 0) continue;
      if (!factors.empty()) factors += "*";
      factors += var_names[i];
      if (e[i] > 1) factors += "^" + std::to_string(e[i]);
    }
    if (is_const) {
      out += format_double(mag);
    } else if (mag == 1.0) {
      out += factors;
    } else {
      out += format_double(mag) + "*" + factors;
    }
  }
  return out;
}

ParseError::ParseError(const std::string& what, std::size_t position)
    : std::invalid_argument(what + " at position " + std::to_string(position)),
      position_(position) {}

namespace {

// Recursive-descent parser:
//   expr   := term (('+' | '-') term)*
//   term   := unary ('*' unary)*
//   unary  := ('+' | '-') unary | power
//   power  := atom ('^' integer)?
//   atom   := number | identifier | '(' expr ')'
class PolyParser {
 public:
  PolyParser(std::string_view text, std::span<const std::string> names)
      : text_(text), names_(names), nvars_(static_cast<int>(names.size())) {}

  Polynomial parse() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    Polynomial p = expr();
    skip_space();
    if (pos_ != text_.size()) {
      throw ParseError(std::string("unexpected character '") + text_[pos_] + "'", pos_);
    }
    return p;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Polynomial expr() {
    Polynomial acc = term();
    for (;;) {
      if (accept('+')) {
        acc += term();
      } else if (accept('-')) {
        acc -= term();
      } else {
        return acc;
      }
    }
  }

  Polynomial term() {
    Polynomial acc = unary();
    while (accept('*')) acc = acc * unary();
    return acc;
  }

  Polynomial unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = atom();
    if (!accept('^')) return base;
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("expected nonnegative integer exponent", start);
    int k = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, k);
    if (ec != std::errc()) throw ParseError("exponent out of range", start);
    Polynomial out = Polynomial::constant(nvars_, 1.0);
    for (int i = 0; i < k; ++i) out = out * base;
    return out;
  }

  Polynomial atom() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected character '") + c + "'", pos_);
  }

  Polynomial number() {
    const std::size_t start = pos_;
    auto digit_at = [&](std::size_t i) {
      return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
    };
    while (digit_at(pos_) || (pos_ < text_.size() && text_[pos_] == '.')) ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (digit_at(look)) {
        pos_ = look;
        while (digit_at(pos_)) ++pos_;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      throw ParseError("malformed number", start);
    }
    return Polynomial::constant(nvars_, v);
  }

  Polynomial identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);
    for (int i = 0; i < nvars_; ++i) {
      if (names_[i] == name) return Polynomial::variable(nvars_, i);
    }
    throw ParseError("unknown variable '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  std::span<const std::string> names_;
  int nvars_;
  std::size_t pos_ = 0;
};

}  // namespace

Polynomial parse_poly(std::string_view text, std::span<const std::string> var_names) {
  return PolyParser(text, var_names).parse();
}

std::string_view to_string(Relation rel) {
  switch (rel) {
    case Relation::kEq: return "=";
    case Relation::kLt: return "<";
    case Relation::kGt: return ">";
    case Relation::kLe: return "<=";
    case Relation::kGe: return ">=";
  }
  return "?";
}

Relation parse_relation(std::string_view text) {
  if (text == "=" || text == "==") return Relation::kEq;
  if (text == "<") return Relation::kLt;
  if (text == ">") return Relation::kGt;
  if (text == "<=") return Relation::kLe;
  if (text == ">=") return Relation::kGe;
  throw std::invalid_argument("unknown relation '" + std::string(text) + "'");
}

bool satisfies(double value, Relation rel, double tol) {
  switch (rel) {
    case Relation::kEq: return std::abs(value) <= tol;
    case Relation::kLt: return value < 0.0;
    case Relation::kGt: return value > 0.0;
    case Relation::kLe: return value <= tol;
    case Relation::kGe: return value >= -tol;
  }
  return false;
}

void PolySystem::validate() const {
  if (!var_names.empty() && static_cast<int>(var_names.size()) != nvars) {
    throw std::invalid_argument("PolySystem: var_names size differs from nvars");
  }
  for (const auto& c : constraints) {
    if (c.poly.nvars() != nvars) {
      throw std::invalid_argument("PolySystem: constraint nvars mismatch");
    }
  }
}

bool PolySystem::contains(std::span<const double> point, double tol) const {
  if (static_cast<int>(point.size()) != nvars) {
    throw std::invalid_argument("PolySystem::contains: dimension mismatch");
  }
  for (const auto& c : constraints) {
    const double scale = 1.0 + c.poly.abs_eval(point);
    if (!satisfies(c.poly.eval(point), c.rel, tol * scale)) return false;
  }
  return true;
}

int PolySystem::max_degree() const {
  int d = 0;
  for (const auto& c : constraints) d = std::max(d, c.poly.total_degree());
  return d;
}

PolySystem make_system(std::vector<std::string> var_names,
                       const std::vector<std::pair<std::string, Relation>>& constraints) {
  PolySystem sys;
  sys.nvars = static_cast<int>(var_names.size());
  sys.var_names = std::move(var_names);
  for (const auto& [text, rel] : constraints) {
    sys.constraints.push_back({parse_poly(text, sys.var_names), rel});
  }
  return sys;
}

double QuadCoeffs::at(int i, int j) const {
  if (j > i) std::swap(i, j);
  auto it = entries.find({i, j});
  return it == entries.end() ? 0.0 : it->second;
}

double QuadCoeffs::eval_homogeneous(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n + 1) {
    throw std::invalid_argument("QuadCoeffs::eval_homogeneous: dimension mismatch");
  }
  double sum = 0.0;
  for (const auto& [key, c] : entries) sum += c * x[key.first] * x[key.second];
  return sum;
}

QuadCoeffs quad_coeffs(const Polynomial& p) {
  if (p.total_degree() > 2) {
    throw std::domain_error("quad_coeffs: total degree " + std::to_string(p.total_degree()) +
                            " exceeds 2");
  }
  QuadCoeffs q;
  q.n = p.nvars();
  for (const auto& [e, c] : p.terms()) {
    // Collect the 1-based labels of the variables in this monomial.
    std::vector<int> labels;
    for (int i = 0; i < p.nvars(); ++i) {
      for (int k = 0; k < e[i]; ++k) labels.push_back(i + 1);
    }
    while (labels.size() < 2) labels.insert(labels.begin(), 0);
    const int hi = std::max(labels[0], labels[1]);
    const int lo = std::min(labels[0], labels[1]);
    q.entries[{hi, lo}] += c;
  }
  return q;
}

Polynomial from_quad_coeffs(const QuadCoeffs& q) {
  Polynomial p(q.n);
  for (const auto& [key, c] : q.entries) {
    Exponents e(q.n, 0);
    if (key.first > 0) ++e[key.first - 1];
    if (key.second > 0) ++e[key.second - 1];
    p.add_term(e, c);
  }
  return p;
}

}  // namespace pseudospec
