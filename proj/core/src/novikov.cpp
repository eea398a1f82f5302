#include "coppice/novikov.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <stdexcept>

namespace coppice {

namespace {

std::int64_t parse_int(std::string_view s) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty())
    throw std::invalid_argument("bad integer '" + std::string(s) + "'");
  return v;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

}  // namespace

Rat parse_rat(std::string_view text) {
  text = trim(text);
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rat(parse_int(text));
  std::int64_t den = parse_int(text.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
  return Rat(parse_int(text.substr(0, slash)), den);
}

std::string format_rat(const Rat& x) {
  if (x.denominator() == 1) return std::to_string(x.numerator());
  return std::to_string(x.numerator()) + "/" + std::to_string(x.denominator());
}

EnergyCap EnergyCap::minus(const Rat& eps) const {
  if (!value) return {};
  return at(*value - eps);
}

std::string EnergyCap::str() const { return value ? format_rat(*value) : "inf"; }

NovElem NovElem::monomial(const Rat& e) {
  NovElem x;
  x.exps_.push_back(e);
  return x;
}

NovElem NovElem::from_exponents(std::vector<Rat> exps) {
  std::sort(exps.begin(), exps.end());
  NovElem x;
  for (std::size_t i = 0; i < exps.size();) {
    std::size_t j = i;
    while (j < exps.size() && exps[j] == exps[i]) ++j;
    if ((j - i) % 2 == 1) x.exps_.push_back(exps[i]);
    i = j;
  }
  return x;
}

std::optional<Rat> NovElem::valuation() const {
  if (exps_.empty()) return std::nullopt;
  return exps_.front();
}

std::string NovElem::str() const {
  if (exps_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (i) out += " + ";
    if (exps_[i] == Rat(0))
      out += "1";
    else
      out += "T^{" + format_rat(exps_[i]) + "}";
  }
  return out;
}

NovElem NovElem::parse(std::string_view text) {
  text = trim(text);
  if (text == "0") return {};
  std::vector<Rat> exps;
  while (true) {
    auto plus = text.find(" + ");
    std::string_view term = trim(text.substr(0, plus));
    if (term == "1") {
      exps.push_back(Rat(0));
    } else if (term.size() > 4 && term.substr(0, 3) == "T^{" && term.back() == '}') {
      Rat e = parse_rat(term.substr(3, term.size() - 4));
      if (e == Rat(0)) throw std::invalid_argument("non-canonical term 'T^{0}'");
      exps.push_back(e);
    } else {
      throw std::invalid_argument("bad Novikov term '" + std::string(term) + "'");
    }
    if (plus == std::string_view::npos) break;
    text = text.substr(plus + 3);
  }
  for (std::size_t i = 1; i < exps.size(); ++i)
    if (!(exps[i - 1] < exps[i])) throw std::invalid_argument("Novikov terms must be strictly ascending");
  NovElem x;
  x.exps_ = std::move(exps);
  return x;
}

NovElem nov_add(const NovElem& x, const NovElem& y) {
  NovElem z;
  std::set_symmetric_difference(x.exps_.begin(), x.exps_.end(), y.exps_.begin(), y.exps_.end(),
                                std::back_inserter(z.exps_));
  return z;
}

NovElem nov_mul(const NovElem& x, const NovElem& y, const EnergyCap& cap) {
  std::map<Rat, bool> acc;
  for (const Rat& a : x.exps_)
    for (const Rat& b : y.exps_) {
      Rat e = a + b;
      if (!cap.admits(e)) break;  // y sorted ascending
      acc[e] = !acc[e];
    }
  NovElem z;
  for (auto& [e, odd] : acc)
    if (odd) z.exps_.push_back(e);
  return z;
}

NovElem nov_count(const std::vector<Rat>& energies) { return NovElem::from_exponents(energies); }

NovElem nov_truncate(const NovElem& x, const EnergyCap& cap) {
  NovElem z;
  for (const Rat& e : x.exps_)
    if (cap.admits(e)) z.exps_.push_back(e);
  return z;
}

std::optional<Rat> nov_valuation(const NovElem& x) { return x.valuation(); }

}  // namespace coppice
