#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/rational.hpp>

namespace coppice {

using Rat = boost::rational<std::int64_t>;

Rat parse_rat(std::string_view text);
std::string format_rat(const Rat& x);

// Energy bound; nullopt means unbounded.
struct EnergyCap {
  std::optional<Rat> value;

  static EnergyCap unbounded() { return {}; }
  static EnergyCap at(Rat v) { return EnergyCap{v}; }
  bool admits(const Rat& e) const { return !value || e <= *value; }
  bool bounded() const { return value.has_value(); }
  // cap - eps, used as the verification range
  EnergyCap minus(const Rat& eps) const;
  std::string str() const;
};

// Element of the Novikov field over F_2: a finite set of exponents.
class NovElem {
 public:
  NovElem() = default;
  static NovElem one() { return monomial(Rat(0)); }
  static NovElem monomial(const Rat& e);
  static NovElem from_exponents(std::vector<Rat> exps);  // parity-reduces

  const std::vector<Rat>& exponents() const { return exps_; }
  bool is_zero() const { return exps_.empty(); }
  std::optional<Rat> valuation() const;
  std::string str() const;
  static NovElem parse(std::string_view text);

  friend bool operator==(const NovElem&, const NovElem&) = default;
  friend bool operator<(const NovElem& a, const NovElem& b) { return a.exps_ < b.exps_; }

 private:
  std::vector<Rat> exps_;
  friend NovElem nov_add(const NovElem&, const NovElem&);
  friend NovElem nov_mul(const NovElem&, const NovElem&, const EnergyCap&);
  friend NovElem nov_truncate(const NovElem&, const EnergyCap&);
};

NovElem nov_add(const NovElem& x, const NovElem& y);
NovElem nov_mul(const NovElem& x, const NovElem& y, const EnergyCap& cap);
NovElem nov_count(const std::vector<Rat>& energies);
NovElem nov_truncate(const NovElem& x, const EnergyCap& cap);
std::optional<Rat> nov_valuation(const NovElem& x);

}  // namespace coppice
