#pragma once

#include <algorithm>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "torfan/coeff.hpp"
#include "torfan/error.hpp"
#include "torfan/fan.hpp"
#include "torfan/fgl.hpp"
#include "torfan/series.hpp"

namespace torfan {

enum class PwMode { polynomial, exponential };

namespace detail {

// Laurent/polynomial piece arithmetic on exponent maps.
using Piece = std::map<std::vector<int>, Int>;

inline void piece_add(Piece& a, const Piece& b, int sign) {
  for (const auto& [e, c] : b) {
    auto it = a.find(e);
    if (it == a.end()) {
      Int v = sign * c;
      if (v != 0) a.emplace(e, std::move(v));
    } else {
      it->second += sign * c;
      if (it->second == 0) a.erase(it);
    }
  }
}

inline Piece piece_mul(const Piece& a, const Piece& b) {
  Piece r;
  for (const auto& [ea, ca] : a)
    for (const auto& [eb, cb] : b) {
      std::vector<int> e(ea.size());
      for (std::size_t i = 0; i < ea.size(); ++i) e[i] = ea[i] + eb[i];
      Int v = ca * cb;
      auto it = r.find(e);
      if (it == r.end()) {
        if (v != 0) r.emplace(std::move(e), std::move(v));
      } else {
        it->second += v;
        if (it->second == 0) r.erase(it);
      }
    }
  return r;
}

}  // namespace detail

// Function on the fan's support given per maximal cone: a polynomial in the
// cone's integral dual coordinates (polynomial mode, exponents >= 0) or a
// Laurent polynomial in the variables t_rho (exponential mode).
class PiecewiseFunc {
public:
  using Piece = detail::Piece;

  PiecewiseFunc(FanPtr fan, PwMode mode, std::vector<Piece> pieces)
      : fan_(std::move(fan)), mode_(mode), pieces_(std::move(pieces)) {
    if (pieces_.size() != fan_->max_cone_count())
      throw StructuralError("piecewise: one piece per maximal cone required");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const std::size_t k = fan_->max_cone(i).size();
      for (auto it = pieces_[i].begin(); it != pieces_[i].end();) {
        if (it->first.size() != k)
          throw StructuralError("piecewise: exponent length mismatch on cone " +
                                std::to_string(i));
        if (mode_ == PwMode::polynomial)
          for (int e : it->first)
            if (e < 0)
              throw DomainError("piecewise: negative exponent in polynomial mode");
        it = it->second == 0 ? pieces_[i].erase(it) : std::next(it);
      }
    }
  }

  static PiecewiseFunc zero(FanPtr fan, PwMode mode) {
    std::vector<Piece> p(fan->max_cone_count());
    return PiecewiseFunc(std::move(fan), mode, std::move(p));
  }

  const FanPtr& fan() const { return fan_; }
  PwMode mode() const { return mode_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  const Piece& piece(std::size_t i) const { return pieces_.at(i); }

  friend PiecewiseFunc operator+(const PiecewiseFunc& a, const PiecewiseFunc& b) {
    a.require_like(b, "piecewise add");
    PiecewiseFunc r = a;
    for (std::size_t i = 0; i < r.pieces_.size(); ++i)
      detail::piece_add(r.pieces_[i], b.pieces_[i], 1);
    return r;
  }

  friend PiecewiseFunc operator-(const PiecewiseFunc& a, const PiecewiseFunc& b) {
    a.require_like(b, "piecewise sub");
    PiecewiseFunc r = a;
    for (std::size_t i = 0; i < r.pieces_.size(); ++i)
      detail::piece_add(r.pieces_[i], b.pieces_[i], -1);
    return r;
  }

  friend PiecewiseFunc operator*(const PiecewiseFunc& a, const PiecewiseFunc& b) {
    a.require_like(b, "piecewise mul");
    PiecewiseFunc r = a;
    for (std::size_t i = 0; i < r.pieces_.size(); ++i)
      r.pieces_[i] = detail::piece_mul(a.pieces_[i], b.pieces_[i]);
    return r;
  }

  bool operator==(const PiecewiseFunc& o) const {
    require_like(o, "piecewise eq");
    return pieces_ == o.pieces_;
  }
  bool operator!=(const PiecewiseFunc& o) const { return !(*this == o); }

  // Piece i restricted to a subcone: dropped coordinates go to 0 in
  // polynomial mode and the dropped t_rho go to 1 in exponential mode;
  // exponents are reindexed to the subcone's rays.
  Piece restricted_piece(std::size_t i, const Cone& sub) const {
    const Cone& cone = fan_->max_cone(i);
    std::vector<int> keep;  // positions within cone
    for (int r : sub) {
      auto it = std::lower_bound(cone.begin(), cone.end(), r);
      if (it == cone.end() || *it != r)
        throw DomainError("piecewise restriction: not a subcone");
      keep.push_back(static_cast<int>(it - cone.begin()));
    }
    Piece out;
    for (const auto& [e, c] : pieces_[i]) {
      if (mode_ == PwMode::polynomial) {
        bool kill = false;
        for (std::size_t p = 0; p < e.size() && !kill; ++p)
          if (e[p] != 0 && std::find(keep.begin(), keep.end(), static_cast<int>(p)) == keep.end())
            kill = true;
        if (kill) continue;
      }
      std::vector<int> sub_e(keep.size());
      for (std::size_t p = 0; p < keep.size(); ++p) sub_e[p] = e[keep[p]];
      auto it = out.find(sub_e);
      if (it == out.end()) {
        out.emplace(std::move(sub_e), c);
      } else {
        it->second += c;
        if (it->second == 0) out.erase(it);
      }
    }
    return out;
  }

  std::string str() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      out << "cone {";
      const Cone& c = fan_->max_cone(i);
      for (std::size_t j = 0; j < c.size(); ++j) out << (j ? "," : "") << fan_->label(c[j]);
      out << "}: " << piece_str(i) << "\n";
    }
    return out.str();
  }

  std::string piece_str(std::size_t i) const {
    const auto& piece = pieces_[i];
    if (piece.empty()) return "0";
    const Cone& cone = fan_->max_cone(i);
    std::ostringstream out;
    bool first = true;
    for (const auto& [e, c] : piece) {
      Int a = c;
      if (first) {
        if (a < 0) {
          out << "-";
          a = -a;
        }
      } else {
        out << (a < 0 ? " - " : " + ");
        if (a < 0) a = -a;
      }
      std::ostringstream mono;
      bool m1 = true;
      for (std::size_t p = 0; p < e.size(); ++p) {
        if (e[p] == 0) continue;
        if (!m1) mono << "*";
        mono << (mode_ == PwMode::polynomial ? "y_" : "t_") << fan_->label(cone[p]);
        if (e[p] != 1) mono << "^" << e[p];
        m1 = false;
      }
      if (m1)
        out << a;
      else if (a == 1)
        out << mono.str();
      else
        out << a << "*" << mono.str();
      first = false;
    }
    return out.str();
  }

private:
  void require_like(const PiecewiseFunc& o, const char* where) const {
    if (fan_->signature() != o.fan_->signature() || mode_ != o.mode_)
      throw StructuralError(std::string(where) + ": mismatched piecewise contexts");
  }

  FanPtr fan_;
  PwMode mode_;
  std::vector<Piece> pieces_;
};

// The degree-one cut-off function of a ray: its dual coordinate on every
// maximal cone containing the ray, zero elsewhere.
inline PiecewiseFunc courant_function(const FanPtr& fan, int ray) {
  if (ray < 0 || static_cast<std::size_t>(ray) >= fan->ray_count())
    throw DomainError("courant_function: ray index out of range");
  std::vector<PiecewiseFunc::Piece> pieces(fan->max_cone_count());
  for (std::size_t i = 0; i < fan->max_cone_count(); ++i) {
    const Cone& c = fan->max_cone(i);
    auto it = std::lower_bound(c.begin(), c.end(), ray);
    if (it == c.end() || *it != ray) continue;
    std::vector<int> e(c.size(), 0);
    e[it - c.begin()] = 1;
    pieces[i].emplace(std::move(e), Int(1));
  }
  return PiecewiseFunc(fan, PwMode::polynomial, std::move(pieces));
}

// Ray classes to piecewise functions: x_rho goes to the Courant coordinate
// in polynomial mode (additive law) and to 1 - t_rho in exponential mode
// (multiplicative law with v = 1); integer coefficients only.
inline PiecewiseFunc to_piecewise(const Series& f, const FormalGroupLaw& law, PwMode mode) {
  if (!f.ctx()->fan) throw StructuralError("to_piecewise: fan context required");
  if (f.ctx()->params->size() != 0 || law.params()->size() != 0)
    throw DomainError("to_piecewise: integer coefficients required");
  if (mode == PwMode::polynomial) {
    if (law.kind() != FglKind::additive)
      throw DomainError("to_piecewise: polynomial mode pairs with the additive law");
  } else {
    if (law.kind() != FglKind::multiplicative ||
        !(law.mult_v() == CoeffElem::one(law.params())))
      throw DomainError(
          "to_piecewise: exponential mode pairs with the multiplicative law at v = 1");
  }
  const FanPtr& fan = f.ctx()->fan;
  std::vector<PiecewiseFunc::Piece> pieces(fan->max_cone_count());
  for (std::size_t i = 0; i < fan->max_cone_count(); ++i) {
    const Cone& cone = fan->max_cone(i);
    const std::size_t k = cone.size();
    std::vector<int> pos(fan->ray_count(), -1);
    for (std::size_t p = 0; p < k; ++p) pos[cone[p]] = static_cast<int>(p);
    PiecewiseFunc::Piece acc;
    for (const auto& [m, c] : f.terms()) {
      bool outside = false;
      for (std::size_t r = 0; r < m.size() && !outside; ++r)
        if (m[r] > 0 && pos[r] < 0) outside = true;
      if (outside) continue;
      if (mode == PwMode::polynomial) {
        std::vector<int> e(k, 0);
        for (std::size_t r = 0; r < m.size(); ++r)
          if (m[r] > 0) e[pos[r]] = m[r];
        auto it = acc.find(e);
        if (it == acc.end())
          acc.emplace(std::move(e), c.as_int());
        else if ((it->second += c.as_int()) == 0)
          acc.erase(it);
      } else {
        PiecewiseFunc::Piece term{{std::vector<int>(k, 0), c.as_int()}};
        for (std::size_t r = 0; r < m.size(); ++r) {
          if (m[r] == 0) continue;
          PiecewiseFunc::Piece base;  // 1 - t_rho
          base.emplace(std::vector<int>(k, 0), Int(1));
          std::vector<int> e(k, 0);
          e[pos[r]] = 1;
          base.emplace(std::move(e), Int(-1));
          for (int rep = 0; rep < m[r]; ++rep) term = detail::piece_mul(term, base);
        }
        detail::piece_add(acc, term, 1);
      }
    }
    pieces[i] = std::move(acc);
  }
  return PiecewiseFunc(fan, mode, std::move(pieces));
}

struct PwReport {
  bool ok = true;
  std::vector<std::string> failures;

  void fail(std::string msg) {
    ok = false;
    failures.push_back(std::move(msg));
  }
};

// Restrictions of neighbouring pieces to the shared face must agree.
inline PwReport pw_compatibility(const PiecewiseFunc& f) {
  PwReport rep;
  const Fan& fan = *f.fan();
  for (std::size_t i = 0; i < fan.max_cone_count(); ++i)
    for (std::size_t j = i + 1; j < fan.max_cone_count(); ++j) {
      Cone shared;
      std::set_intersection(fan.max_cone(i).begin(), fan.max_cone(i).end(),
                            fan.max_cone(j).begin(), fan.max_cone(j).end(),
                            std::back_inserter(shared));
      if (f.restricted_piece(i, shared) != f.restricted_piece(j, shared))
        rep.fail("pieces on maximal cones " + std::to_string(i) + " and " +
                 std::to_string(j) + " disagree on the shared face");
    }
  return rep;
}

// Checks compatibility, locates a maximal cone containing the point, and
// evaluates there. Polynomial mode returns an integer constant; exponential
// mode returns a Laurent monomial sum in q (the value q^k encodes the
// exponential of k).
inline CoeffElem pw_check_eval(const PiecewiseFunc& f, const std::vector<Int>& point) {
  auto rep = pw_compatibility(f);
  if (!rep.ok) throw DomainError("pw_check_eval: " + rep.failures.front());
  const Fan& fan = *f.fan();
  if (point.size() != static_cast<std::size_t>(fan.dim()))
    throw DomainError("pw_check_eval: point dimension mismatch");
  for (std::size_t i = 0; i < fan.max_cone_count(); ++i) {
    const Cone& cone = fan.max_cone(i);
    IntMat duals = dual_basis(fan, cone);
    std::vector<Int> coords(cone.size());
    bool inside = true;
    for (std::size_t p = 0; p < cone.size() && inside; ++p) {
      Int s = 0;
      for (int j = 0; j < fan.dim(); ++j) s += duals(p, j) * point[j];
      if (s < 0) inside = false;
      coords[p] = s;
    }
    if (!inside) continue;
    std::vector<Int> recon(fan.dim(), Int(0));
    for (std::size_t p = 0; p < cone.size(); ++p)
      for (int j = 0; j < fan.dim(); ++j) recon[j] += coords[p] * fan.ray(cone[p])[j];
    if (recon != point) continue;
    if (f.mode() == PwMode::polynomial) {
      Int value = 0;
      for (const auto& [e, c] : f.piece(i)) {
        Int term = c;
        for (std::size_t p = 0; p < e.size(); ++p) term *= pow_int(coords[p], e[p]);
        value += term;
      }
      return CoeffElem::from_int(CoeffElem::empty_spec(), value);
    }
    static const ParamSpecPtr qspec = ParamSpec::make({"q"}, {"q"});
    CoeffElem value = CoeffElem::zero(qspec);
    for (const auto& [e, c] : f.piece(i)) {
      Int k = 0;
      for (std::size_t p = 0; p < e.size(); ++p) k += Int(e[p]) * coords[p];
      if (k > 1000000 || k < -1000000)
        throw UnsupportedError("pw_check_eval: exponent overflow");
      value += CoeffElem::monomial(qspec, {static_cast<int>(k)}, c);
    }
    return value;
  }
  throw DomainError("pw_check_eval: point lies outside the support of the fan");
}

}  // namespace torfan
