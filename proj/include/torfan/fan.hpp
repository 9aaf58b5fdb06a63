#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "torfan/error.hpp"
#include "torfan/intmat.hpp"
#include "torfan/numeric.hpp"

namespace torfan {

// Ray indices of a cone, sorted ascending.
using Cone = std::vector<int>;

struct FanData {
  int dim = 0;
  std::vector<std::vector<Int>> rays;
  std::vector<Cone> max_cones;
  std::vector<std::string> labels;  // optional; defaults to x1..xm
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> problems;

  void fail(std::string msg) {
    ok = false;
    problems.push_back(std::move(msg));
  }
};

namespace detail {

// One linear constraint a.w >= c.
struct LinConstraint {
  std::vector<Int> a;
  Int c;
};

inline void normalize_constraint(LinConstraint& r) {
  Int g = abs_int(r.c);
  for (const auto& x : r.a) g = gcd_int(g, x);
  if (g > 1) {
    for (auto& x : r.a) x /= g;
    r.c /= g;
  }
}

// Exact feasibility of {w : a_i.w >= c_i} over the rationals by
// Fourier-Motzkin elimination.
inline bool fm_feasible(std::vector<LinConstraint> cons, std::size_t nvars) {
  for (std::size_t k = 0; k < nvars; ++k) {
    std::vector<LinConstraint> pos, neg, rest;
    for (auto& r : cons) {
      if (r.a[k] > 0)
        pos.push_back(std::move(r));
      else if (r.a[k] < 0)
        neg.push_back(std::move(r));
      else
        rest.push_back(std::move(r));
    }
    for (const auto& p : pos)
      for (const auto& q : neg) {
        LinConstraint r;
        Int s1 = -q.a[k];  // > 0
        Int s2 = p.a[k];   // > 0
        r.a.resize(nvars);
        for (std::size_t j = 0; j < nvars; ++j) r.a[j] = s1 * p.a[j] + s2 * q.a[j];
        r.c = s1 * p.c + s2 * q.c;
        normalize_constraint(r);
        rest.push_back(std::move(r));
      }
    if (rest.size() > 100000)
      throw UnsupportedError("fan validation: Fourier-Motzkin blow-up");
    cons = std::move(rest);
  }
  for (const auto& r : cons)
    if (r.c > 0) return false;
  return true;
}

// Is there an integral functional vanishing exactly on the common rays,
// strictly positive on the rest of tau and strictly negative on the rest of
// tau2? Exists iff the two smooth cones meet in the common face.
inline bool separating_functional_exists(const std::vector<std::vector<Int>>& rays,
                                         const Cone& tau, const Cone& tau2, int dim) {
  std::set<int> common(tau.begin(), tau.end());
  std::vector<LinConstraint> cons;
  auto push = [&](int ray, const Int& sign, const Int& c) {
    LinConstraint r;
    r.a.resize(dim);
    for (int j = 0; j < dim; ++j) r.a[j] = sign * rays[ray][j];
    r.c = c;
    cons.push_back(std::move(r));
  };
  for (int r : tau) {
    if (std::find(tau2.begin(), tau2.end(), r) != tau2.end()) {
      push(r, 1, 0);  // w.v >= 0 and w.v <= 0
      push(r, -1, 0);
    } else {
      push(r, 1, 1);  // w.v >= 1
    }
  }
  for (int r : tau2) {
    if (std::find(tau.begin(), tau.end(), r) == tau.end()) push(r, -1, 1);  // w.v <= -1
  }
  return fm_feasible(std::move(cons), static_cast<std::size_t>(dim));
}

}  // namespace detail

inline ValidationReport validate_fan(const FanData& data, bool strict) {
  ValidationReport rep;
  const int n = data.dim;
  const std::size_t m = data.rays.size();
  if (n < 0) {
    rep.fail("dim must be nonnegative");
    return rep;
  }
  if (m > 64) throw UnsupportedError("fans with more than 64 rays are not supported");

  for (std::size_t i = 0; i < m; ++i) {
    const auto& v = data.rays[i];
    if (static_cast<int>(v.size()) != n) {
      rep.fail("ray " + std::to_string(i) + " has wrong length");
      continue;
    }
    Int g = 0;
    for (const auto& x : v) g = gcd_int(g, x);
    if (g == 0)
      rep.fail("ray " + std::to_string(i) + " is zero");
    else if (g != 1)
      rep.fail("ray " + std::to_string(i) + " is not primitive");
    for (std::size_t j = i + 1; j < m; ++j)
      if (data.rays[j] == v) rep.fail("rays " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
  }
  if (!data.labels.empty()) {
    if (data.labels.size() != m) rep.fail("label count differs from ray count");
    for (std::size_t i = 0; i < data.labels.size(); ++i) {
      if (data.labels[i].empty()) rep.fail("label " + std::to_string(i) + " is empty");
      for (std::size_t j = i + 1; j < data.labels.size(); ++j)
        if (data.labels[i] == data.labels[j]) rep.fail("duplicate label '" + data.labels[i] + "'");
    }
  }
  if (data.max_cones.empty()) rep.fail("no maximal cones");

  std::vector<Cone> cones = data.max_cones;
  for (std::size_t k = 0; k < cones.size(); ++k) {
    auto& c = cones[k];
    for (int r : c)
      if (r < 0 || static_cast<std::size_t>(r) >= m) {
        rep.fail("cone " + std::to_string(k) + " references ray " + std::to_string(r));
        c.clear();
        break;
      }
    std::sort(c.begin(), c.end());
    if (std::adjacent_find(c.begin(), c.end()) != c.end())
      rep.fail("cone " + std::to_string(k) + " repeats a ray");
  }
  if (!rep.ok) return rep;

  for (std::size_t i = 0; i < cones.size(); ++i)
    for (std::size_t j = i + 1; j < cones.size(); ++j) {
      if (cones[i] == cones[j]) {
        rep.fail("maximal cones " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
        continue;
      }
      if (std::includes(cones[i].begin(), cones[i].end(), cones[j].begin(), cones[j].end()))
        rep.fail("maximal cone " + std::to_string(j) + " is contained in cone " + std::to_string(i));
      if (std::includes(cones[j].begin(), cones[j].end(), cones[i].begin(), cones[i].end()))
        rep.fail("maximal cone " + std::to_string(i) + " is contained in cone " + std::to_string(j));
    }

  std::vector<bool> used(m, false);
  for (const auto& c : cones)
    for (int r : c) used[r] = true;
  for (std::size_t i = 0; i < m; ++i)
    if (!used[i]) rep.fail("ray " + std::to_string(i) + " lies in no maximal cone");

  for (std::size_t k = 0; k < cones.size(); ++k) {
    const auto& c = cones[k];
    if (c.empty()) continue;
    IntMat mat(c.size(), n);
    for (std::size_t i = 0; i < c.size(); ++i)
      for (int j = 0; j < n; ++j) mat(i, j) = data.rays[c[i]][j];
    auto snf = smith_normal_form(mat);
    bool smooth = snf.diag.size() >= c.size();
    for (std::size_t i = 0; i < c.size() && smooth; ++i)
      if (snf.diag[i] != 1) smooth = false;
    if (!smooth)
      rep.fail("maximal cone " + std::to_string(k) +
               " is not generated by part of a lattice basis");
  }
  if (!rep.ok) return rep;

  if (strict) {
    for (std::size_t i = 0; i < cones.size(); ++i)
      for (std::size_t j = i + 1; j < cones.size(); ++j)
        if (!detail::separating_functional_exists(data.rays, cones[i], cones[j], n))
          rep.fail("maximal cones " + std::to_string(i) + " and " + std::to_string(j) +
                   " do not intersect in a common face");
  }
  return rep;
}

class Fan;
using FanPtr = std::shared_ptr<const Fan>;

// Smooth fan: primitive rays plus maximal cones given by ray index sets.
// Simplicial throughout, so faces are exactly the subsets of maximal cones.
class Fan {
public:
  enum class Check { strict, trusted };

  static FanPtr make(FanData data, Check mode = Check::strict) {
    auto rep = validate_fan(data, mode == Check::strict);
    if (!rep.ok) {
      std::string msg = "invalid fan:";
      for (const auto& p : rep.problems) msg += "\n  " + p;
      throw DomainError(msg);
    }
    return FanPtr(new Fan(std::move(data)));
  }

  int dim() const { return data_.dim; }
  std::size_t ray_count() const { return data_.rays.size(); }
  const std::vector<std::vector<Int>>& rays() const { return data_.rays; }
  const std::vector<Int>& ray(std::size_t i) const { return data_.rays.at(i); }
  const std::vector<std::string>& labels() const { return data_.labels; }
  const std::string& label(std::size_t i) const { return data_.labels.at(i); }
  const std::vector<Cone>& max_cones() const { return data_.max_cones; }
  const Cone& max_cone(std::size_t i) const { return data_.max_cones.at(i); }
  std::size_t max_cone_count() const { return data_.max_cones.size(); }
  const FanData& data() const { return data_; }

  std::optional<std::size_t> ray_by_label(const std::string& label) const {
    for (std::size_t i = 0; i < data_.labels.size(); ++i)
      if (data_.labels[i] == label) return i;
    return std::nullopt;
  }

  static std::uint64_t mask_of(const Cone& c) {
    std::uint64_t m = 0;
    for (int r : c) m |= std::uint64_t(1) << r;
    return m;
  }

  std::uint64_t max_cone_mask(std::size_t i) const { return masks_.at(i); }

  bool is_face_mask(std::uint64_t s) const {
    for (auto m : masks_)
      if ((s & ~m) == 0) return true;
    return false;
  }

  bool is_face(const Cone& c) const { return is_face_mask(mask_of(c)); }

  // Minimal non-faces, sorted by size then lexicographically.
  const std::vector<Cone>& minimal_nonfaces() const { return min_nonfaces_; }

  // Value identity of the fan; series contexts compare this.
  const std::string& signature() const { return signature_; }

  bool operator==(const Fan& o) const { return signature_ == o.signature_; }

private:
  explicit Fan(FanData data) : data_(std::move(data)) {
    for (auto& c : data_.max_cones) std::sort(c.begin(), c.end());
    if (data_.labels.empty()) {
      for (std::size_t i = 0; i < data_.rays.size(); ++i)
        data_.labels.push_back("x" + std::to_string(i + 1));
    }
    masks_.reserve(data_.max_cones.size());
    for (const auto& c : data_.max_cones) masks_.push_back(mask_of(c));
    compute_min_nonfaces();
    compute_signature();
  }

  void compute_min_nonfaces() {
    const std::size_t m = data_.rays.size();
    std::vector<std::uint64_t> faces = {0};
    std::set<std::uint64_t> face_set(faces.begin(), faces.end());
    while (!faces.empty()) {
      std::vector<std::uint64_t> next;
      std::set<std::uint64_t> next_faces, seen;
      for (auto f : faces) {
        int top = -1;
        for (std::size_t i = 0; i < m; ++i)
          if (f >> i & 1) top = static_cast<int>(i);
        for (std::size_t i = top + 1; i < m; ++i) {
          std::uint64_t s = f | (std::uint64_t(1) << i);
          if (!seen.insert(s).second) continue;
          bool boundary_ok = true;
          for (std::size_t j = 0; j < m && boundary_ok; ++j)
            if (s >> j & 1)
              if (!face_set.count(s & ~(std::uint64_t(1) << j))) boundary_ok = false;
          if (!boundary_ok) continue;
          if (is_face_mask(s)) {
            next.push_back(s);
            next_faces.insert(s);
          } else {
            Cone c;
            for (std::size_t j = 0; j < m; ++j)
              if (s >> j & 1) c.push_back(static_cast<int>(j));
            min_nonfaces_.push_back(std::move(c));
          }
        }
      }
      faces = std::move(next);
      face_set = std::move(next_faces);
    }
    std::sort(min_nonfaces_.begin(), min_nonfaces_.end(), [](const Cone& a, const Cone& b) {
      if (a.size() != b.size()) return a.size() < b.size();
      return a < b;
    });
  }

  void compute_signature() {
    std::ostringstream out;
    out << "dim=" << data_.dim << ";rays=";
    for (const auto& v : data_.rays) {
      out << "(";
      for (const auto& x : v) out << x << ",";
      out << ")";
    }
    out << ";cones=";
    for (const auto& c : data_.max_cones) {
      out << "{";
      for (int r : c) out << r << ",";
      out << "}";
    }
    out << ";labels=";
    for (const auto& l : data_.labels) out << l << ",";
    signature_ = out.str();
  }

  FanData data_;
  std::vector<std::uint64_t> masks_;
  std::vector<Cone> min_nonfaces_;
  std::string signature_;
};

// Integral dual basis of a smooth cone: row i pairs to 1 with the i-th ray
// of the cone and to 0 with the others.
inline IntMat dual_basis(const Fan& fan, const Cone& cone) {
  if (!fan.is_face(cone)) throw DomainError("dual_basis: not a cone of the fan");
  const std::size_t k = cone.size();
  const int n = fan.dim();
  IntMat r(k, n);
  for (std::size_t i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j) r(i, j) = fan.ray(cone[i])[j];
  auto snf = smith_normal_form(r);
  for (std::size_t i = 0; i < k; ++i)
    if (i >= snf.diag.size() || snf.diag[i] != 1)
      throw DomainError("dual_basis: cone rays are not part of a lattice basis");
  // R = U^-1 [I|0] V^-1, so A = U^T [I|0] V^T satisfies A R^T = I.
  IntMat ut = snf.U.transposed();
  IntMat vt = snf.V.transposed();
  IntMat a(k, n);
  for (std::size_t i = 0; i < k; ++i)
    for (int j = 0; j < n; ++j) {
      Int s = 0;
      for (std::size_t l = 0; l < k; ++l) s += ut(i, l) * vt(l, j);
      a(i, j) = s;
    }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      Int s = 0;
      for (int l = 0; l < n; ++l) s += a(i, l) * r(j, l);
      if (s != (i == j ? 1 : 0)) throw Error("dual_basis: internal check failed");
    }
  return a;
}

// Characters-to-divisors matrix: row per ray, entry <e_j, v_rho>.
inline IntMat char_divisor_map(const Fan& fan) {
  IntMat m(fan.ray_count(), fan.dim());
  for (std::size_t i = 0; i < fan.ray_count(); ++i)
    for (int j = 0; j < fan.dim(); ++j) m(i, j) = fan.ray(i)[j];
  return m;
}

// Cokernel presentation of the characters-to-divisors map.
struct PicardPresentation {
  std::size_t free_rank = 0;
  std::vector<Int> torsion;  // invariant factors > 1
  bool characters_inject = false;
  IntMat U;                // row transform of the Smith normal form
  std::vector<Int> diag;   // invariant factors of the char-divisor map
  std::size_t rays = 0;

  // Coordinates of a divisor class: torsion coordinates (mod their factor)
  // first, then the free coordinates.
  std::vector<Int> coords(const std::vector<Int>& divisor) const {
    auto y = U.apply(divisor);
    std::vector<Int> out;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (i < diag.size() && diag[i] == 1) continue;
      if (i < diag.size() && diag[i] > 1) {
        Int v = y[i] % diag[i];
        if (v < 0) v += diag[i];
        out.push_back(v);
      } else {
        out.push_back(y[i]);
      }
    }
    return out;
  }
};

inline PicardPresentation picard_presentation(const Fan& fan) {
  auto snf = smith_normal_form(char_divisor_map(fan));
  PicardPresentation p;
  p.U = snf.U;
  p.diag = snf.diag;
  p.rays = fan.ray_count();
  for (const auto& d : snf.diag)
    if (d > 1) p.torsion.push_back(d);
  p.free_rank = fan.ray_count() - snf.rank();
  p.characters_inject = snf.rank() == static_cast<std::size_t>(fan.dim());
  return p;
}

// Star subdivision at a cone of the fan: appends the ray sum as a new ray
// and replaces every maximal cone containing the center. Returns the new fan
// and the index of the new ray.
inline std::pair<FanPtr, int> star_subdivision(const Fan& fan, Cone center,
                                               const std::string& new_label = "") {
  std::sort(center.begin(), center.end());
  if (center.size() < 2)
    throw DomainError("star_subdivision: center must have at least two rays");
  if (!fan.is_face(center)) throw DomainError("star_subdivision: center is not a cone of the fan");

  FanData d;
  d.dim = fan.dim();
  d.rays = fan.rays();
  d.labels = fan.labels();
  std::vector<Int> vnew(fan.dim(), Int(0));
  for (int r : center)
    for (int j = 0; j < fan.dim(); ++j) vnew[j] += fan.ray(r)[j];
  for (const auto& v : d.rays)
    if (v == vnew) throw DomainError("star_subdivision: subdivision ray already present");
  const int new_index = static_cast<int>(d.rays.size());
  d.rays.push_back(vnew);

  std::string label = new_label;
  if (label.empty()) {
    label = "E";
    int k = 0;
    while (std::find(d.labels.begin(), d.labels.end(), label) != d.labels.end())
      label = "E" + std::to_string(++k);
  } else if (std::find(d.labels.begin(), d.labels.end(), label) != d.labels.end()) {
    throw DomainError("star_subdivision: label '" + label + "' already used");
  }
  d.labels.push_back(label);

  const std::uint64_t cmask = Fan::mask_of(center);
  for (const auto& theta : fan.max_cones()) {
    if ((cmask & ~Fan::mask_of(theta)) != 0) {
      d.max_cones.push_back(theta);
      continue;
    }
    for (int drop : center) {
      Cone piece;
      piece.reserve(theta.size());
      for (int r : theta)
        if (r != drop) piece.push_back(r);
      piece.push_back(new_index);
      std::sort(piece.begin(), piece.end());
      d.max_cones.push_back(std::move(piece));
    }
  }
  return {Fan::make(std::move(d), Fan::Check::strict), new_index};
}

}  // namespace torfan
