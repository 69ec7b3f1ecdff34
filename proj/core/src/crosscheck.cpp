#include "spinquant/crosscheck.hpp"

#include "spinquant/conformal.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>
#include <sstream>

namespace spinq {

namespace {

using Vec = std::vector<Scalar>;
using Mat = std::vector<Vec>; // rows

Mat zero_mat(std::size_t r, std::size_t c) { return Mat(r, Vec(c, Scalar(0))); }

Mat identity(std::size_t d) {
  Mat m = zero_mat(d, d);
  for (std::size_t i = 0; i < d; ++i)
    m[i][i] = Scalar(1);
  return m;
}

Mat mul(const Mat &a, const Mat &b) {
  const std::size_t r = a.size(), inner = b.size(), c = inner ? b[0].size() : 0;
  Mat out = zero_mat(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t l = 0; l < inner; ++l) {
      if (a[i][l].is_zero())
        continue;
      for (std::size_t j = 0; j < c; ++j)
        if (!b[l][j].is_zero())
          out[i][j] += a[i][l] * b[l][j];
    }
  return out;
}

Vec matvec(const Mat &a, const Vec &v) {
  Vec out(a.size(), Scalar(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      if (!v[j].is_zero() && !a[i][j].is_zero())
        out[i] += a[i][j] * v[j];
  return out;
}

bool is_zero(const Vec &v) {
  return std::all_of(v.begin(), v.end(), [](const Scalar &s) { return s.is_zero(); });
}

// a - s I
Mat shifted(const Mat &a, const Rational &s) {
  Mat out = a;
  for (std::size_t i = 0; i < a.size(); ++i)
    out[i][i] -= Scalar(s);
  return out;
}

bool rational_sqrt(const Rational &q, Rational &out) {
  if (q < 0)
    return false;
  mpz_class num = q.get_num(), den = q.get_den();
  if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
    return false;
  mpz_class a, b;
  mpz_sqrt(a.get_mpz_t(), num.get_mpz_t());
  mpz_sqrt(b.get_mpz_t(), den.get_mpz_t());
  out = Rational(a, b);
  out.canonicalize();
  return true;
}

std::string show(const Rational &q) {
  std::ostringstream os;
  os << q;
  return os.str();
}

// x-free part of one graded component
struct Fiber {
  int k = 0, kappa = 0;
  std::vector<Mono> basis;
  std::map<Mono, std::size_t> index;
  Mat c0;
  Rational c1, c2;
  std::vector<std::size_t> pieces; // indices into the report
  std::vector<Mat> proj;           // one projector per piece

  Vec vec(const Terms<Scalar> &t) const {
    Vec v(basis.size(), Scalar(0));
    for (const auto &[m, c] : t) {
      auto it = index.find(m);
      if (it == index.end())
        throw std::logic_error("fibre vector outside its component: " + render_mono(m));
      v[it->second] = c;
    }
    return v;
  }
  Terms<Scalar> terms(const Vec &v) const {
    Terms<Scalar> t;
    for (std::size_t i = 0; i < v.size(); ++i)
      t.add(basis[i], v[i]);
    return t;
  }
};

Terms<Scalar> unit(const Mono &m) {
  Terms<Scalar> t;
  t.add(m, Scalar(1));
  return t;
}

Terms<Scalar> times_x(const Terms<Scalar> &t, const Mono &xa) {
  Terms<Scalar> out;
  for (const auto &[m, c] : t) {
    Mono m2 = m;
    for (int i = 0; i < kMaxDim; ++i)
      m2.x[i] = static_cast<std::uint8_t>(m2.x[i] + xa.x[i]);
    out.add(m2, c);
  }
  return out;
}

// Distinct eigenvalues of `m` restricted to the span of `start`, all required rational.
std::vector<Rational> eigenvalues(const Mat &m, const std::vector<Vec> &start, std::string &err) {
  std::set<Rational> out;
  for (const Vec &v0 : start) {
    if (is_zero(v0))
      continue;
    std::vector<Vec> kry{v0};
    for (;;) {
      kry.push_back(matvec(m, kry.back()));
      const std::size_t w = kry.size();
      Echelon<Scalar> E(w);
      for (std::size_t r = 0; r < v0.size(); ++r) {
        Vec row(w);
        for (std::size_t c = 0; c < w; ++c)
          row[c] = kry[c][r];
        E.insert(std::move(row));
      }
      if (E.rank() == w)
        continue;
      auto ns = E.nullspace(w);
      std::vector<Rational> coeffs;
      for (const auto &s : ns.at(0)) {
        if (!s.is_rational()) {
          err = "non-rational minimal polynomial";
          return {};
        }
        coeffs.push_back(s.to_rational());
      }
      auto roots = rational_roots_of(coeffs);
      // a split minimal polynomial of a diagonalizable map has distinct roots, one per degree
      if (roots.size() + 1 != w) {
        err = "spectrum not rational or not semisimple";
        return {};
      }
      out.insert(roots.begin(), roots.end());
      break;
    }
  }
  return {out.begin(), out.end()};
}

// Projector onto the eigenvalue e of m among `all`, composed with `base`.
Mat projector(const Mat &m, const std::vector<Rational> &all, const Rational &e, Mat base) {
  for (const auto &o : all)
    if (o != e) {
      Mat f = shifted(m, o);
      Scalar inv = Scalar(Rational(1) / (e - o));
      for (auto &row : f)
        for (auto &x : row)
          x *= inv;
      base = mul(f, base);
    }
  return base;
}

Rational rho_squared(int N) {
  Rational s = 0;
  for (int i = 1; i <= N / 2; ++i) {
    Rational r = frac(N, 2) - i;
    s += r * r;
  }
  return s;
}

int perm_sign(std::vector<int> v) {
  int s = 1;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (v[i] > v[j])
        s = -s;
  return s;
}

class Crosscheck {
public:
  Crosscheck(Signature sig, MapKind kind, const CasimirOptions &opt)
      : sig_(sig), n_(sig.n()), kind_(kind), opt_(opt), T_(sig) {}

  CasimirReport run();

private:
  void fail(std::string msg) {
    rep_.ok = false;
    rep_.failures.push_back(std::move(msg));
  }
  Fiber &fiber(int k, int kappa) { return fibers_.at({k, kappa}); }
  void build_fiber(int k, int kappa);
  void split_pfaffian(Fiber &f);
  void fill_levi();
  void check_fibrewise();
  void check_central(const ModuleAction &M, const char *name);
  std::set<std::pair<std::size_t, std::size_t>> connections(const EquivariantMap &map);
  void coincidences(const EquivariantMap &map);
  void conjugation(const EquivariantMap &map);

  Signature sig_;
  int n_;
  MapKind kind_;
  CasimirOptions opt_;
  TensorModule T_;
  std::map<std::pair<int, int>, Fiber> fibers_;
  std::vector<Mat> pf2_; // squared Pfaffian per fibre, n = 4
  CasimirReport rep_;
};

void Crosscheck::build_fiber(int k, int kappa) {
  Fiber f;
  f.k = k;
  f.kappa = kappa;
  f.basis = graded_monomials(sig_, 0, k, kappa);
  for (std::size_t i = 0; i < f.basis.size(); ++i)
    f.index.emplace(f.basis[i], i);
  const std::size_t d = f.basis.size();
  f.c0 = zero_mat(d, d);
  bool scalar = true;
  for (std::size_t col = 0; col < d; ++col) {
    auto img = casimir_apply(T_, unit(f.basis[col]));
    Vec v = f.vec(img[0]);
    for (std::size_t r = 0; r < d; ++r)
      f.c0[r][col] = v[r];
    for (int e : {1, 2}) {
      Scalar s = img[e].coeff(f.basis[col]);
      Terms<Scalar> rest = img[e];
      rest.add(f.basis[col], -s);
      if (!rest.is_zero() || !s.is_rational()) {
        scalar = false;
        continue;
      }
      Rational &target = e == 1 ? f.c1 : f.c2;
      if (col == 0)
        target = s.to_rational();
      else if (target != s.to_rational())
        scalar = false;
    }
  }
  const std::string where = "(" + std::to_string(k) + "," + std::to_string(kappa) + ")";
  if (!scalar)
    fail("delta parts of the Casimir are not scalar on " + where);
  // the conformal weight enters only through a = n delta - n/2 - k
  if (f.c2 != frac(n_, 2) || f.c1 != -(frac(n_, 2) + k))
    fail("unexpected delta dependence of the Casimir on " + where);

  std::vector<Vec> start;
  for (std::size_t i = 0; i < d; ++i) {
    Vec e(d, Scalar(0));
    e[i] = Scalar(1);
    start.push_back(std::move(e));
  }
  std::string err;
  auto ev = eigenvalues(f.c0, start, err);
  if (!err.empty())
    fail(err + " on " + where);
  // sum of projectors must be the identity
  Mat total = zero_mat(d, d);
  for (const auto &e : ev) {
    Mat P = projector(f.c0, ev, e, identity(d));
    for (std::size_t i = 0; i < d; ++i)
      for (std::size_t j = 0; j < d; ++j)
        total[i][j] += P[i][j];
    CasimirPiece piece;
    piece.k = k;
    piece.kappa = kappa;
    piece.c0 = e;
    piece.c1 = f.c1;
    piece.c2 = f.c2;
    f.pieces.push_back(rep_.pieces.size());
    f.proj.push_back(std::move(P));
    rep_.pieces.push_back(piece);
  }
  if (d > 0 && total != identity(d))
    fail("Casimir eigenspaces do not span " + where);
  auto [it, _] = fibers_.emplace(std::make_pair(k, kappa), std::move(f));
  if (n_ == 4)
    split_pfaffian(it->second);
}

// o(4) has rank 2: the quadratic Casimir alone does not fix the highest weight. The
// Pfaffian eps^{ijkl} M_ij M_kl is central in U(o(p,q)); its square has rational spectrum.
void Crosscheck::split_pfaffian(Fiber &f) {
  const std::size_t d = f.basis.size();
  if (d == 0)
    return;
  std::map<std::pair<int, int>, Mat> R;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) {
      Mat m = zero_mat(d, d);
      auto g = rotation(sig_, i, j);
      for (std::size_t col = 0; col < d; ++col) {
        Vec v = f.vec(T_.base(g, unit(f.basis[col])));
        for (std::size_t r = 0; r < d; ++r)
          m[r][col] = v[r];
      }
      R.emplace(std::make_pair(i, j), std::move(m));
    }
  Mat pf = zero_mat(d, d);
  for (const auto &[a, Ra] : R)
    for (const auto &[b, Rb] : R) {
      std::vector<int> idx{a.first, a.second, b.first, b.second};
      std::set<int> distinct(idx.begin(), idx.end());
      if (distinct.size() != 4)
        continue;
      Mat prod = mul(Ra, Rb);
      Scalar s(perm_sign(idx));
      for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
          if (!prod[r][c].is_zero())
            pf[r][c] += s * prod[r][c];
    }
  Mat q = mul(pf, pf);
  std::vector<std::size_t> pieces;
  std::vector<Mat> proj;
  for (std::size_t p = 0; p < f.pieces.size(); ++p) {
    const Mat &P = f.proj[p];
    std::vector<Vec> start;
    for (std::size_t j = 0; j < d; ++j) {
      Vec col(d);
      for (std::size_t r = 0; r < d; ++r)
        col[r] = P[r][j];
      start.push_back(std::move(col));
    }
    std::string err;
    auto ev = eigenvalues(q, start, err);
    if (!err.empty())
      fail(err + " for the Pfaffian");
    const CasimirPiece base = rep_.pieces[f.pieces[p]];
    for (std::size_t e = 0; e < ev.size(); ++e) {
      Mat Pe = projector(q, ev, ev[e], P);
      std::size_t id = f.pieces[p];
      if (e > 0) {
        id = rep_.pieces.size();
        rep_.pieces.push_back(base);
      }
      pieces.push_back(id);
      proj.push_back(std::move(Pe));
      pf2_.resize(rep_.pieces.size());
      pf2_[id] = Mat{{Scalar(ev[e])}};
    }
  }
  f.pieces = std::move(pieces);
  f.proj = std::move(proj);
}

// |mu + rho| from c0: eigenvalue = (a^2 + |mu + rho_l|^2 - |rho|^2) / (2n) with a = n delta - n/2 - k.
void Crosscheck::fill_levi() {
  const Rational rho2 = rho_squared(n_ + 2);
  // Pfaffian scale from Lambda^2, whose highest weight (1,1) gives x1 x2 = 2
  Rational pf_ref = 0;
  if (n_ == 4) {
    const Fiber &f = fiber(0, 2);
    pf_ref = pf2_.at(f.pieces.at(0))[0][0].to_rational();
    if (pf_ref == 0)
      fail("degenerate Pfaffian normalization");
  }
  for (auto &[key, f] : fibers_) {
    for (std::size_t id : f.pieces) {
      CasimirPiece &p = rep_.pieces[id];
      const Rational a0 = -(frac(n_, 2) + p.k);
      const Rational s2 = Rational(2 * n_) * p.c0 - a0 * a0 + rho2;
      Rational x;
      if (n_ <= 3) {
        if (!rational_sqrt(s2, x))
          fail("irrational highest weight in " + p.str());
        p.levi = {x};
        continue;
      }
      // x1^2 + x2^2 = s2, x1^2 x2^2 = 4 pf^2 / pf_ref
      const Rational prod = Rational(4) * pf2_.at(id)[0][0].to_rational() / pf_ref;
      Rational disc = s2 * s2 - Rational(4) * prod, r;
      Rational x1, x2;
      if (!rational_sqrt(disc, r) || !rational_sqrt((s2 + r) / 2, x1) || !rational_sqrt((s2 - r) / 2, x2))
        fail("irrational highest weight in " + p.str());
      p.levi = {x1, x2};
    }
  }
  for (auto &[key, f] : fibers_)
    for (std::size_t i = 0; i < f.pieces.size(); ++i) {
      // rank of the projector
      Echelon<Scalar> E(f.basis.size());
      for (const auto &row : f.proj[i])
        E.insert(row);
      rep_.pieces[f.pieces[i]].dim = E.rank();
    }
}

// The Casimir of T is an order-zero operator: it commutes with multiplication by x.
void Crosscheck::check_fibrewise() {
  for (const auto &[key, f] : fibers_)
    for (const Mono &b : f.basis) {
      auto base = casimir_apply(T_, unit(b));
      for (int i = 0; i < n_; ++i) {
        Mono xi;
        xi.x[i] = 1;
        auto img = casimir_apply(T_, times_x(unit(b), xi));
        for (int e = 0; e < 3; ++e)
          if (img[e] != times_x(base[e], xi)) {
            fail("Casimir of T is not fibrewise at x" + std::to_string(i + 1) + "*" + render_mono(b));
            return;
          }
        ++rep_.fibrewise_checks;
      }
    }
}

// [C, L_X] = 0 as a polynomial identity in delta.
void Crosscheck::check_central(const ModuleAction &M, const char *name) {
  const auto gens = generators(sig_);
  const int cap = opt_.max_xi < 0 ? std::min(n_, 3) : opt_.max_xi;
  for (int k = 0; k <= opt_.max_p; ++k)
    for (int kappa = 0; kappa <= cap; ++kappa)
      for (const Mono &m : graded_monomials(sig_, opt_.central_x, k, kappa)) {
        const Terms<Scalar> v = unit(m);
        const auto Cv = casimir_apply(M, v);
        for (const auto &g : gens) {
          const auto A = casimir_apply(M, M.base(g, v));
          const auto B = casimir_apply(M, M.weight_part(g, v));
          for (int d = 0; d <= 3; ++d) {
            Terms<Scalar> lhs, rhs;
            if (d <= 2) {
              lhs += A[d];
              rhs += M.base(g, Cv[d]);
            }
            if (d >= 1) {
              lhs += B[d - 1];
              rhs += M.weight_part(g, Cv[d - 1]);
            }
            if (lhs != rhs) {
              fail(std::string("Casimir of ") + name + " does not commute with " + g.name() + " on " +
                   render_mono(m));
              return;
            }
          }
          ++rep_.central_checks;
        }
      }
}

std::set<std::pair<std::size_t, std::size_t>> Crosscheck::connections(const EquivariantMap &map) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (const auto &b : map.blocks) {
    if (b.k == 0 || b.ops.empty())
      continue;
    const Fiber &top = fiber(b.k, b.kappa);
    const auto xmonos = graded_monomials(sig_, b.k, 0, 0);
    for (std::size_t p = 0; p < top.pieces.size(); ++p) {
      // independent columns of the projector
      std::vector<Vec> cols;
      Echelon<Scalar> E(top.basis.size());
      for (std::size_t j = 0; j < top.basis.size(); ++j) {
        Vec col(top.basis.size());
        for (std::size_t r = 0; r < col.size(); ++r)
          col[r] = top.proj[p][r][j];
        if (E.insert(col))
          cols.push_back(std::move(col));
      }
      for (const auto &op : b.ops)
        for (const Mono &xa : xmonos)
          for (const Vec &u : cols) {
            auto img = op.apply(sig_, times_x(top.terms(u), xa));
            // group by component and x-monomial, project fibrewise
            std::map<std::pair<std::pair<int, int>, Mono>, Terms<Scalar>> groups;
            for (const auto &[m, c] : img) {
              Mono xm, fm = m;
              xm.x = m.x;
              fm.x = {};
              groups[{{m.pdeg(), m.xideg()}, xm}].add(fm, c);
            }
            for (const auto &[key, t] : groups) {
              const Fiber &low = fiber(key.first.first, key.first.second);
              const Vec v = low.vec(t);
              for (std::size_t q = 0; q < low.pieces.size(); ++q)
                if (!is_zero(matvec(low.proj[q], v)))
                  out.emplace(top.pieces[p], low.pieces[q]);
            }
          }
    }
  }
  return out;
}

void Crosscheck::coincidences(const EquivariantMap &map) {
  const auto conn = connections(map);
  std::set<Rational> predicted;
  for (const auto &b : map.blocks) {
    if (b.k == 0)
      continue;
    const Fiber &top = fiber(b.k, b.kappa);
    for (std::size_t from : top.pieces)
      for (const auto &[key, low] : fibers_) {
        if (key.first >= b.k || (key.second - b.kappa) % 2 != 0)
          continue;
        for (std::size_t to : low.pieces) {
          const CasimirPiece &P = rep_.pieces[from], &Q = rep_.pieces[to];
          std::vector<Rational> diff{P.c0 - Q.c0, P.c1 - Q.c1, P.c2 - Q.c2};
          std::vector<Rational> roots;
          if (diff[2] == 0 && diff[1] == 0) {
            if (diff[0] == 0)
              fail("identical Casimir eigenvalues for all delta: " + P.str() + " and " + Q.str());
            continue;
          }
          roots = rational_roots_of(diff);
          for (const auto &d : roots) {
            Coincidence c;
            c.delta = d;
            c.from = from;
            c.to = to;
            c.connected = conn.count({from, to}) > 0;
            c.same_character = P.character(n_, d) == Q.character(n_, d);
            if (c.degenerate())
              predicted.insert(d);
            rep_.coincidences.push_back(c);
          }
        }
      }
  }
  rep_.predicted.assign(predicted.begin(), predicted.end());
  std::set<Rational> res;
  for (const auto &r : rep_.resonances)
    res.insert(r.delta);
  for (const auto &r : res)
    if (!predicted.count(r))
      rep_.missing.push_back(r);
  for (const auto &p : predicted)
    if (!res.count(p))
      rep_.extra.push_back(p);
  if (!rep_.missing.empty())
    fail("resonances without a Casimir coincidence");
  if (!rep_.extra.empty())
    fail("Casimir coincidences that are not resonances");
}

// C o M = M o C at a non-resonant delta, and principal symbols are kept.
void Crosscheck::conjugation(const EquivariantMap &map) {
  std::set<Rational> bad;
  for (const auto &r : rep_.resonances)
    bad.insert(r.delta);
  for (const auto &c : rep_.coincidences)
    bad.insert(c.delta);
  Rational delta = frac(2, 7);
  for (long den = 7; bad.count(delta); den += 2)
    delta = frac(2, den);
  rep_.conjugation_delta = delta;
  const Scalar t(delta), t2(delta * delta);
  auto C = [&](const ModuleAction &M, const Terms<Scalar> &v) {
    auto parts = casimir_apply(M, v);
    Terms<Scalar> out = parts[0];
    out.add(parts[1], t);
    out.add(parts[2], t2);
    return out;
  };
  HamiltonianModule S(sig_, map.spec.conv);
  OperatorModule D(sig_, opt_.lambda);
  for (const auto &b : map.blocks) {
    if (b.k > opt_.max_p)
      continue;
    for (const Mono &m : graded_monomials(sig_, std::min(b.k, opt_.central_x), b.k, b.kappa)) {
      const SuperSymbol v(sig_, unit(m));
      Terms<Scalar> lhs, rhs, top;
      if (kind_ == MapKind::Superization) {
        const SuperSymbol Sv = apply_superization(map, v, t);
        lhs = C(S, Sv.terms());
        rhs = apply_superization(map, SuperSymbol(sig_, C(T_, v.terms())), t).terms();
        top = Sv.terms();
      } else {
        const SpinorOperator Qv = apply_quantization(map, v, t);
        lhs = C(D, Qv.terms());
        rhs = apply_quantization(map, SuperSymbol(sig_, C(S, v.terms())), t).terms();
        top = full_symbol(Qv, map.spec.conv).terms();
      }
      if (lhs != rhs) {
        fail("C o M != M o C on " + render_mono(m) + " at delta = " + show(delta));
        return;
      }
      top.add(m, Scalar(-1));
      for (const auto &[mm, c] : top)
        if (mm.pdeg() >= b.k) {
          fail("principal symbol changed on " + render_mono(m));
          return;
        }
      ++rep_.conjugation_checks;
    }
  }
}

CasimirReport Crosscheck::run() {
  const auto t0 = std::chrono::steady_clock::now();
  if (n_ < 2 || n_ > 4)
    throw std::invalid_argument("casimir_crosscheck: n must be 2, 3 or 4");
  for (int k = 0; k <= opt_.max_p; ++k)
    for (int kappa = 0; kappa <= n_; ++kappa)
      build_fiber(k, kappa);
  fill_levi();
  check_fibrewise();

  MapSpec spec;
  spec.kind = kind_;
  spec.signature = sig_;
  spec.delta = Affine::formal();
  spec.lambda = Affine::constant(opt_.lambda);
  spec.max_p = opt_.max_p;
  spec.max_xi = opt_.max_xi;
  const EquivariantMap map = build_map(spec);
  rep_.resonances = resonances(map);
  coincidences(map);

  if (kind_ == MapKind::Superization) {
    check_central(T_, "T");
    check_central(HamiltonianModule(sig_, spec.conv), "S");
  } else {
    check_central(HamiltonianModule(sig_, spec.conv), "S");
    check_central(OperatorModule(sig_, opt_.lambda), "D");
  }
  if (opt_.conjugation)
    conjugation(map);
  rep_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep_;
}

} // namespace

Rational CasimirPiece::eigenvalue(const Rational &delta) const { return c0 + c1 * delta + c2 * delta * delta; }

std::vector<Rational> CasimirPiece::character(int n, const Rational &delta) const {
  Rational a = Rational(n) * delta - frac(n, 2) - k;
  std::vector<Rational> out{abs(a)};
  out.insert(out.end(), levi.begin(), levi.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::string CasimirPiece::str() const {
  std::ostringstream os;
  os << "(" << k << "," << kappa << ")[" << c0;
  for (const auto &x : levi)
    os << ";" << x;
  os << "]";
  return os.str();
}

CasimirReport casimir_crosscheck(Signature sig, MapKind kind, const CasimirOptions &opt) {
  return Crosscheck(sig, kind, opt).run();
}

} // namespace spinq
