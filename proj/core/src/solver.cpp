#include "spinquant/solver.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <set>

namespace spinq {

namespace {

enum class Obj { P, Xi, Dx, Dp, Dxi };

struct PairInfo {
  Obj a, b;
  bool eta; // both indices on the same side: contract with eta
  const char *name;
};

constexpr PairInfo kPairs[kPairKinds] = {
    {Obj::P, Obj::P, true, "p.p"},      {Obj::P, Obj::Xi, false, "p.xi"},   {Obj::P, Obj::Dx, true, "p.dx"},
    {Obj::P, Obj::Dxi, true, "p.dxi"},  {Obj::Xi, Obj::Dx, false, "xi.dx"}, {Obj::Xi, Obj::Dp, true, "xi.dp"},
    {Obj::Dx, Obj::Dx, true, "dx.dx"},  {Obj::Dx, Obj::Dp, false, "dx.dp"}, {Obj::Dx, Obj::Dxi, true, "dx.dxi"},
    {Obj::Dp, Obj::Dp, true, "dp.dp"},  {Obj::Dp, Obj::Dxi, false, "dp.dxi"},
};

bool is_mult(Obj o) { return o == Obj::P || o == Obj::Xi; }

struct Atom {
  Obj kind;
  int i;
};

// One index assignment of a correction operator: eta factor, derivatives d1..ds, multiplications m1..mr.
struct Expansion {
  int sign = 1;
  std::vector<Atom> ders, mults;
};

// Applies a single atom to a monomial in place, folding the numeric factor into f;
// returns false if the term vanishes.
bool apply_atom(const Atom &a, Mono &m, long &f) {
  const int i = a.i;
  const std::uint16_t bit = static_cast<std::uint16_t>(1u << i);
  switch (a.kind) {
  case Obj::P:
    ++m.p[i];
    return true;
  case Obj::Xi:
    if (m.xi & bit)
      return false;
    if (bits_below(m.xi, i) & 1)
      f = -f;
    m.xi |= bit;
    return true;
  case Obj::Dx:
    if (!m.x[i])
      return false;
    f *= m.x[i]--;
    return true;
  case Obj::Dp:
    if (!m.p[i])
      return false;
    f *= m.p[i]--;
    return true;
  case Obj::Dxi:
    if (!(m.xi & bit))
      return false;
    if (bits_below(m.xi, i) & 1)
      f = -f;
    m.xi &= static_cast<std::uint16_t>(~bit);
    return true;
  }
  return false;
}

std::vector<Expansion> expand(const CorrectionOp &op, Signature sig) {
  std::vector<int> pairs;
  for (int k = 0; k < kPairKinds; ++k)
    for (int r = 0; r < op.count[k]; ++r)
      pairs.push_back(k);
  const int n = sig.n();
  std::vector<Expansion> out;
  std::vector<int> idx(pairs.size(), 0);
  while (true) {
    Expansion e;
    for (std::size_t s = 0; s < pairs.size(); ++s) {
      const PairInfo &pi = kPairs[pairs[s]];
      if (pi.eta)
        e.sign *= sig.eta(idx[s]);
      for (Obj o : {pi.a, pi.b})
        (is_mult(o) ? e.mults : e.ders).push_back({o, idx[s]});
    }
    out.push_back(std::move(e));
    std::size_t s = 0;
    while (s < idx.size() && ++idx[s] == n)
      idx[s++] = 0;
    if (s == idx.size())
      break;
  }
  return out;
}

// Expansions are pure functions of (signature, op); shared across builds.
const std::vector<Expansion> &cached_expansion(const CorrectionOp &op, Signature sig) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, CorrectionOp>, std::vector<Expansion>> cache;
  std::lock_guard lock(mu);
  auto key = std::tuple{sig.p, sig.q, op};
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, expand(op, sig)).first;
  return it->second;
}

Terms<Scalar> apply_expansions(const std::vector<Expansion> &ex, const Terms<Scalar> &t) {
  Terms<Scalar> out;
  for (const auto &[m0, c0] : t)
    for (const auto &e : ex) {
      Mono m = m0;
      long f = e.sign;
      bool alive = true;
      for (auto it = e.ders.rbegin(); alive && it != e.ders.rend(); ++it)
        alive = apply_atom(*it, m, f);
      for (auto it = e.mults.rbegin(); alive && it != e.mults.rend(); ++it)
        alive = apply_atom(*it, m, f);
      if (alive)
        out.add(m, f == 1 ? c0 : c0 * Scalar(Rational(f)));
    }
  return out;
}

// Monomials with x-degree <= dx, p-degree k, xi-degree kappa.
Terms<Scalar> unit(const Mono &m) {
  Terms<Scalar> t;
  t.add(m, Scalar(1));
  return t;
}

RatFunc affine_ratfunc(const Scalar &c0, const Scalar &c1) {
  return RatFunc(UPoly(std::vector<Scalar>{c0, c1}));
}

} // namespace

std::vector<Mono> graded_monomials(Signature sig, int dx, int k, int kappa) {
  const int n = sig.n();
  std::vector<std::array<std::uint8_t, kMaxDim>> xs, ps;
  std::function<void(std::array<std::uint8_t, kMaxDim> &, int, int, bool, std::vector<std::array<std::uint8_t, kMaxDim>> &)>
      rec = [&](std::array<std::uint8_t, kMaxDim> &cur, int pos, int left, bool exact, auto &dst) {
        if (pos == n) {
          if (!exact || left == 0)
            dst.push_back(cur);
          return;
        }
        for (int e = 0; e <= left; ++e) {
          cur[pos] = static_cast<std::uint8_t>(e);
          rec(cur, pos + 1, left - e, exact, dst);
        }
        cur[pos] = 0;
      };
  std::array<std::uint8_t, kMaxDim> cur{};
  rec(cur, 0, dx, false, xs);
  rec(cur, 0, k, true, ps);
  std::vector<Mono> out;
  for (unsigned I = 0; I < (1u << n); ++I) {
    if (std::popcount(I) != kappa)
      continue;
    for (const auto &a : xs)
      for (const auto &b : ps) {
        Mono m;
        m.x = a;
        m.p = b;
        m.xi = static_cast<std::uint16_t>(I);
        out.push_back(m);
      }
  }
  return out;
}

const char *to_string(Pair p) { return kPairs[static_cast<int>(p)].name; }

const char *to_string(MapKind k) { return k == MapKind::Superization ? "superization" : "quantization"; }

int CorrectionOp::mult_p() const {
  return 2 * count[int(Pair::PP)] + count[int(Pair::PXi)] + count[int(Pair::PDx)] + count[int(Pair::PDxi)];
}
int CorrectionOp::mult_xi() const {
  return count[int(Pair::PXi)] + count[int(Pair::XiDx)] + count[int(Pair::XiDp)];
}
int CorrectionOp::der_x() const {
  return count[int(Pair::PDx)] + count[int(Pair::XiDx)] + 2 * count[int(Pair::DxDx)] + count[int(Pair::DxDp)] +
         count[int(Pair::DxDxi)];
}
int CorrectionOp::der_p() const {
  return count[int(Pair::XiDp)] + count[int(Pair::DxDp)] + 2 * count[int(Pair::DpDp)] + count[int(Pair::DpDxi)];
}
int CorrectionOp::der_xi() const {
  return count[int(Pair::PDxi)] + count[int(Pair::DxDxi)] + count[int(Pair::DpDxi)];
}
bool CorrectionOp::is_identity() const {
  for (auto c : count)
    if (c)
      return false;
  return true;
}

Terms<Scalar> CorrectionOp::apply(Signature sig, const Terms<Scalar> &t) const {
  if (is_identity())
    return t;
  return apply_expansions(cached_expansion(*this, sig), t);
}

std::string CorrectionOp::str() const {
  std::string out;
  for (int k = 0; k < kPairKinds; ++k) {
    if (!count[k])
      continue;
    if (!out.empty())
      out += "*";
    out += "(" + std::string(kPairs[k].name) + ")";
    if (count[k] > 1)
      out += "^" + std::to_string(count[k]);
  }
  return out.empty() ? "id" : out;
}

int MapSpec::xi_cap() const { return max_xi < 0 ? std::min(signature.n(), 3) : std::min(max_xi, signature.n()); }

bool EquivariantMap::valid() const {
  for (const auto &b : blocks)
    if (b.status != SolveStatus::Unique)
      return false;
  return true;
}

std::vector<SingularPoint> EquivariantMap::singular() const {
  std::map<Rational, Failure> acc;
  for (const auto &b : blocks)
    for (const auto &s : b.singular) {
      auto [it, ins] = acc.try_emplace(s.value, s.failure);
      if (!ins && s.failure == Failure::Existence)
        it->second = Failure::Existence;
    }
  std::vector<SingularPoint> out;
  for (const auto &[v, f] : acc)
    out.push_back({v, f});
  return out;
}

const BlockSolution *EquivariantMap::block(int k, int kappa) const {
  for (const auto &b : blocks)
    if (b.k == k && b.kappa == kappa)
      return &b;
  return nullptr;
}

namespace {

std::vector<CorrectionOp> compute_basis(Signature sig, int k, int kappa) {
  const int n = sig.n();
  std::vector<CorrectionOp> cands;
  CorrectionOp cur;
  std::function<void(int)> rec = [&](int pos) {
    if (cur.der_p() > k || cur.der_xi() > kappa || cur.der_x() > k || cur.mult_p() > k ||
        kappa + cur.mult_xi() - cur.der_xi() > n + kappa)
      return;
    if (pos == kPairKinds) {
      if (cur.is_identity() || cur.mult_p() + cur.der_x() != cur.der_p())
        return;
      int out_xi = kappa + cur.xi_shift();
      if (out_xi < 0 || out_xi > n || (cur.xi_shift() & 1))
        return;
      // strictly lower p-degree only: p-preserving xi-lowering terms would change the principal
      // symbol and, for n = 3, produce genuine kernels (p x Lambda^2 contains a vector piece)
      if (cur.der_x() >= 1)
        cands.push_back(cur);
      return;
    }
    for (int c = 0; c <= std::max(k, kappa) + 1; ++c) {
      cur.count[pos] = static_cast<std::uint8_t>(c);
      rec(pos + 1);
    }
    cur.count[pos] = 0;
  };
  rec(0);
  if (cands.empty())
    return cands;

  // keep a linearly independent subset, judged on all inputs with x-degree <= k
  auto inputs = graded_monomials(sig, k, k, kappa);
  std::vector<Terms<Scalar>> images;
  std::map<std::pair<std::size_t, Mono>, std::vector<Scalar>> rows;
  for (std::size_t c = 0; c < cands.size(); ++c) {
    const auto &ex = cached_expansion(cands[c], sig);
    for (std::size_t in = 0; in < inputs.size(); ++in)
      for (const auto &[m, v] : apply_expansions(ex, unit(inputs[in]))) {
        auto &row = rows[{in, m}];
        if (row.empty())
          row.assign(cands.size(), Scalar(0));
        row[c] = v;
      }
  }
  Echelon<Scalar> ech(cands.size());
  for (auto &[key, row] : rows) {
    ech.insert(row);
    if (ech.rank() == cands.size())
      break;
  }
  std::vector<std::size_t> piv = ech.pivots();
  std::sort(piv.begin(), piv.end());
  std::vector<CorrectionOp> out;
  for (auto c : piv)
    out.push_back(cands[c]);
  return out;
}

} // namespace

std::vector<CorrectionOp> correction_basis(Signature sig, MapKind, int k, int kappa) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, int>, std::vector<CorrectionOp>> cache;
  auto key = std::tuple{sig.p, sig.q, k, kappa};
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end())
      return it->second;
  }
  auto ops = compute_basis(sig, k, kappa);
  std::lock_guard lock(mu);
  return cache.emplace(key, std::move(ops)).first->second;
}

namespace {

// Affine action pieces on target or source: v -> A0(v) + t A1(v).
struct AffineAction {
  std::function<Terms<Scalar>(const Terms<Scalar> &)> a0, a1;
};

class Builder {
public:
  explicit Builder(const MapSpec &spec) : spec_(spec), sig_(spec.signature) {
    // K_1 alone suffices (see notes in solve_block); the cross-check mode uses every generator
    std::vector<ConfGenerator> gens;
    if (spec.all_generators)
      gens = generators(sig_);
    else
      gens.push_back(special(sig_, 0));
    for (const auto &g : gens)
      acts_.push_back(actions(g));
  }

  EquivariantMap run() {
    EquivariantMap map;
    map.spec = spec_;
    // blocks: requested ones plus, for quantization, the lower blocks they feed into
    std::set<std::pair<int, int>> todo;
    for (int k = 0; k <= spec_.max_p; ++k)
      for (int kappa = 0; kappa <= spec_.xi_cap(); ++kappa)
        todo.insert({k, kappa});
    if (spec_.kind == MapKind::Quantization) {
      std::vector<std::pair<int, int>> stack(todo.begin(), todo.end());
      while (!stack.empty()) {
        auto [k, kappa] = stack.back();
        stack.pop_back();
        if (k >= 1 && kappa + 2 <= sig_.n() && todo.insert({k - 1, kappa + 2}).second)
          stack.push_back({k - 1, kappa + 2});
      }
    }
    for (auto [k, kappa] : todo) // ascending p-degree
      map.blocks.push_back(solve_block(map, k, kappa));
    return map;
  }

private:
  static AffineAction affine(std::shared_ptr<ModuleAction> mod, const ConfGenerator &gen, Scalar d0, Scalar d1) {
    AffineAction a;
    auto K = std::make_shared<ConfGenerator>(gen);
    a.a0 = [=](const Terms<Scalar> &v) {
      Terms<Scalar> out = mod->base(*K, v);
      if (!d0.is_zero())
        out.add(mod->weight_part(*K, v), d0);
      return out;
    };
    a.a1 = [=](const Terms<Scalar> &v) {
      Terms<Scalar> out;
      if (!d1.is_zero())
        out.add(mod->weight_part(*K, v), d1);
      return out;
    };
    return a;
  }

  // source and target actions of one generator
  std::pair<AffineAction, AffineAction> actions(const ConfGenerator &K) const {
    const Scalar d0(spec_.delta.c0), d1(spec_.delta.c1);
    AffineAction src, tgt;
    if (spec_.kind == MapKind::Superization) {
      src = affine(std::make_shared<TensorModule>(sig_), K, d0, d1);
      tgt = affine(std::make_shared<HamiltonianModule>(sig_, spec_.conv), K, d0, d1);
      return {src, tgt};
    }
    src = affine(std::make_shared<HamiltonianModule>(sig_, spec_.conv), K, d0, d1);
    const Scalar l0(spec_.lambda.c0), l1(spec_.lambda.c1);
    auto L0 = std::make_shared<Terms<Scalar>>(kosmann(K, sig_, 0).terms());
    auto Dv = std::make_shared<Terms<Scalar>>(div(K.field).terms());
    Signature sig = sig_;
    auto comm = [sig](const Terms<Scalar> &a, const Terms<Scalar> &v) {
      Terms<Scalar> out = compose_terms(sig, a, v);
      out -= compose_terms(sig, v, a);
      return out;
    };
    tgt.a0 = [=](const Terms<Scalar> &v) {
      Terms<Scalar> out = comm(*L0, v);
      if (!l0.is_zero())
        out.add(comm(*Dv, v), l0);
      if (!d0.is_zero())
        out.add(compose_terms(sig, *Dv, v), d0);
      return out;
    };
    tgt.a1 = [=](const Terms<Scalar> &v) {
      Terms<Scalar> out;
      if (!l1.is_zero())
        out.add(comm(*Dv, v), l1);
      if (!d1.is_zero())
        out.add(compose_terms(sig, *Dv, v), d1);
      return out;
    };
    return {src, tgt};
  }

  const std::vector<Expansion> &expansions(const CorrectionOp &op) {
    return cached_expansion(op, sig_);
  }

  Terms<Scalar> phi(const Terms<Scalar> &s) const {
    if (spec_.kind == MapKind::Superization)
      return s;
    return normal_order(SuperSymbol(sig_, s), spec_.conv).terms();
  }

  static std::pair<int, int> block_of(const Mono &m) { return {m.pdeg(), m.xideg()}; }

  BlockSolution solve_block(const EquivariantMap &map, int k, int kappa) {
    BlockSolution blk;
    blk.k = k;
    blk.kappa = kappa;
    blk.ops = correction_basis(sig_, spec_.kind, k, kappa);
    const std::size_t U = blk.ops.size();
    std::vector<std::vector<Expansion>> ex;
    for (const auto &op : blk.ops)
      ex.push_back(expansions(op));

    struct Row {
      std::vector<RatFunc> a;
      RatFunc b;
    };
    std::map<std::pair<std::size_t, Mono>, Row> rows;
    auto row = [&](std::size_t in, const Mono &m) -> Row & {
      auto [it, ins] = rows.try_emplace({in, m});
      if (ins)
        it->second.a.assign(U, RatFunc());
      return it->second;
    };
    auto add_affine = [](RatFunc &dst, const Scalar &c0, const Scalar &c1) {
      dst = dst + affine_ratfunc(c0, c1);
    };

    // Corrections commute with translations and rotations and preserve the dilation weight, so
    // the error E_K = L o Q - Q o L of K_1 commutes with translations. On inputs of x-degree
    // >= k its image would have negative p-degree, so inputs of x-degree < k decide everything;
    // rotations carry K_1 to the other K_i.
    const int xmax = spec_.all_generators ? k + 1 : std::max(k - 1, 0);
    auto inputs = graded_monomials(sig_, xmax, k, kappa);
    const std::size_t N = inputs.size();
    for (std::size_t in = 0; in < N * acts_.size(); ++in) {
      const auto &[src, tgt] = acts_[in / N];
      Terms<Scalar> t = unit(inputs[in % N]);
      Terms<Scalar> u0 = src.a0(t), u1 = src.a1(t);
      // split the source image into this block and other blocks
      Terms<Scalar> u0_same, u1_same;
      std::map<std::pair<int, int>, std::array<Terms<Scalar>, 2>> u_other;
      for (const auto &[m, c] : u0) {
        if (block_of(m) == std::pair{k, kappa})
          u0_same.add(m, c);
        else
          u_other[block_of(m)][0].add(m, c);
      }
      for (const auto &[m, c] : u1) {
        if (block_of(m) == std::pair{k, kappa})
          u1_same.add(m, c);
        else
          u_other[block_of(m)][1].add(m, c);
      }
      // unknown columns: Phi(C u) - L_tgt Phi(C t)
      for (std::size_t c = 0; c < U; ++c) {
        Terms<Scalar> Ct = phi(apply_expansions(ex[c], t));
        Terms<Scalar> e0 = phi(apply_expansions(ex[c], u0_same));
        e0 -= tgt.a0(Ct);
        Terms<Scalar> e1 = phi(apply_expansions(ex[c], u1_same));
        e1 -= tgt.a1(Ct);
        std::map<Mono, std::pair<Scalar, Scalar>> merged;
        for (const auto &[m, v] : e0)
          merged[m].first = v;
        for (const auto &[m, v] : e1)
          merged[m].second = v;
        for (const auto &[m, v] : merged)
          add_affine(row(in, m).a[c], v.first, v.second);
      }
      // right-hand side: L_tgt Phi(t) - Phi(u) - known corrections of other blocks
      Terms<Scalar> pt = phi(t);
      Terms<Scalar> r0 = tgt.a0(pt), r1 = tgt.a1(pt);
      r0 -= phi(u0);
      r1 -= phi(u1);
      {
        std::map<Mono, std::pair<Scalar, Scalar>> merged;
        for (const auto &[m, v] : r0)
          merged[m].first = v;
        for (const auto &[m, v] : r1)
          merged[m].second = v;
        for (const auto &[m, v] : merged)
          add_affine(row(in, m).b, v.first, v.second);
      }
      for (const auto &[bk, parts] : u_other) {
        const BlockSolution *other = map.block(bk.first, bk.second);
        if (!other) {
          if (spec_.kind == MapKind::Superization)
            throw std::logic_error("tensor action left its block");
          continue; // outside every block: no correction terms exist there
        }
        if (other->status != SolveStatus::Unique) {
          blk.status = other->status;
          blk.singular = other->singular;
          return blk;
        }
        for (std::size_t c = 0; c < other->ops.size(); ++c) {
          const auto &oex = expansions(other->ops[c]);
          Terms<Scalar> v0 = phi(apply_expansions(oex, parts[0])), v1 = phi(apply_expansions(oex, parts[1]));
          std::map<Mono, std::pair<Scalar, Scalar>> merged;
          for (const auto &[m, v] : v0)
            merged[m].first = v;
          for (const auto &[m, v] : v1)
            merged[m].second = v;
          for (const auto &[m, v] : merged) {
            Row &r = row(in, m);
            r.b = r.b - other->coeffs[c] * affine_ratfunc(v.first, v.second);
          }
        }
      }
    }

    ParamLinearSystem sys;
    sys.unknowns = U;
    for (auto &[key, r] : rows) {
      bool nonzero = !r.b.is_zero();
      for (const auto &e : r.a)
        nonzero = nonzero || !e.is_zero();
      if (nonzero)
        sys.add_row(std::move(r.a), std::move(r.b));
    }
    blk.equations = sys.matrix.size();
    sys = compress_rows(sys);

    if (spec_.formal()) {
      ParamSolution sol = solve_param(sys);
      blk.status = sol.status;
      blk.coeffs = std::move(sol.solution);
      blk.singular = std::move(sol.singular);
      blk.solvable_at = std::move(sol.solvable_at);
      blk.nullspace = std::move(sol.nullspace);
    } else {
      std::vector<std::vector<Scalar>> A;
      std::vector<Scalar> b;
      for (std::size_t r = 0; r < sys.matrix.size(); ++r) {
        std::vector<Scalar> row_s;
        for (const auto &e : sys.matrix[r])
          row_s.push_back(e.constant());
        A.push_back(std::move(row_s));
        b.push_back(sys.rhs[r].constant());
      }
      SpecializedSolution sol = solve_exact(A, b, U);
      blk.status = sol.status;
      for (const auto &v : sol.solution)
        blk.coeffs.push_back(RatFunc(v));
      for (const auto &z : sol.nullspace)
        blk.nullspace.emplace_back(z.begin(), z.end());
    }
    if (blk.status != SolveStatus::Unique)
      blk.coeffs.clear();
    return blk;
  }

  MapSpec spec_;
  Signature sig_;
  std::vector<std::pair<AffineAction, AffineAction>> acts_;
};

// With formal hbar a correction lowering p-degree by j carries hbar^j.
Terms<Scalar> apply_op(const EquivariantMap &map, const CorrectionOp &op, const Terms<Scalar> &part) {
  Terms<Scalar> img = op.apply(map.spec.signature, part);
  if (map.spec.conv.hbar || op.p_shift() == 0)
    return img;
  Terms<Scalar> out;
  for (const auto &[m, c] : img) {
    Mono h = m;
    h.hbar = static_cast<std::int8_t>(h.hbar - op.p_shift());
    out.add(h, c);
  }
  return out;
}

Terms<Scalar> corrected(const EquivariantMap &map, const SuperSymbol &s, const Scalar &t) {
  std::map<std::pair<int, int>, Terms<Scalar>> parts;
  for (const auto &[m, c] : s.terms())
    parts[{m.pdeg(), m.xideg()}].add(m, c);
  Terms<Scalar> out = s.terms();
  for (const auto &[bk, part] : parts) {
    const BlockSolution *b = map.block(bk.first, bk.second);
    if (!b)
      throw unavailable_error("no map constructed for p-degree " + std::to_string(bk.first) + ", xi-degree " +
                              std::to_string(bk.second));
    if (b->status != SolveStatus::Unique)
      throw unavailable_error("map not available at p-degree " + std::to_string(bk.first) + ", xi-degree " +
                              std::to_string(bk.second) + " (" + to_string(b->status) + ")");
    for (std::size_t c = 0; c < b->ops.size(); ++c) {
      Terms<Scalar> img = apply_op(map, b->ops[c], part);
      if (img.is_zero())
        continue; // a pole of an unused coefficient does not matter
      auto v = b->coeffs[c].eval(t);
      if (!v)
        throw unavailable_error("resonant parameter value for p-degree " + std::to_string(bk.first) +
                                ", xi-degree " + std::to_string(bk.second));
      out.add(img, *v);
    }
  }
  return out;
}

} // namespace

EquivariantMap build_map(const MapSpec &spec) {
  if (spec.conv.hbar)
    return Builder(spec).run();
  // Brackets lower the weight (p, hbar: 1; x, xi: 0) by one and the actions preserve it, so the
  // formal map is the hbar = 1 map with hbar^j on corrections lowering p-degree by j (apply_op).
  MapSpec unit = spec;
  unit.conv.hbar = Rational(1);
  EquivariantMap map = Builder(unit).run();
  map.spec.conv = spec.conv;
  return map;
}

EquivariantMap build_superization(Signature sig, Affine delta, int max_p, int max_xi, const BracketConvention &conv) {
  MapSpec spec;
  spec.kind = MapKind::Superization;
  spec.signature = sig;
  spec.delta = delta;
  spec.max_p = max_p;
  spec.max_xi = max_xi;
  spec.conv = conv;
  return build_map(spec);
}

EquivariantMap build_quantization(Signature sig, Affine lambda, Affine delta, int max_p, int max_xi,
                                  const BracketConvention &conv) {
  MapSpec spec;
  spec.kind = MapKind::Quantization;
  spec.signature = sig;
  spec.delta = delta;
  spec.lambda = lambda;
  spec.max_p = max_p;
  spec.max_xi = max_xi;
  spec.conv = conv;
  return build_map(spec);
}

SuperSymbol apply_superization(const EquivariantMap &map, const SuperSymbol &s, const Scalar &t) {
  if (map.spec.kind != MapKind::Superization)
    throw std::invalid_argument("apply_superization: map is a quantization");
  return SuperSymbol(s.signature(), corrected(map, s, t), s.weight());
}

SpinorOperator apply_quantization(const EquivariantMap &map, const SuperSymbol &s, const Scalar &t) {
  if (map.spec.kind != MapKind::Quantization)
    throw std::invalid_argument("apply_quantization: map is a superization");
  SpinorOperator out = normal_order(SuperSymbol(s.signature(), corrected(map, s, t)), map.spec.conv);
  Scalar lam = map.spec.lambda.at(t), del = map.spec.delta.at(t);
  return out.with_weights(lam.to_rational(), (lam + del).to_rational());
}

EquivarianceReport verify_equivariance(const EquivariantMap &map, const Rational &t, int extra_x) {
  const MapSpec &spec = map.spec;
  const Signature sig = spec.signature;
  const Scalar ts(t), delta = spec.delta.at(ts);
  EquivarianceReport rep;
  rep.points.push_back(t);
  std::unique_ptr<ModuleAction> src, tgt;
  if (spec.kind == MapKind::Superization) {
    src = std::make_unique<TensorModule>(sig);
    tgt = std::make_unique<HamiltonianModule>(sig, spec.conv);
  } else {
    src = std::make_unique<HamiltonianModule>(sig, spec.conv);
    tgt = std::make_unique<OperatorModule>(sig, spec.lambda.at(ts).to_rational());
  }
  auto M = [&](const Terms<Scalar> &v) -> Terms<Scalar> {
    if (v.is_zero())
      return v;
    if (spec.kind == MapKind::Superization)
      return apply_superization(map, SuperSymbol(sig, v), ts).terms();
    return apply_quantization(map, SuperSymbol(sig, v), ts).terms();
  };
  const auto gens = generators(sig);
  for (const auto &b : map.blocks) {
    if (b.k > spec.max_p || b.kappa > spec.xi_cap())
      continue;
    for (const Mono &m : graded_monomials(sig, b.k + extra_x, b.k, b.kappa)) {
      Terms<Scalar> v = unit(m), Mv;
      try {
        Mv = M(v);
      } catch (const unavailable_error &e) {
        rep.ok = false;
        rep.failure = std::string("at t = ") + to_string(t) + ": " + e.what();
        return rep;
      }
      for (const auto &X : gens) {
        ++rep.checks;
        try {
          Terms<Scalar> lhs = tgt->apply(X, delta, Mv);
          Terms<Scalar> rhs = M(src->apply(X, delta, v));
          if (lhs == rhs)
            continue;
          lhs -= rhs;
          rep.failure = std::string(to_string(spec.kind)) + " at t = " + to_string(t) + ": generator " + X.name() +
                        " on " + render_mono(m) + " leaves " + render_terms(lhs);
        } catch (const unavailable_error &e) {
          rep.failure = std::string("at t = ") + to_string(t) + ": " + e.what();
        }
        rep.ok = false;
        return rep;
      }
    }
  }
  return rep;
}

namespace {

const RatFunc kOne(1);

// sum_j c_j(t) f_j(t) T_j with c_j a map coefficient and f_j one of 1, delta(t), lambda(t);
// grouped by (c_j, f_j) so almost all arithmetic stays in Q(i, sqrt2)
struct FormalSum {
  enum Factor { One, Delta, Lambda };
  std::map<std::pair<const RatFunc *, int>, Terms<Scalar>> groups;

  void add(const Terms<Scalar> &t, const RatFunc *c, Factor f, bool negate = false) {
    if (t.is_zero())
      return;
    auto &acc = groups[{c, f}];
    if (negate)
      acc -= t;
    else
      acc += t;
  }

  // first monomial with a nonzero total coefficient
  std::optional<std::pair<Mono, RatFunc>> first_nonzero(const RatFunc &delta, const RatFunc &lambda) const {
    std::vector<std::pair<RatFunc, const Terms<Scalar> *>> coef;
    std::set<Mono> monos;
    for (const auto &[key, acc] : groups) {
      const RatFunc &f = key.second == Delta ? delta : key.second == Lambda ? lambda : kOne;
      coef.push_back({*key.first * f, &acc});
      for (const auto &[m, v] : acc)
        monos.insert(m);
    }
    for (const Mono &m : monos) {
      RatFunc total;
      for (const auto &[k, acc] : coef)
        if (auto v = acc->coeff(m); !v.is_zero())
          total += k * RatFunc(v);
      if (!total.is_zero())
        return std::pair{m, total};
    }
    return std::nullopt;
  }
};

// The map applied with its coefficients kept symbolic: pairs (coefficient, symbol before Phi).
std::vector<std::pair<const RatFunc *, Terms<Scalar>>> formal_image(const EquivariantMap &map,
                                                                      const Terms<Scalar> &s) {
  std::map<std::pair<int, int>, Terms<Scalar>> parts;
  for (const auto &[m, c] : s)
    parts[{m.pdeg(), m.xideg()}].add(m, c);
  std::vector<std::pair<const RatFunc *, Terms<Scalar>>> out{{&kOne, s}};
  for (const auto &[bk, part] : parts) {
    const BlockSolution *b = map.block(bk.first, bk.second);
    if (!b || b->status != SolveStatus::Unique)
      throw unavailable_error("no generic solution for p-degree " + std::to_string(bk.first) + ", xi-degree " +
                              std::to_string(bk.second));
    for (std::size_t c = 0; c < b->ops.size(); ++c)
      if (!b->coeffs[c].is_zero())
        out.push_back({&b->coeffs[c], apply_op(map, b->ops[c], part)});
  }
  return out;
}

} // namespace

EquivarianceReport verify_equivariance_formal(const EquivariantMap &map, int extra_x) {
  // One pass over Q(i, sqrt2)(t): actions are affine in t, so
  //   L(t) = B0 + lambda(t) B_lambda + delta(t) B_w   on the target,
  //   L(t) = S0 + delta(t) S_w                        on the source.
  const MapSpec &spec = map.spec;
  const Signature sig = spec.signature;
  const RatFunc tvar = RatFunc::variable();
  const RatFunc delta = RatFunc(Scalar(spec.delta.c0)) + RatFunc(Scalar(spec.delta.c1)) * tvar;
  const RatFunc lambda = RatFunc(Scalar(spec.lambda.c0)) + RatFunc(Scalar(spec.lambda.c1)) * tvar;
  const bool quant = spec.kind == MapKind::Quantization;
  std::unique_ptr<ModuleAction> src, tgt;
  if (quant) {
    src = std::make_unique<HamiltonianModule>(sig, spec.conv);
    tgt = std::make_unique<OperatorModule>(sig, 0);
  } else {
    src = std::make_unique<TensorModule>(sig);
    tgt = std::make_unique<HamiltonianModule>(sig, spec.conv);
  }
  auto phi = [&](const Terms<Scalar> &w) {
    return quant ? normal_order(SuperSymbol(sig, w), spec.conv).terms() : w;
  };
  EquivarianceReport rep;
  const auto gens = generators(sig);
  for (const auto &b : map.blocks) {
    if (b.k > spec.max_p || b.kappa > spec.xi_cap())
      continue;
    for (const Mono &m : graded_monomials(sig, b.k + extra_x, b.k, b.kappa)) {
      Terms<Scalar> v = unit(m);
      std::vector<std::pair<const RatFunc *, Terms<Scalar>>> image;
      try {
        for (auto &[c, w] : formal_image(map, v))
          image.push_back({c, phi(w)});
      } catch (const unavailable_error &e) {
        rep.ok = false;
        rep.failure = e.what();
        return rep;
      }
      for (const auto &X : gens) {
        ++rep.checks;
        try {
          FormalSum diff;
          const Terms<Scalar> dv = div(X.field).terms();
          for (const auto &[c, pw] : image) {
            diff.add(tgt->base(X, pw), c, FormalSum::One);
            diff.add(tgt->weight_part(X, pw), c, FormalSum::Delta);
            if (quant) {
              Terms<Scalar> comm = compose_terms(sig, dv, pw);
              comm -= compose_terms(sig, pw, dv);
              diff.add(comm, c, FormalSum::Lambda);
            }
          }
          const Terms<Scalar> u0 = src->base(X, v), u1 = src->weight_part(X, v);
          for (const auto &[c, w] : formal_image(map, u0))
            diff.add(phi(w), c, FormalSum::One, true);
          for (const auto &[c, w] : formal_image(map, u1))
            diff.add(phi(w), c, FormalSum::Delta, true);
          auto bad = diff.first_nonzero(delta, lambda);
          if (!bad)
            continue;
          rep.failure = std::string(to_string(spec.kind)) + ": generator " + X.name() + " on " + render_mono(m) +
                        " leaves " + render_mono(bad->first) + " with coefficient " + bad->second.str("t");
        } catch (const unavailable_error &e) {
          rep.failure = e.what();
        }
        rep.ok = false;
        return rep;
      }
    }
  }
  return rep;
}

std::vector<Resonance> resonances(Signature sig, MapKind kind, int max_p, int max_xi, Affine lambda) {
  MapSpec spec;
  spec.kind = kind;
  spec.signature = sig;
  spec.delta = Affine::formal();
  spec.lambda = lambda;
  spec.max_p = max_p;
  spec.max_xi = max_xi;
  return resonances(build_map(spec));
}

std::vector<Resonance> resonances(const EquivariantMap &map) {
  std::map<Rational, Resonance> acc;
  for (const auto &b : map.blocks)
    for (const auto &s : b.singular) {
      auto it = acc.find(s.value);
      if (it == acc.end())
        acc.emplace(s.value, Resonance{s.value, s.failure, b.k, b.kappa});
      else if (s.failure == Failure::Existence && it->second.failure != Failure::Existence)
        it->second = Resonance{s.value, s.failure, b.k, b.kappa};
    }
  std::vector<Resonance> out;
  for (auto &[v, r] : acc)
    out.push_back(r);
  return out;
}

} // namespace spinq
