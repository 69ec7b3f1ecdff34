#include "spinquant/linsolve.hpp"

#include <algorithm>
#include <set>

namespace spinq {

const char *to_string(SolveStatus s) {
  switch (s) {
  case SolveStatus::Unique:
    return "unique";
  case SolveStatus::Underdetermined:
    return "underdetermined";
  case SolveStatus::Inconsistent:
    return "inconsistent";
  }
  return "?";
}

const char *to_string(Failure f) { return f == Failure::Existence ? "existence" : "uniqueness"; }

namespace {

template <class F>
void extract(const Echelon<F> &ech, std::size_t unknowns, SolveStatus &status, std::vector<F> &solution,
             std::vector<std::vector<F>> &nullspace) {
  solution.assign(unknowns, F(0));
  nullspace.clear();
  for (std::size_t r = 0; r < ech.rank(); ++r) {
    std::size_t pc = ech.pivots()[r];
    if (pc == unknowns) {
      status = SolveStatus::Inconsistent;
      return;
    }
    solution[pc] = ech.rows()[r][unknowns];
  }
  nullspace = ech.nullspace(unknowns);
  status = nullspace.empty() ? SolveStatus::Unique : SolveStatus::Underdetermined;
}

void add_roots(const UPoly &p, std::set<Rational> &out) {
  if (p.is_constant())
    return;
  for (auto &r : p.rational_roots())
    out.insert(r);
}

void add_roots(const RatFunc &f, std::set<Rational> &out) {
  add_roots(f.num(), out);
  add_roots(f.den(), out);
}

bool same_solution(const std::vector<Scalar> &a, const std::vector<RatFunc> &generic, const Scalar &t0) {
  for (std::size_t k = 0; k < a.size(); ++k) {
    auto v = generic[k].eval(t0);
    if (!v || !(*v == a[k]))
      return false;
  }
  return true;
}

RatFunc dot(const std::vector<RatFunc> &row, const std::vector<RatFunc> &x) {
  RatFunc acc;
  for (std::size_t k = 0; k < row.size(); ++k)
    if (!row[k].is_zero() && !x[k].is_zero())
      acc += row[k] * x[k];
  return acc;
}

} // namespace

SpecializedSolution solve_exact(const std::vector<std::vector<Scalar>> &matrix, const std::vector<Scalar> &rhs,
                                std::size_t unknowns) {
  Echelon<Scalar> ech(unknowns + 1);
  for (std::size_t r = 0; r < matrix.size(); ++r) {
    auto row = matrix[r];
    row.push_back(rhs[r]);
    ech.insert(std::move(row));
  }
  SpecializedSolution out;
  extract(ech, unknowns, out.status, out.solution, out.nullspace);
  return out;
}

SpecializedSolution solve_specialized(const ParamLinearSystem &sys, const Scalar &t0) {
  Echelon<Scalar> ech(sys.unknowns + 1);
  SpecializedSolution out;
  for (std::size_t r = 0; r < sys.matrix.size(); ++r) {
    std::vector<Scalar> row;
    row.reserve(sys.unknowns + 1);
    bool defined = true;
    for (std::size_t c = 0; c <= sys.unknowns && defined; ++c) {
      const RatFunc &e = c < sys.unknowns ? sys.matrix[r][c] : sys.rhs[r];
      auto v = e.eval(t0);
      if (!v)
        defined = false;
      else
        row.push_back(*v);
    }
    if (!defined) {
      out.status = SolveStatus::Inconsistent;
      return out;
    }
    ech.insert(std::move(row));
  }
  extract(ech, sys.unknowns, out.status, out.solution, out.nullspace);
  return out;
}

ParamSolution solve_param(const ParamLinearSystem &sys) {
  const std::size_t u = sys.unknowns;
  const std::size_t m = sys.matrix.size();
  ParamSolution out;

  // Rows with poles anywhere contribute their pole locations to the candidate set.
  std::set<Rational> candidates;
  for (std::size_t r = 0; r < m; ++r) {
    for (const auto &e : sys.matrix[r])
      add_roots(e.den(), candidates);
    add_roots(sys.rhs[r].den(), candidates);
  }

  // Select rows independent at a fixed generic point; dependence there implies generic
  // dependence unless the point is unlucky, which the residual check below catches.
  Scalar probe(Rational(7919, 104729));
  while (candidates.count(probe.to_rational()))
    probe += Scalar(Rational(1, 3));
  std::vector<bool> selected(m, false);
  {
    Echelon<Scalar> ech(u + 1);
    for (std::size_t r = 0; r < m; ++r) {
      std::vector<Scalar> row;
      row.reserve(u + 1);
      for (std::size_t c = 0; c < u; ++c)
        row.push_back(*sys.matrix[r][c].eval(probe));
      row.push_back(*sys.rhs[r].eval(probe));
      if (ech.insert(std::move(row)))
        selected[r] = true;
      if (ech.rank() == u + 1)
        break;
    }
  }

  auto augmented = [&](std::size_t r) {
    auto row = sys.matrix[r];
    row.push_back(sys.rhs[r]);
    return row;
  };

  Echelon<RatFunc> ech(u + 1);
  for (std::size_t r = 0; r < m; ++r)
    if (selected[r])
      ech.insert(augmented(r));

  for (;;) {
    extract(ech, u, out.status, out.solution, out.nullspace);
    if (out.status == SolveStatus::Inconsistent)
      break;
    bool clean = true;
    for (std::size_t r = 0; r < m && clean; ++r) {
      if (selected[r])
        continue;
      bool ok = (dot(sys.matrix[r], out.solution) - sys.rhs[r]).is_zero();
      for (const auto &v : out.nullspace)
        ok = ok && dot(sys.matrix[r], v).is_zero();
      if (!ok) {
        selected[r] = true;
        ech.insert(augmented(r));
        clean = false;
      }
    }
    if (clean)
      break;
  }

  for (const auto &p : ech.raw_pivots())
    add_roots(p, candidates);
  for (const auto &row : ech.rows())
    for (const auto &e : row)
      add_roots(e.den(), candidates);

  for (const auto &c : candidates) {
    Scalar t0(c);
    SpecializedSolution s = solve_specialized(sys, t0);
    if (out.status == SolveStatus::Inconsistent) {
      if (s.status != SolveStatus::Inconsistent)
        out.solvable_at.push_back(c);
      continue;
    }
    if (s.status == SolveStatus::Inconsistent) {
      out.singular.push_back({c, Failure::Existence});
    } else if (s.nullspace.size() > out.nullspace.size()) {
      out.singular.push_back({c, Failure::Uniqueness});
    } else if (out.status == SolveStatus::Unique && !same_solution(s.solution, out.solution, t0)) {
      // The specialized solution exists and is unique but the generic formula has a
      // removable singularity here; this is not a failure.
      continue;
    }
  }
  return out;
}

ParamLinearSystem compress_rows(const ParamLinearSystem &sys) {
  const std::size_t W = sys.unknowns + 1;
  std::vector<std::vector<UPoly>> polys;
  int D = 0;
  for (std::size_t r = 0; r < sys.matrix.size(); ++r) {
    UPoly L(Scalar(1));
    auto lcm_with = [&](const UPoly &d) {
      UPoly q, rem;
      UPoly::divmod(L * d, UPoly::gcd(L, d), q, rem);
      L = q;
    };
    for (const auto &e : sys.matrix[r])
      if (!e.den().is_constant())
        lcm_with(e.den());
    if (!sys.rhs[r].den().is_constant())
      lcm_with(sys.rhs[r].den());
    std::vector<UPoly> row;
    for (std::size_t c = 0; c < W; ++c) {
      const RatFunc &e = c < sys.unknowns ? sys.matrix[r][c] : sys.rhs[r];
      UPoly q, rem;
      UPoly::divmod(L, e.den(), q, rem);
      row.push_back(e.num() * q);
      D = std::max(D, row.back().degree());
    }
    polys.push_back(std::move(row));
  }
  ParamLinearSystem out;
  out.unknowns = sys.unknowns;
  Echelon<Scalar> ech(W * (D + 1));
  for (std::size_t r = 0; r < polys.size(); ++r) {
    std::vector<Scalar> flat(W * (D + 1), Scalar(0));
    for (std::size_t c = 0; c < W; ++c)
      for (int d = 0; d <= polys[r][c].degree(); ++d)
        flat[d * W + c] = polys[r][c].coeff(d);
    if (ech.insert(std::move(flat)))
      out.add_row(sys.matrix[r], sys.rhs[r]);
    if (ech.rank() == ech.width())
      break;
  }
  return out;
}

} // namespace spinq
