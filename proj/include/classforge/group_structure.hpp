#ifndef CLASSFORGE_GROUP_STRUCTURE_HPP
#define CLASSFORGE_GROUP_STRUCTURE_HPP

#include <map>
#include <stdexcept>
#include <vector>

#include "classforge/arith.hpp"
#include "classforge/errors.hpp"

namespace classforge::grp {

// Invariant factors of a finite abelian group given by its full element
// list, plus the bookkeeping needed to express any element in those
// coordinates.  Generators are attempted in the order of the supplied
// element list, so the decomposition is reproducible.
template <class Elem, class Less>
struct StructureResult {
  arith::AbelianStructure structure;
  std::vector<Elem> generators;  // aligned with structure.divisors

  // Internals of the chart: tried generators g_j, exponent table, and the
  // Smith column transform.  full_divisors keeps the trivial factors so it
  // stays aligned with chart coordinates.
  std::vector<Elem> tried;
  std::map<Elem, std::vector<long>, Less> table;
  arith::IntMat v;
  std::vector<mpz_class> full_divisors;
  arith::IntMat relations;

  std::vector<mpz_class> chart_coords(const Elem& e) const {
    auto it = table.find(e);
    if (it == table.end())
      throw invalid_input("unknown-element",
                          "chart_coords: element not in the group table");
    std::size_t k = tried.size();
    std::vector<mpz_class> out(k, 0);
    for (std::size_t i = 0; i < k; ++i) {
      mpz_class acc = 0;
      for (std::size_t j = 0; j < it->second.size(); ++j)
        acc += it->second[j] * v.at(j, i);
      if (full_divisors[i] != 0) {
        mpz_mod(acc.get_mpz_t(), acc.get_mpz_t(),
                full_divisors[i].get_mpz_t());
      }
      out[i] = acc;
    }
    return out;
  }

  mpz_class order_of(const Elem& e) const {
    if (tried.empty()) return 1;
    arith::AbelianStructure full;
    full.divisors = full_divisors;
    return arith::element_order_in(full, chart_coords(e));
  }
};

template <class Elem, class Compose, class Less>
Elem group_power(const Elem& g, mpz_class e, const Elem& identity,
                 Compose compose, const mpz_class& group_order, Less) {
  mpz_mod(e.get_mpz_t(), e.get_mpz_t(), group_order.get_mpz_t());
  Elem acc = identity, sq = g;
  while (e > 0) {
    if (mpz_odd_p(e.get_mpz_t())) acc = compose(acc, sq);
    sq = compose(sq, sq);
    e >>= 1;
  }
  return acc;
}

// Builds the invariant-factor decomposition by augmenting a coset table one
// generator at a time: the first element not yet expressible becomes g_k,
// its least power landing in the table gives the relation row
// t e_k - (previous exponents), and the table is extended by the t - 1 new
// cosets.  The relation matrix is lower triangular with determinant equal
// to the group order, so its rows span the full relation lattice and Smith
// reduction of it is the group structure.
template <class Elem, class Compose, class Less>
StructureResult<Elem, Less> abelian_structure(std::vector<Elem> elements,
                                              const Elem& identity,
                                              Compose compose, Less less,
                                              WorkMeter& meter) {
  std::sort(elements.begin(), elements.end(), less);
  elements.erase(std::unique(elements.begin(), elements.end()),
                 elements.end());
  const std::size_t h = elements.size();

  StructureResult<Elem, Less> res;
  res.table = std::map<Elem, std::vector<long>, Less>(less);
  res.table.emplace(identity, std::vector<long>{});

  std::vector<std::vector<mpz_class>> rows;
  for (const Elem& cand : elements) {
    if (res.table.size() == h) break;
    if (res.table.count(cand)) continue;

    const std::size_t k = res.tried.size();
    res.tried.push_back(cand);

    Elem pw = cand;
    long t = 1;
    while (!res.table.count(pw)) {
      pw = compose(pw, cand);
      ++t;
      meter.charge(1, "group-structure");
      if (static_cast<std::size_t>(t) > h)
        throw std::logic_error("abelian_structure: element list is not closed");
    }
    const std::vector<long> base = res.table.at(pw);

    std::vector<mpz_class> row(k + 1, 0);
    for (std::size_t j = 0; j < base.size(); ++j) row[j] = -base[j];
    row[k] = t;
    rows.push_back(std::move(row));

    std::vector<std::pair<Elem, std::vector<long>>> snapshot(
        res.table.begin(), res.table.end());
    Elem fj = identity;
    for (long j = 1; j < t; ++j) {
      fj = compose(fj, cand);
      for (const auto& [g, vec] : snapshot) {
        Elem ng = compose(g, fj);
        std::vector<long> nv = vec;
        nv.resize(k, 0);
        nv.push_back(j);
        auto [it, fresh] = res.table.emplace(std::move(ng), std::move(nv));
        if (!fresh)
          throw std::logic_error("abelian_structure: coset collision");
        meter.charge(1, "group-structure");
      }
    }
  }
  if (res.table.size() != h)
    throw std::logic_error("abelian_structure: table never filled");

  const std::size_t k = res.tried.size();
  if (k == 0) {
    res.v = arith::IntMat::identity(0);
    return res;
  }

  res.relations = arith::IntMat(k, k);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      res.relations.at(i, j) = rows[i][j];

  arith::SmithResult s = arith::smith_decompose(res.relations, &meter);
  res.v = s.v;
  res.full_divisors = s.divisors;

  mpz_class order(static_cast<unsigned long>(h));
  for (std::size_t i = 0; i < k; ++i) {
    if (s.divisors[i] <= 1) continue;
    res.structure.divisors.push_back(s.divisors[i]);
    Elem g = identity;
    for (std::size_t j = 0; j < k; ++j) {
      mpz_class e = s.v_inv.at(i, j);
      mpz_mod(e.get_mpz_t(), e.get_mpz_t(), order.get_mpz_t());
      g = compose(g, group_power(res.tried[j], e, identity, compose, order,
                                 less));
    }
    res.generators.push_back(g);
  }

  // paranoia: each reported generator really has the reported order
  for (std::size_t i = 0; i < res.generators.size(); ++i) {
    const mpz_class& d = res.structure.divisors[i];
    if (res.order_of(res.generators[i]) != d)
      throw std::logic_error("abelian_structure: generator order mismatch");
  }
  return res;
}

}  // namespace classforge::grp

#endif
