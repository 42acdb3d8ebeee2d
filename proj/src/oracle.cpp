#include "twsat/oracle.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace twsat {

Verdict brute_force_sat(const CnfFormula& f) {
  int n = f.num_vars();
  if (n > 24) throw std::invalid_argument("brute_force_sat: n > 24");
  for (const Clause& c : f.clauses())
    if (c.empty()) return Verdict::Unsat;

  uint64_t total = 1ull << n;
  for (uint64_t mask = 0; mask < total; ++mask) {
    bool ok = true;
    for (const Clause& c : f.clauses()) {
      bool sat = false;
      for (const Literal& l : c.literals) {
        bool v = (mask >> (l.var - 1)) & 1;
        if (v == l.positive) {
          sat = true;
          break;
        }
      }
      if (!sat) {
        ok = false;
        break;
      }
    }
    if (ok) return Verdict::Sat;
  }
  return Verdict::Unsat;
}

namespace {

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(uint64_t seed) : gen(seed * 6364136223846793005ull + 1442695040888963407ull) {}
  // avoids std::uniform_int_distribution, whose output is not portable
  uint64_t next(uint64_t bound) { return gen() % bound; }
  int pick(int lo, int hi) { return lo + static_cast<int>(next(static_cast<uint64_t>(hi - lo + 1))); }
  bool coin() { return (gen() & 1) != 0; }
};

Clause random_clause(Rng& rng, const std::vector<int>& window, int max_len) {
  int len = rng.pick(1, std::min<int>(max_len, static_cast<int>(window.size())));
  std::vector<int> vars = window;
  for (int i = 0; i < len; ++i) {
    int j = rng.pick(i, static_cast<int>(vars.size()) - 1);
    std::swap(vars[static_cast<size_t>(i)], vars[static_cast<size_t>(j)]);
  }
  std::vector<int> lits;
  for (int i = 0; i < len; ++i)
    lits.push_back(rng.coin() ? vars[static_cast<size_t>(i)] : -vars[static_cast<size_t>(i)]);
  std::sort(lits.begin(), lits.end(),
            [](int a, int b) { return std::abs(a) < std::abs(b); });
  return make_clause(lits);
}

}  // namespace

GeneratedInstance gen_bounded_width(const GeneratorSpec& spec) {
  int w = spec.target_width;
  int n = spec.num_vars;
  int m = spec.num_clauses;
  if (w < 1) throw std::invalid_argument("gen_bounded_width: width must be >= 1");
  if (n < 1 || m < 0) throw std::invalid_argument("gen_bounded_width: bad instance size");
  if (spec.max_clause_len < 1) throw std::invalid_argument("gen_bounded_width: empty clauses");
  if (spec.max_clause_len > w)
    throw std::invalid_argument("gen_bounded_width: clause longer than window");

  Rng rng(spec.seed);
  int window = std::min(w, n);

  if (!spec.tree_shape) {
    // Sliding windows along a path; each clause gets its own spliced bag.
    int positions = n - window + 1;
    std::vector<int> starts;
    for (int j = 0; j < m; ++j) starts.push_back(rng.pick(1, positions));
    std::sort(starts.begin(), starts.end());

    std::vector<Clause> clauses(static_cast<size_t>(m));
    TreeDecomposition td;
    std::vector<std::vector<int>> bags;
    size_t next_clause = 0;
    std::vector<int> order(static_cast<size_t>(m));  // clause index per start order
    for (int pos = 1; pos <= positions; ++pos) {
      std::vector<int> vars;
      for (int x = pos; x < pos + window; ++x) vars.push_back(x);
      bags.push_back(vars);
      while (next_clause < starts.size() && starts[next_clause] == pos) {
        order[next_clause] = pos;
        std::vector<int> bag = vars;
        bag.push_back(0);  // patched below once clause ids are final
        bags.push_back(bag);
        ++next_clause;
      }
    }
    // clause ids follow splice order, so starts[] order is clause order
    int clause_id = 0;
    for (auto& bag : bags) {
      if (!bag.empty() && bag.back() == 0) {
        ++clause_id;
        bag.back() = n + clause_id;
      }
    }
    for (int j = 1; j <= m; ++j) {
      std::vector<int> win;
      for (int x = order[static_cast<size_t>(j - 1)];
           x < order[static_cast<size_t>(j - 1)] + window; ++x)
        win.push_back(x);
      clauses[static_cast<size_t>(j - 1)] = random_clause(rng, win, spec.max_clause_len);
    }
    td.num_vertices = n + m;
    for (auto& b : bags) std::sort(b.begin(), b.end());
    td.bags = std::move(bags);
    for (int b = 2; b <= td.num_bags(); ++b) td.edges.emplace_back(b - 1, b);
    return {CnfFormula(n, std::move(clauses)), std::move(td)};
  }

  // Tree shape: window nodes drop one variable and introduce a fresh one;
  // clause bags chain below the node whose window they draw from.
  struct WindowNode {
    std::vector<int> vars;
    int bag_id;
  };
  std::vector<std::vector<int>> bags;
  std::vector<std::pair<int, int>> edges;
  std::vector<WindowNode> wnodes;

  std::vector<int> root_vars;
  for (int x = 1; x <= window; ++x) root_vars.push_back(x);
  bags.push_back(root_vars);
  wnodes.push_back({root_vars, 1});
  for (int x = window + 1; x <= n; ++x) {
    const WindowNode& parent = wnodes[static_cast<size_t>(
        rng.next(wnodes.size()))];
    std::vector<int> vars = parent.vars;
    if (static_cast<int>(vars.size()) >= window)
      vars.erase(vars.begin() + static_cast<long>(rng.next(vars.size())));
    vars.push_back(x);
    std::sort(vars.begin(), vars.end());
    bags.push_back(vars);
    int id = static_cast<int>(bags.size());
    edges.emplace_back(parent.bag_id, id);
    wnodes.push_back({vars, id});
  }

  std::vector<Clause> clauses;
  std::vector<int> chain_tail(wnodes.size());  // last bag of each node's clause chain
  for (size_t i = 0; i < wnodes.size(); ++i) chain_tail[i] = wnodes[i].bag_id;
  for (int j = 1; j <= m; ++j) {
    size_t wi = rng.next(wnodes.size());
    clauses.push_back(random_clause(rng, wnodes[wi].vars, spec.max_clause_len));
    std::vector<int> bag = wnodes[wi].vars;
    bag.push_back(n + j);
    std::sort(bag.begin(), bag.end());
    bags.push_back(bag);
    int id = static_cast<int>(bags.size());
    edges.emplace_back(chain_tail[wi], id);
    chain_tail[wi] = id;
  }

  TreeDecomposition td;
  td.num_vertices = n + m;
  td.bags = std::move(bags);
  td.edges = std::move(edges);
  return {CnfFormula(n, std::move(clauses)), make_nice(td)};
}

}  // namespace twsat
