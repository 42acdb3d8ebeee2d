#include "twsat/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "twsat/assignment.hpp"
#include "twsat/oracle.hpp"
#include "twsat/params.hpp"

namespace twsat::cli {

namespace {

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

CnfFormula load_cnf(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_dimacs(in);
}

TreeDecomposition load_td(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_td(in);
}

void write_output(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
  } else {
    std::ofstream f(out_path);
    if (!f) throw std::runtime_error("cannot write " + out_path);
    f << text;
  }
}

}  // namespace

std::string RunReport::csv_header(bool with_timings) {
  std::string h =
      "instance,engine,c,epsilon,splitter,d,verdict,n,m,width,bags,"
      "work_units,peak_entries,max_type_seen,measured_splitting_depth,depth_bound";
  if (with_timings) h += ",wall_ms";
  return h;
}

std::string RunReport::csv_row() const {
  std::ostringstream s;
  s << instance << ',' << engine << ',' << c << ',' << fmt_double(epsilon) << ',' << splitter
    << ',' << d << ',' << verdict << ',' << n << ',' << m << ',' << width << ',' << bags << ','
    << stats.work_units << ',' << stats.peak_entries << ',' << stats.max_type_seen << ','
    << stats.measured_splitting_depth << ',' << fmt_double(depth_bound_value);
  if (with_timings) s << ',' << fmt_double(stats.wall_ms);
  return s.str();
}

std::string RunReport::json() const {
  nlohmann::ordered_json j;
  j["instance"] = instance;
  j["engine"] = engine;
  j["c"] = c;
  j["epsilon"] = epsilon;
  j["splitter"] = splitter;
  j["d"] = d;
  j["verdict"] = verdict;
  j["n"] = n;
  j["m"] = m;
  j["width"] = width;
  j["bags"] = bags;
  j["work_units"] = stats.work_units;
  j["peak_entries"] = stats.peak_entries;
  j["max_type_seen"] = stats.max_type_seen;
  j["measured_splitting_depth"] = stats.measured_splitting_depth;
  j["depth_bound"] = depth_bound_value;
  if (with_timings) j["wall_ms"] = stats.wall_ms;
  return j.dump();
}

namespace {

struct SolveArgs {
  std::string cnf, td, engine = "dp", splitter = "hc", out;
  int c = 0;
  double epsilon = 0.0;
  double plan_space = 0.0;
  bool json = false, csv = false, timings = false;
};

RunReport make_report(const SolveArgs& a, const CnfFormula& f, const TreeDecomposition& td,
                      const SolveResult& r, const TradeoffParams* params) {
  RunReport rep;
  rep.instance = a.cnf;
  rep.engine = a.engine;
  rep.splitter = a.engine == "hybrid" ? a.splitter : "";
  if (params != nullptr) {
    rep.c = params->c;
    rep.epsilon = params->epsilon;
    rep.depth_bound_value = depth_bound(params->c, td.num_bags());
  }
  rep.d = td.max_degree();
  rep.verdict = r.verdict == Verdict::Sat ? "SATISFIABLE" : "UNSATISFIABLE";
  rep.n = f.num_vars();
  rep.m = f.num_clauses();
  rep.width = td.width();
  rep.bags = td.num_bags();
  rep.stats = r.stats;
  rep.with_timings = a.timings;
  return rep;
}

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
  CnfFormula f = load_cnf(a.cnf);
  TreeDecomposition td = load_td(a.td);

  SolverConfig config;
  if (a.engine == "dp") {
    config.engine = Engine::Dp;
  } else if (a.engine == "recursive") {
    config.engine = Engine::Recursive;
  } else if (a.engine == "hybrid") {
    config.engine = Engine::Hybrid;
    if (a.plan_space > 0.0) {
      config.params = plan_parameters(a.plan_space, td.is_path() ? 2 : 3);
    } else {
      if (a.c < 2 || a.epsilon <= 0.0) {
        err << "error: --engine hybrid requires --c and --epsilon (or --plan-space)\n";
        return 1;
      }
      config.params = TradeoffParams{a.c, a.epsilon};
    }
    if (a.splitter == "path")
      config.splitter = SplitterKind::Path;
    else if (a.splitter == "h2")
      config.splitter = SplitterKind::H2;
    else if (a.splitter == "hc")
      config.splitter = SplitterKind::Hc;
    else if (a.splitter == "optimal")
      config.splitter = SplitterKind::Optimal;
    else {
      err << "error: unknown splitter " << a.splitter << "\n";
      return 1;
    }
  } else {
    err << "error: unknown engine " << a.engine << "\n";
    return 1;
  }
  SolveResult result = solve(f, td, config);

  out << (result.verdict == Verdict::Sat ? "s SATISFIABLE" : "s UNSATISFIABLE") << "\n";
  RunReport rep = make_report(a, f, td, result, config.params ? &*config.params : nullptr);
  if (a.json) {
    write_output(rep.json() + "\n", a.out, out);
  } else if (a.csv) {
    write_output(RunReport::csv_header(a.timings) + "\n" + rep.csv_row() + "\n", a.out, out);
  }
  return result.verdict == Verdict::Sat ? 10 : 20;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"width-parameterized SAT solving on tree decompositions"};
  app.require_subcommand(1);

  SolveArgs sa;
  CLI::App* solve = app.add_subcommand("solve", "decide satisfiability (exit 10 SAT, 20 UNSAT)");
  solve->add_option("--cnf", sa.cnf, "DIMACS CNF file")->required();
  solve->add_option("--td", sa.td, "tree decomposition (.td) file")->required();
  solve->add_option("--engine", sa.engine, "dp | recursive | hybrid");
  solve->add_option("--c", sa.c, "hybrid: bound on splitting nodes per subtree (>= 2)");
  solve->add_option("--epsilon", sa.epsilon, "hybrid: free fraction of bag bits, in (0,1)");
  solve->add_option("--splitter", sa.splitter, "hybrid: path | h2 | hc | optimal");
  solve->add_option("--plan-space", sa.plan_space,
                    "hybrid: derive (c, epsilon) from a space budget eps'");
  solve->add_flag("--json", sa.json, "emit the run report as one JSON object");
  solve->add_flag("--csv", sa.csv, "emit the run report as CSV (header + row)");
  solve->add_flag("--timings", sa.timings, "include wall_ms in reports (non-deterministic)");
  solve->add_option("--out", sa.out, "write the report to a file instead of stdout");

  struct {
    std::string cnf, td;
  } ca;
  CLI::App* check = app.add_subcommand("check", "validate a (cnf, td) pair");
  check->add_option("--cnf", ca.cnf)->required();
  check->add_option("--td", ca.td)->required();

  CLI::App* gen = app.add_subcommand("gen", "emit fixture trees and random instances");
  gen->require_subcommand(1);
  struct {
    int h = 3;
    bool extended = false;
    std::string out;
  } fa;
  CLI::App* gfib = gen->add_subcommand("fib", "h-fibonacci tree as a singleton-bag .td");
  gfib->set_help_flag("--help");  // frees -h/--h for the tree height
  gfib->add_option("--h", fa.h)->required();
  gfib->add_flag("--extended", fa.extended, "attach the extra root r (emitted as 'c mark')");
  gfib->add_option("--out", fa.out, "output file (default stdout)");
  struct {
    int c = 2, h = 3;
    std::string out;
  } ga;
  CLI::App* ggfib = gen->add_subcommand("gfib", "(c,h)-fibonacci tree");
  ggfib->set_help_flag("--help");
  ggfib->add_option("--c", ga.c)->required();
  ggfib->add_option("--h", ga.h)->required();
  ggfib->add_option("--out", ga.out);
  struct {
    int c = 2, h = 3, w = 1;
    std::string out;
  } gga;
  CLI::App* gG = gen->add_subcommand("G", "lower-bound tree G_{c,h,w} with marked nodes");
  gG->set_help_flag("--help");
  gG->add_option("--c", gga.c)->required();
  gG->add_option("--h", gga.h)->required();
  gG->add_option("--w", gga.w)->required();
  gG->add_option("--out", gga.out);
  struct {
    int width = 2, vars = 6, clauses = 5, maxlen = 0;
    std::string shape = "path";
    uint64_t seed = 0;
    std::string out_cnf, out_td;
  } ra;
  CLI::App* grand = gen->add_subcommand("random", "random bounded-width instance + decomposition");
  grand->add_option("--width", ra.width)->required();
  grand->add_option("--vars", ra.vars)->required();
  grand->add_option("--clauses", ra.clauses)->required();
  grand->add_option("--max-clause-len", ra.maxlen, "default min(3, width)");
  grand->add_option("--shape", ra.shape, "path | tree");
  grand->add_option("--seed", ra.seed)->required();
  grand->add_option("--out-cnf", ra.out_cnf)->required();
  grand->add_option("--out-td", ra.out_td)->required();

  struct {
    std::string td;
    int c = 2;
    std::vector<int> marks;
    bool memo = false;
  } ma;
  CLI::App* msdc = app.add_subcommand("msd", "minimal c-splitting depth of a .td tree");
  msdc->add_option("--td", ma.td)->required();
  msdc->add_option("--c", ma.c)->required();
  msdc->add_option("--mark", ma.marks, "initial splitting nodes (repeatable)");
  msdc->add_flag("--memo", ma.memo, "memoize the search (trades space for time)");

  struct {
    std::vector<std::string> cnfs, tds;
    std::string c_list = "2,3", eps_list = "0.25,0.5,0.75", splitter = "hc", out;
    bool timings = false;
  } ba;
  CLI::App* bench = app.add_subcommand("bench", "hybrid sweep; one CSV row per (instance, c, eps)");
  bench->add_option("--cnf", ba.cnfs, "CNF files (zipped with --td)")->required();
  bench->add_option("--td", ba.tds, "decomposition files")->required();
  bench->add_option("--c-list", ba.c_list);
  bench->add_option("--epsilon-list", ba.eps_list);
  bench->add_option("--splitter", ba.splitter);
  bench->add_option("--out", ba.out);
  bench->add_flag("--timings", ba.timings);
  bench->footer("CSV columns: " + RunReport::csv_header(false));

  std::vector<std::string> argv(args.rbegin(), args.rend());  // CLI11 wants reversed args
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return 0;
    }
    err << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (solve->parsed()) return cmd_solve(sa, out, err);

    if (check->parsed()) {
      CnfFormula f = load_cnf(ca.cnf);
      TreeDecomposition td = load_td(ca.td);
      ValidationResult vr = validate(td, f);
      if (!vr.ok) {
        out << "INVALID: " << vr.message << "\n";
        return 1;
      }
      out << "VALID\n";
      out << "n " << f.num_vars() << "\nm " << f.num_clauses() << "\nbags " << td.num_bags()
          << "\nwidth " << td.width() << "\nmax_degree " << td.max_degree() << "\nis_path "
          << (td.is_path() ? "yes" : "no") << "\nnice "
          << (td.max_degree() <= 3 ? "yes" : "no") << "\n";
      return 0;
    }

    if (gfib->parsed()) {
      GeneratedTree t = fa.extended ? gen_fib_extended(fa.h) : gen_fib(fa.h);
      std::string text;
      if (fa.extended) text += "c mark " + std::to_string(t.root) + "\n";
      text += emit_td(synthetic_td(t.tree));
      write_output(text, fa.out, out);
      err << "nodes " << t.tree.size() << "\n";
      return 0;
    }
    if (ggfib->parsed()) {
      GeneratedTree t = gen_gfib(ga.c, ga.h);
      write_output(emit_td(synthetic_td(t.tree)), ga.out, out);
      err << "nodes " << t.tree.size() << "\n";
      return 0;
    }
    if (gG->parsed()) {
      GeneratedMarkedTree t = gen_G(gga.c, gga.h, gga.w);
      std::string text;
      for (int s : t.smarks) text += "c mark " + std::to_string(s) + "\n";
      text += emit_td(synthetic_td(t.tree));
      write_output(text, gga.out, out);
      err << "nodes " << t.tree.size() << "\n";
      return 0;
    }
    if (grand->parsed()) {
      GeneratorSpec spec;
      spec.target_width = ra.width;
      spec.tree_shape = ra.shape == "tree";
      spec.num_vars = ra.vars;
      spec.num_clauses = ra.clauses;
      spec.max_clause_len = ra.maxlen > 0 ? ra.maxlen : std::min(3, ra.width);
      spec.seed = ra.seed;
      GeneratedInstance inst = gen_bounded_width(spec);
      write_output(emit_dimacs(inst.formula), ra.out_cnf, out);
      write_output(emit_td(inst.decomp), ra.out_td, out);
      return 0;
    }

    if (msdc->parsed()) {
      TreeDecomposition td = load_td(ma.td);
      TreeTopology topo = topology_of(td);
      SubtreeView view = full_view(topo);
      for (int s : ma.marks) {
        if (s < 1 || s > topo.size()) throw std::runtime_error("mark out of range");
        if (!view.marked(s)) view.smarks.insert(
            std::lower_bound(view.smarks.begin(), view.smarks.end(), s), s);
      }
      auto [value, move] = msd_with_move(view, ma.c, MsdOptions{ma.memo});
      if (value == kDepthInfinity) {
        out << "msd infinity\n";
      } else {
        out << "msd " << value << "\n";
        if (move > 0) out << "optimal_first_split " << move << "\n";
      }
      return 0;
    }

    if (bench->parsed()) {
      if (ba.cnfs.size() != ba.tds.size())
        throw std::runtime_error("--cnf and --td counts differ");
      SplitterKind kind = ba.splitter == "path"      ? SplitterKind::Path
                          : ba.splitter == "h2"      ? SplitterKind::H2
                          : ba.splitter == "optimal" ? SplitterKind::Optimal
                                                     : SplitterKind::Hc;
      std::string text = RunReport::csv_header(ba.timings) + "\n";
      for (size_t i = 0; i < ba.cnfs.size(); ++i) {
        CnfFormula f = load_cnf(ba.cnfs[i]);
        TreeDecomposition td = load_td(ba.tds[i]);
        for (double cv : parse_list(ba.c_list)) {
          for (double ev : parse_list(ba.eps_list)) {
            TradeoffParams params{static_cast<int>(cv), ev};
            SolveResult r = hybrid_solve(f, td, params, kind);
            SolveArgs fake;
            fake.cnf = ba.cnfs[i];
            fake.engine = "hybrid";
            fake.splitter = ba.splitter;
            fake.timings = ba.timings;
            RunReport rep = make_report(fake, f, td, r, &params);
            text += rep.csv_row() + "\n";
          }
        }
      }
      write_output(text, ba.out, out);
      return 0;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no subcommand\n";
  return 1;
}

}  // namespace twsat::cli
