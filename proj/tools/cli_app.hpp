#pragma once

// Command-line front end. Exit codes: 0 success, 1 a mathematical check
// failed (its report is still written), 2 usage or input errors.

#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ssrank/construction.hpp"
#include "ssrank/io.hpp"
#include "ssrank/min_ratio.hpp"
#include "ssrank/node.hpp"
#include "ssrank/operators.hpp"
#include "ssrank/schreier.hpp"
#include "ssrank/tree.hpp"
#include "ssrank/zpq.hpp"

namespace ssrank::cli {

enum Exit : int { kOk = 0, kCheckFailed = 1, kUsage = 2 };

namespace detail {

inline std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  return in;
}

// Writes to `path`, or to `out` when the path is empty.
inline void emit(const std::string& path, std::ostream& out, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write " + path);
  f << text;
}

inline FiniteTree load_tree(const std::string& path, std::ostream& err) {
  auto in = open_in(path);
  TreeFile tf = read_tree(in);
  if (!tf.was_closed) err << "warning: " << path << " is not closed under initial segments; closure applied\n";
  return std::move(tf.tree);
}

inline SparseTreeVector load_vector(const std::string& path) {
  auto in = open_in(path);
  return read_vector(in);
}

inline std::string segment_tokens(const Segment& s) {
  std::string out;
  for (const Node& t : s.nodes()) out += (out.empty() ? "" : " ") + t.token();
  return out;
}

// Vector with a random tree of at most `size` nodes and values in [-1, 1].
inline SparseTreeVector random_vector(std::mt19937_64& rng, std::size_t size) {
  std::vector<Node> nodes{Node{}};
  NodeSet seen{Node{}};
  while (nodes.size() < size) {
    const Node child = nodes[rng() % nodes.size()].child(1 + rng() % 3);
    if (seen.insert(child).second) nodes.push_back(child);
  }
  SparseTreeVector z;
  std::uniform_real_distribution<double> value(-1, 1);
  for (const Node& t : nodes) {
    if (rng() % 3) z.set(t, value(rng));
  }
  return z;
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Schreier families, James-tree norms and the strict-singularity construction", "ssrank"};
  app.require_subcommand(1);
  std::function<int()> action;

  // norm
  double p = 1;
  double q = 2;
  std::vector<std::string> vector_paths;
  bool oracle = false;
  auto* norm = app.add_subcommand("norm", "Z_{p,q} norm of vectors in .vec files");
  norm->add_option("--p", p, "inner exponent")->required();
  norm->add_option("--q", q, "outer exponent")->required();
  norm->add_option("--vector", vector_paths, ".vec file (repeatable)")->required();
  norm->add_flag("--oracle", oracle, "also evaluate by exhaustive search and compare");
  norm->callback([&] {
    action = [&] {
      const Exponents e(p, q);
      bool agree = true;
      for (const std::string& path : vector_paths) {
        const SparseTreeVector z = detail::load_vector(path);
        const double v = znorm(e, z);
        if (vector_paths.size() > 1) out << path << '\t';
        out << format_number(v);
        if (oracle) {
          const double b = znorm_bruteforce(e, z);
          const bool ok = std::fabs(v - b) <= 1e-9 * std::max(1.0, std::fabs(b));
          agree = agree && ok;
          out << "\toracle " << format_number(b) << (ok ? "\tagree" : "\tDISAGREE");
        }
        out << '\n';
      }
      return agree ? kOk : kCheckFailed;
    };
  });

  // maxseg
  std::string maxseg_path;
  std::optional<double> maxseg_q;
  auto* maxseg = app.add_subcommand("maxseg", "largest segment projection of a vector");
  maxseg->add_option("--p", p, "inner exponent")->required();
  maxseg->add_option("--q", maxseg_q, "outer exponent (does not affect the result)");
  maxseg->add_option("--vector", maxseg_path, ".vec file")->required();
  maxseg->callback([&] {
    action = [&] {
      const SegmentProjection s = max_segment_projection(Exponents(p, maxseg_q.value_or(p)),
                                                         detail::load_vector(maxseg_path));
      out << format_number(s.value) << '\n' << detail::segment_tokens(s.segment) << '\n';
      return kOk;
    };
  });

  // schreier member | restrict
  int xi = 1;
  std::string set_text;
  int max_element = 1;
  std::string out_path;
  auto* schreier = app.add_subcommand("schreier", "Schreier families S_xi");
  schreier->require_subcommand(1);
  auto* member = schreier->add_subcommand("member", "is the set in S_xi");
  member->add_option("--xi", xi, "index >= 1")->required();
  member->add_option("--set", set_text, "comma-separated positive integers")->required();
  member->callback([&] {
    action = [&] {
      out << (schreier_member(SchreierIndex(xi), parse_int_set(set_text)) ? "true" : "false") << '\n';
      return kOk;
    };
  });
  auto* restrict_cmd = schreier->add_subcommand("restrict", "S_xi restricted to {1..M} as a .fam file");
  restrict_cmd->add_option("--xi", xi, "index >= 1")->required();
  restrict_cmd->add_option("--max", max_element, "M")->required();
  restrict_cmd->add_option("--out", out_path, ".fam output (default stdout)");
  restrict_cmd->callback([&] {
    action = [&] {
      const FiniteFamily fam = schreier_restrict(SchreierIndex(xi), max_element);
      std::ostringstream text;
      write_family(text, fam);
      detail::emit(out_path, out, text.str());
      if (!out_path.empty()) out << "sets " << fam.size() << " order " << family_order(fam) << '\n';
      return kOk;
    };
  });

  // tree order | derivative | chi | unchi
  std::string tree_path;
  std::string node_text;
  std::int64_t index = 1;
  auto* tree = app.add_subcommand("tree", "finite trees and the enumeration chi");
  tree->require_subcommand(1);
  auto* order_cmd = tree->add_subcommand("order", "order of a .tree file");
  order_cmd->add_option("--tree", tree_path, ".tree file")->required();
  order_cmd->callback([&] {
    action = [&] {
      out << order(detail::load_tree(tree_path, err)) << '\n';
      return kOk;
    };
  });
  auto* derivative_cmd = tree->add_subcommand("derivative", "tree with its maximal nodes removed");
  derivative_cmd->add_option("--tree", tree_path, ".tree file")->required();
  derivative_cmd->add_option("--out", out_path, ".tree output (default stdout)");
  derivative_cmd->callback([&] {
    action = [&] {
      std::ostringstream text;
      write_tree(text, derivative(detail::load_tree(tree_path, err)));
      detail::emit(out_path, out, text.str());
      return kOk;
    };
  });
  auto* chi_cmd = tree->add_subcommand("chi", "index of a node token");
  chi_cmd->add_option("--node", node_text, "token such as 1.3.2 or e")->required();
  chi_cmd->callback([&] {
    action = [&] {
      out << chi_encode(Node::parse(node_text)) << '\n';
      return kOk;
    };
  });
  auto* unchi_cmd = tree->add_subcommand("unchi", "node token of an index");
  unchi_cmd->add_option("--index", index, "index >= 1")->required();
  unchi_cmd->callback([&] {
    action = [&] {
      out << chi_decode(index).token() << '\n';
      return kOk;
    };
  });

  // hs
  std::int64_t columns = 1;
  auto* hs = app.add_subcommand("hs", "section of H(S) on e_1..e_M as .op.json");
  hs->add_option("--tree", tree_path, ".tree file")->required();
  hs->add_option("--max", columns, "M")->required();
  hs->add_option("--out", out_path, "output (default stdout)");
  hs->callback([&] {
    action = [&] {
      detail::emit(out_path, out, operator_json(hs_section(detail::load_tree(tree_path, err), columns)).dump(2) + "\n");
      return kOk;
    };
  });

  // isom
  std::string prefix_text;
  std::string coeffs_text;
  auto* isom = app.add_subcommand("isom", "H(S) along a branch is an isometry");
  isom->add_option("--tree", tree_path, ".tree file")->required();
  isom->add_option("--prefix", prefix_text, "branch prefix token")->required();
  isom->add_option("--coeffs", coeffs_text, "comma-separated coefficients")->required();
  isom->add_option("--p", p, "inner exponent")->required();
  isom->add_option("--q", q, "outer exponent")->required();
  isom->callback([&] {
    action = [&] {
      const std::vector<double> coeffs = parse_double_list(coeffs_text);
      const IsometryReport r = branch_isometry_check(detail::load_tree(tree_path, err), Node::parse(prefix_text),
                                                     coeffs, Exponents(p, q));
      out << "lhs " << format_number(r.lhs) << "\nrhs " << format_number(r.rhs) << "\npass "
          << (r.pass ? "true" : "false") << '\n';
      return r.pass ? kOk : kCheckFailed;
    };
  });

  // singtree
  std::string op_path;
  std::optional<std::int64_t> embed;
  std::int64_t m = 1;
  std::int64_t universe = 1;
  std::int64_t cap = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  double sp = 1;
  double sq = 2;
  auto* singtree = app.add_subcommand("singtree", "finite tree of spans on which T is bounded below by 1/m");
  auto* op_opt = singtree->add_option("--op", op_path, ".op.json operator section");
  auto* embed_opt = singtree->add_option("--embed", embed, "use the embedding I on e_1..e_M instead of --op");
  op_opt->excludes(embed_opt);
  singtree->add_option("--m", m, "m >= 1")->required();
  singtree->add_option("--universe", universe, "largest index")->required();
  singtree->add_option("--cap", cap, "largest sequence length")->required();
  singtree->add_option("--seed", seed, "seed for spans searched heuristically");
  singtree->add_option("--threads", threads, "worker threads");
  singtree->add_option("--p", sp, "inner exponent (default 1)");
  singtree->add_option("--q", sq, "outer exponent (default 2)");
  singtree->add_option("--out", out_path, "JSON output (default stdout)");
  singtree->callback([&] {
    if (op_path.empty() && !embed) throw CLI::ValidationError("singtree", "one of --op or --embed is required");
    action = [&] {
      std::optional<OperatorSection> op;
      if (embed) {
        op = embed_section(*embed);
      } else {
        auto in = detail::open_in(op_path);
        op = read_operator(in);
      }
      SingTreeOptions opt;
      opt.ratio.seed = seed;
      opt.threads = threads;
      const SingTreeResult r = sing_tree(*op, m, universe, cap, Exponents(sp, sq), opt);
      detail::emit(out_path, out, sing_tree_json(r, m, universe, cap).dump(2) + "\n");
      return kOk;
    };
  });

  // construct
  double delta = 0.5;
  double theta = 1;
  std::string family = "antichain";
  std::uint64_t width_base = 1;
  auto* construct_cmd = app.add_subcommand("construct", "run and verify the S_2 witness construction");
  construct_cmd->add_option("--p", p, "p >= 1 (q = 2p)")->required();
  construct_cmd->add_option("--delta", delta, "target norm delta > 0")->required();
  construct_cmd->add_option("--theta", theta, "equivalence constant >= 1")->required();
  construct_cmd->add_option("--family", family, "antichain | comb")
      ->required()
      ->check(CLI::IsMember({"antichain", "comb"}));
  construct_cmd->add_option("--seed", seed, "seed of the comb pattern");
  construct_cmd->add_option("--width-base", width_base, "antichain: y_n spread over b^n nodes (default 1)")
      ->check(CLI::PositiveNumber);
  construct_cmd->add_option("--out", out_path, "report JSON (default stdout)");
  construct_cmd->callback([&] {
    action = [&] {
      const ConstructionParams params(p, delta, theta);
      const auto source = make_family(family == "comb" ? FamilyKind::comb : FamilyKind::antichain, params.exps(),
                                      seed, width_base);
      std::optional<ConstructionReport> found;
      try {
        found = construct(params, *source);
      } catch (const SelectionError& e) {
        err << "error: " << e.what() << " after " << e.partial().size() << " of " << choose_N(params)
            << " rounds\n";
        return kCheckFailed;
      }
      const ConstructionReport& rep = *found;
      detail::emit(out_path, out, report_json(rep).dump(2) + "\n");
      if (!out_path.empty()) {
        out << "N " << rep.selection.N << "\nfinal_y_norm " << format_number(rep.final_y_norm.value) << "\npass "
            << (rep.pass() ? "true" : "false") << '\n';
      }
      if (!rep.p3) err << "warning: some ||y_n|| exceeds 2; the norm bounds are not guaranteed\n";
      for (const auto& f : rep.conditions.failures) err << "condition: " << f << '\n';
      return rep.pass() ? kOk : kCheckFailed;
    };
  });

  // selftest
  std::size_t count = 2000;
  auto* selftest = app.add_subcommand("selftest", "norm oracle agreement and the construction grid");
  selftest->add_option("--count", count, "random vectors for the oracle comparison");
  selftest->add_option("--seed", seed, "seed");
  selftest->callback([&] {
    action = [&] {
      bool ok = true;
      std::mt19937_64 rng(seed);
      const double exps[] = {1.0, 1.5, 2.0};
      std::size_t bad = 0;
      for (std::size_t i = 0; i < count; ++i) {
        const double ep = exps[rng() % 3];
        const Exponents e(ep, std::uniform_real_distribution<double>(ep, 4)(rng));
        const SparseTreeVector z = detail::random_vector(rng, 1 + rng() % 10);
        const double a = znorm(e, z);
        const double b = znorm_bruteforce(e, z);
        bad += std::fabs(a - b) > 1e-9 * std::max(1.0, b);
      }
      out << (bad ? "FAIL" : "PASS") << " oracle " << count - bad << "/" << count << '\n';
      ok = ok && bad == 0;
      for (double cp : {1.0, 1.5, 2.0}) {
        for (double cd : {0.5, 0.1}) {
          for (double ct : {1.0, 2.0}) {
            const auto t0 = std::chrono::steady_clock::now();
            const ConstructionParams params(cp, cd, ct);
            bool pass = false;
            try {
              pass = construct(params, *make_family(FamilyKind::antichain, params.exps(), seed)).pass();
            } catch (const SelectionError&) {
            }
            const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            pass = pass && secs < 30;
            out << (pass ? "PASS" : "FAIL") << " construct p=" << cp << " delta=" << cd << " theta=" << ct << '\n';
            ok = ok && pass;
          }
        }
      }
      return ok ? kOk : kCheckFailed;
    };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  }
  try {
    return action();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace ssrank::cli
